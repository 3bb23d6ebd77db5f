// Copyright 2026 The lexsys Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lexsys/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lexsys/error.hpp"
#include "lexsys/json_wire.hpp"

namespace lexsys {

UserProfile new_profile(std::string user_id) {
  UserProfile p;
  p.user_id = std::move(user_id);
  return p;
}

namespace {

void apply_counts(UserProfile& p, const EventKind& kind) {
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, QueryIssued>) {
          for (const auto& c : e.query.criteria) {
            ++p.criterion_counts[c.property];
            if (const auto* w = std::get_if<OrdinalWindow>(&c.requested)) {
              for (std::size_t i = w->lo; i <= w->hi; ++i) ++p.option_counts[{c.property, i}];
            } else if (const auto* ch = std::get_if<CategoryChoice>(&c.requested)) {
              for (auto m : ch->members) ++p.option_counts[{c.property, m}];
            }
          }
        } else if constexpr (std::is_same_v<T, WhyAsked>) {
          ++p.species_why_counts[e.species];
        } else if constexpr (std::is_same_v<T, SelectionSaved>) {
          for (const auto& s : e.matched) ++p.species_selected_counts[s];
        }
      },
      kind);
}

}  // namespace

UserProfile record_event(UserProfile profile, SessionEvent event) {
  if (!profile.sessions.empty() && event.timestamp < profile.sessions.back().timestamp) {
    throw Error(ErrorCode::ClockSkew, "event at " + format_instant(event.timestamp) +
                                          " precedes the last event at " +
                                          format_instant(profile.sessions.back().timestamp));
  }
  apply_counts(profile, event.kind);
  profile.sessions.push_back(std::move(event));
  return profile;
}

UserProfile fold_events(std::string user_id, const std::vector<SessionEvent>& events) {
  UserProfile p = new_profile(std::move(user_id));
  for (const auto& e : events) p = record_event(std::move(p), e);
  return p;
}

std::vector<CriterionRequest> suggest_criteria(const UserProfile& profile,
                                               const CriteriaSchema& schema, std::size_t k) {
  struct Candidate {
    std::size_t position;
    std::size_t uses;
    std::size_t top_option_uses;
    std::optional<std::size_t> top_option;
  };
  std::vector<Candidate> candidates;
  for (const auto& ref : schema.properties()) {
    Candidate c{ref.position, 0, 0, std::nullopt};
    if (auto it = profile.criterion_counts.find(ref.qualified); it != profile.criterion_counts.end()) {
      c.uses = it->second;
    }
    const Property& prop = schema.property(ref);
    for (std::size_t i = 0; i < prop.size(); ++i) {
      if (prop.is_wildcard(i)) continue;  // a window may span one; it is never suggested alone
      auto it = profile.option_counts.find({ref.qualified, i});
      if (it == profile.option_counts.end() || it->second == 0) continue;
      if (it->second > c.top_option_uses) {
        c.top_option_uses = it->second;
        c.top_option = i;
      }
    }
    candidates.push_back(c);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.uses != b.uses) return a.uses > b.uses;
    return a.top_option_uses > b.top_option_uses;
  });

  std::vector<CriterionRequest> out;
  for (const auto& c : candidates) {
    if (out.size() == k) break;
    const PropertyRef& ref = schema.properties()[c.position];
    const Property& prop = schema.property(ref);
    if (c.top_option) {
      if (prop.kind == PropertyKind::Ordinal) {
        out.push_back({ref.qualified, OrdinalWindow{*c.top_option, *c.top_option}});
      } else {
        out.push_back({ref.qualified, CategoryChoice{{*c.top_option}}});
      }
    } else if (!prop.wildcard_labels.empty()) {
      out.push_back({ref.qualified, Wildcard{prop.wildcard_labels.front()}});
    } else {
      out.push_back({ref.qualified, Wildcard{}});
    }
  }
  return out;
}

std::vector<double> criterion_vector(const UserProfile& profile, const CriteriaSchema& schema) {
  std::vector<std::size_t> counts;
  counts.reserve(schema.property_count());
  std::size_t g = 0;
  for (const auto& ref : schema.properties()) {
    auto it = profile.criterion_counts.find(ref.qualified);
    counts.push_back(it == profile.criterion_counts.end() ? 0 : it->second);
    g = std::gcd(g, counts.back());
  }
  // Reduced by the gcd so uniformly rescaled logs give bit-identical vectors.
  std::vector<double> v;
  v.reserve(counts.size());
  for (auto c : counts) v.push_back(g == 0 ? 0.0 : double(c / g));
  return v;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dot += a[i] * b[i];
  }
  for (double x : a) na += x * x;
  for (double x : b) nb += x * x;
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

namespace {

const SelectionSaved* last_selection(const UserProfile& p) {
  for (auto it = p.sessions.rbegin(); it != p.sessions.rend(); ++it) {
    if (const auto* s = std::get_if<SelectionSaved>(&it->kind)) return s;
  }
  return nullptr;
}

std::map<std::string, std::size_t> reference_counts(const UserProfile& p) {
  std::map<std::string, std::size_t> out = p.species_why_counts;
  for (const auto& [name, n] : p.species_selected_counts) out[name] += n;
  return out;
}

}  // namespace

std::vector<ScoredSpecies> score_species(const UserProfile& profile,
                                         std::span<const UserProfile> all_profiles,
                                         const SpeciesDB& db, const CriteriaSchema& schema) {
  const auto self = criterion_vector(profile, schema);

  std::vector<std::pair<double, std::map<std::string, std::size_t>>> neighbours;
  std::size_t g = 0;
  for (const auto& other : all_profiles) {
    if (other.user_id == profile.user_id) continue;
    const auto sim = cosine_similarity(self, criterion_vector(other, schema));
    if (sim <= 0) continue;
    auto counts = reference_counts(other);
    for (const auto& [_, n] : counts) g = std::gcd(g, n);
    neighbours.emplace_back(sim, std::move(counts));
  }

  std::set<std::string> exclude;
  if (const auto* last = last_selection(profile)) exclude.insert(last->matched.begin(), last->matched.end());

  std::map<std::string, double> scores;
  for (const auto& [sim, counts] : neighbours) {
    for (const auto& [name, n] : counts) {
      if (n == 0 || exclude.contains(name) || !db.species.contains(name)) continue;
      scores[name] += sim * double(n / g);
    }
  }
  std::vector<ScoredSpecies> out;
  for (const auto& [name, score] : scores) {
    if (score > 0) out.push_back({name, score});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  return out;
}

std::vector<std::string> suggest_species(const UserProfile& profile,
                                         std::span<const UserProfile> all_profiles,
                                         const SpeciesDB& db, const CriteriaSchema& schema,
                                         std::size_t k) {
  std::vector<std::string> out;
  for (auto& s : score_species(profile, all_profiles, db, schema)) {
    if (out.size() == k) break;
    out.push_back(std::move(s.name));
  }
  return out;
}

std::vector<ReferencedSpecies> most_referenced_species(std::span<const UserProfile> all_profiles,
                                                       std::size_t k) {
  std::map<std::string, std::size_t> totals;
  for (const auto& p : all_profiles) {
    for (const auto& [name, n] : p.species_why_counts) totals[name] += n;
  }
  std::vector<ReferencedSpecies> out;
  for (const auto& [name, n] : totals) {
    if (n > 0) out.push_back({name, n});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.count > b.count; });
  if (out.size() > k) out.resize(k);
  return out;
}

// ---------------------------------------------------------------------------
// Local subset sync

std::string_view to_string(SyncDirection d) {
  return d == SyncDirection::Pull ? "pull" : "push";
}

SyncDirection sync_direction_from_string(std::string_view s) {
  if (s == "pull") return SyncDirection::Pull;
  if (s == "push") return SyncDirection::PushContributions;
  throw Error(ErrorCode::UsageError, "unknown sync direction '" + std::string(s) + "' (pull, push)");
}

UserProfile set_local_subset(UserProfile profile, const std::set<std::string>& names,
                             const SpeciesDB& central) {
  for (const auto& n : names) {
    if (!central.species.contains(n)) {
      throw Error(ErrorCode::ValidationError, "species '" + n + "' is not in the central database");
    }
  }
  LocalSubset& subset = profile.local_subset ? *profile.local_subset
                                             : profile.local_subset.emplace();
  subset.names = names;
  // Keep pending contributions; drop copies of species no longer in the subset.
  std::erase_if(subset.records, [&](const auto& kv) {
    const bool pending = std::any_of(subset.pending_species.begin(), subset.pending_species.end(),
                                     [&](const auto& r) { return r.name == kv.first; });
    return !names.contains(kv.first) && !pending;
  });
  return profile;
}

UserProfile contribute_species(UserProfile profile, SpeciesRecord record,
                               const CriteriaSchema& schema) {
  validate_record(record, schema);
  LocalSubset& subset = profile.local_subset ? *profile.local_subset
                                             : profile.local_subset.emplace();
  subset.names.insert(record.name);
  subset.records.insert_or_assign(record.name, record);
  std::erase_if(subset.pending_species, [&](const auto& r) { return r.name == record.name; });
  subset.pending_species.push_back(std::move(record));
  return profile;
}

UserProfile contribute_note(UserProfile profile, NoteEntry note) {
  LocalSubset& subset = profile.local_subset ? *profile.local_subset
                                             : profile.local_subset.emplace();
  subset.pending_notes.push_back(std::move(note));
  return profile;
}

SyncOutcome sync_local_subset(UserProfile profile, SpeciesDB central, SyncDirection direction,
                              const CriteriaSchema& schema, const ChangeContext& ctx) {
  SyncReport report;
  report.direction = direction;
  if (!profile.local_subset) {
    return {std::move(profile), std::move(central), std::move(report)};
  }
  LocalSubset& subset = *profile.local_subset;

  if (direction == SyncDirection::Pull) {
    for (const auto& name : subset.names) {
      const bool pending = std::any_of(subset.pending_species.begin(), subset.pending_species.end(),
                                       [&](const auto& r) { return r.name == name; });
      const SpeciesRecord* record = central.find(name);
      if (!record) {
        if (!pending) report.conflicted.push_back(name);  // removed centrally
        continue;
      }
      const auto rev = central.revision_of(name);
      if (pending) {
        auto base = subset.base_revision.find(name);
        if (base == subset.base_revision.end() || rev > base->second) {
          report.conflicted.push_back(name);
        }
        continue;  // never overwrite an unpushed contribution
      }
      subset.records.insert_or_assign(name, *record);
      subset.base_revision[name] = rev;
      report.applied.push_back(name);
    }
    return {std::move(profile), std::move(central), std::move(report)};
  }

  std::vector<std::string> conflicts;
  for (const auto& record : subset.pending_species) {
    validate_record(record, schema);
    const auto rev = central.revision_of(record.name);
    auto base = subset.base_revision.find(record.name);
    const std::uint64_t base_rev = base == subset.base_revision.end() ? 0 : base->second;
    if (rev > base_rev) conflicts.push_back(record.name);
  }
  if (!conflicts.empty()) {
    std::string names;
    for (const auto& n : conflicts) names += (names.empty() ? "" : ", ") + n;
    throw Error(ErrorCode::Conflict, "central record changed since local copy: " + names, names);
  }
  for (const auto& note : subset.pending_notes) {
    const bool ok = central.species.contains(note.target) || schema.find(note.target) ||
                    std::any_of(subset.pending_species.begin(), subset.pending_species.end(),
                                [&](const auto& r) { return r.name == note.target; });
    if (!ok) {
      throw Error(ErrorCode::UnresolvedTarget, "note target '" + note.target + "' does not resolve");
    }
  }
  for (const auto& record : subset.pending_species) {
    const bool existing = central.species.contains(record.name);
    central = stage_change(std::move(central), ChangeAction::StagedUpsert, record.name,
                           std::string(existing ? "proposed update" : "proposed new species") +
                               " from " + profile.user_id,
                           record_to_json(record, schema).dump(), ctx);
    report.staged.push_back("species:" + record.name);
  }
  for (const auto& note : subset.pending_notes) {
    central = stage_change(std::move(central), ChangeAction::StagedNote, note.target,
                           "proposed note from " + profile.user_id, note_to_json(note).dump(), ctx);
    report.staged.push_back("note:" + note.target);
  }
  subset.pending_species.clear();
  subset.pending_notes.clear();
  return {std::move(profile), std::move(central), std::move(report)};
}

// ---------------------------------------------------------------------------
// Store

bool valid_user_id(std::string_view user_id) { return valid_store_id(user_id); }

ProfileStore::ProfileStore(std::filesystem::path dir, std::shared_ptr<const CriteriaSchema> schema)
    : dir_(std::move(dir)), schema_(std::move(schema)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::StoreError, "cannot create '" + dir_.string() + "': " + ec.message());
}

std::filesystem::path ProfileStore::file_for(const std::string& user_id) const {
  if (!valid_user_id(user_id)) {
    throw Error(ErrorCode::ValidationError, "invalid user id '" + user_id + "'");
  }
  return dir_ / (user_id + ".json");
}

UserProfile ProfileStore::load(const std::string& user_id) const {
  const auto path = file_for(user_id);
  std::lock_guard lock(mu_);
  if (!std::filesystem::exists(path)) return new_profile(user_id);
  try {
    return profile_from_json(Json::parse(read_file(path)), *schema_);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::StoreError, "profile '" + user_id + "': " + e.what());
  }
}

void ProfileStore::save(const UserProfile& profile) {
  const auto path = file_for(profile.user_id);
  std::lock_guard lock(mu_);
  try {
    write_file_atomic(path, profile_to_json(profile, *schema_).dump(2) + "\n");
  } catch (const Error& e) {
    throw Error(ErrorCode::StoreError, e.what());
  }
}

std::vector<UserProfile> ProfileStore::load_all() const {
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.path().extension() == ".json") ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  std::vector<UserProfile> out;
  for (const auto& id : ids) out.push_back(load(id));
  return out;
}

}  // namespace lexsys
