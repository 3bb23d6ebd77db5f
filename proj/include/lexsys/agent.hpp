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

// Per-user profiles built from a session event log, plus the suggestions
// derived from them and the local-subset sync against the central database.
//
// The event log is the source of truth. Every counter on UserProfile equals
// a from-scratch fold of `sessions`.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lexsys/knowledgebase.hpp"
#include "lexsys/schema.hpp"
#include "lexsys/selection.hpp"
#include "lexsys/time.hpp"

namespace lexsys {

struct QueryIssued {
  SelectionQuery query;
  bool operator==(const QueryIssued&) const = default;
};
struct WhyAsked {
  std::string species;
  bool operator==(const WhyAsked&) const = default;
};
struct SelectionSaved {
  std::string id;
  std::vector<std::string> matched;
  bool operator==(const SelectionSaved&) const = default;
};
struct NoteAdded {
  std::string target;
  bool operator==(const NoteAdded&) const = default;
};
struct SuggestionAccepted {
  std::string what;
  bool operator==(const SuggestionAccepted&) const = default;
};

using EventKind = std::variant<QueryIssued, WhyAsked, SelectionSaved, NoteAdded, SuggestionAccepted>;

struct SessionEvent {
  Instant timestamp{};
  EventKind kind;
  bool operator==(const SessionEvent&) const = default;
};

/// A user's working copy of part of the central database.
struct LocalSubset {
  std::set<std::string> names;
  std::map<std::string, SpeciesRecord> records;
  std::map<std::string, std::uint64_t> base_revision;  // central revision at last pull
  std::vector<SpeciesRecord> pending_species;          // contributions awaiting push
  std::vector<NoteEntry> pending_notes;

  bool operator==(const LocalSubset&) const = default;
};

struct UserProfile {
  std::string user_id;
  std::map<std::string, std::size_t> criterion_counts;
  std::map<std::pair<std::string, std::size_t>, std::size_t> option_counts;
  std::map<std::string, std::size_t> species_why_counts;
  std::map<std::string, std::size_t> species_selected_counts;
  std::vector<SessionEvent> sessions;
  std::optional<LocalSubset> local_subset;

  bool operator==(const UserProfile&) const = default;
};

UserProfile new_profile(std::string user_id);

/// Appends and updates counters incrementally. Throws ClockSkew when the
/// event is older than the last one.
UserProfile record_event(UserProfile profile, SessionEvent event);

/// Counters rebuilt from the event log alone.
UserProfile fold_events(std::string user_id, const std::vector<SessionEvent>& events);

/// Top-k properties by usage, each with its most used option. Properties the
/// user never touched follow in schema order with a wildcard pick where the
/// property has one. Never throws.
std::vector<CriterionRequest> suggest_criteria(const UserProfile& profile,
                                               const CriteriaSchema& schema, std::size_t k);

/// Criterion-frequency vector in schema property order.
std::vector<double> criterion_vector(const UserProfile& profile, const CriteriaSchema& schema);
/// Cosine similarity in [0, 1]; 0 when either vector is all zero.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct ScoredSpecies {
  std::string name;
  double score = 0.0;
};

/// Collaborative scores: sum over other profiles of similarity times that
/// profile's reference count (why asks plus saved selections) for a species.
/// Excludes species in the user's last saved selection and species not in db.
/// Sorted by score descending, then name.
std::vector<ScoredSpecies> score_species(const UserProfile& profile,
                                         std::span<const UserProfile> all_profiles,
                                         const SpeciesDB& db, const CriteriaSchema& schema);

std::vector<std::string> suggest_species(const UserProfile& profile,
                                         std::span<const UserProfile> all_profiles,
                                         const SpeciesDB& db, const CriteriaSchema& schema,
                                         std::size_t k);

struct ReferencedSpecies {
  std::string name;
  std::size_t count = 0;
  bool operator==(const ReferencedSpecies&) const = default;
};

/// Species by total why-asks across all profiles, ties by name.
std::vector<ReferencedSpecies> most_referenced_species(std::span<const UserProfile> all_profiles,
                                                       std::size_t k);

enum class SyncDirection { Pull, PushContributions };

std::string_view to_string(SyncDirection d);
SyncDirection sync_direction_from_string(std::string_view s);  // UsageError

struct SyncReport {
  SyncDirection direction = SyncDirection::Pull;
  std::vector<std::string> applied;
  std::vector<std::string> staged;
  std::vector<std::string> conflicted;
  bool operator==(const SyncReport&) const = default;
};

struct SyncOutcome {
  UserProfile profile;
  SpeciesDB central;
  SyncReport report;
};

/// Replaces the subset's name set. Every name must exist centrally
/// (ValidationError).
UserProfile set_local_subset(UserProfile profile, const std::set<std::string>& names,
                             const SpeciesDB& central);

/// Queues a record for the next push and updates the local copy.
UserProfile contribute_species(UserProfile profile, SpeciesRecord record,
                               const CriteriaSchema& schema);
UserProfile contribute_note(UserProfile profile, NoteEntry note);

/// Pull copies subset records from central, reporting names whose local
/// contribution conflicts with a newer central revision. Push stages pending
/// contributions into the central change log without applying them; it is
/// all-or-nothing and throws Conflict naming every species whose central
/// record changed since the local copy was taken.
SyncOutcome sync_local_subset(UserProfile profile, SpeciesDB central, SyncDirection direction,
                              const CriteriaSchema& schema, const ChangeContext& ctx);

/// One JSON file per user under a directory.
class ProfileStore {
 public:
  ProfileStore(std::filesystem::path dir, std::shared_ptr<const CriteriaSchema> schema);

  /// A fresh profile when the user has none yet.
  UserProfile load(const std::string& user_id) const;
  void save(const UserProfile& profile);
  std::vector<UserProfile> load_all() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path file_for(const std::string& user_id) const;

  std::filesystem::path dir_;
  std::shared_ptr<const CriteriaSchema> schema_;
  mutable std::mutex mu_;
};

bool valid_user_id(std::string_view user_id);

}  // namespace lexsys
