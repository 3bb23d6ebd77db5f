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

#include "lexsys/selection.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "brace_lexer.hpp"
#include "lexsys/error.hpp"
#include "lexsys/json_wire.hpp"
#include "text_util.hpp"

namespace lexsys {

std::string_view to_string(CombineOp op) {
  switch (op) {
    case CombineOp::Intersect: return "intersect";
    case CombineOp::Union: return "union";
    case CombineOp::Difference: return "difference";
  }
  return "intersect";
}

CombineOp combine_op_from_string(std::string_view s) {
  if (s == "intersect") return CombineOp::Intersect;
  if (s == "union") return CombineOp::Union;
  if (s == "difference") return CombineOp::Difference;
  throw Error(ErrorCode::UsageError,
              "unknown combine op '" + std::string(s) + "' (intersect, union, difference)");
}

std::string not_adapted_message(std::string_view qualified_property) {
  return "Not adapted to " + std::string(qualified_property);
}

namespace {

[[noreturn]] void kind_mismatch(const CriterionRequest& request, const Property& property) {
  throw Error(ErrorCode::KindMismatch, "request form does not fit " +
                                           std::string(to_string(property.kind)) +
                                           " property '" + request.property + "'");
}

bool base_test(const SpeciesRecord& species, const CriterionRequest& request,
               const Property& property) {
  const AttributeValue value = species.value_or_missing(request.property, property.kind);
  if (property.kind == PropertyKind::Ordinal) {
    const auto* window = std::get_if<OrdinalWindow>(&request.requested);
    const auto* range = std::get_if<OrdinalRange>(&value);
    if (!window || !range) kind_mismatch(request, property);
    // q = species lower, r = species upper, v = request lower, u = request upper
    const bool lower_ok = range->lo.has_value() && *range->lo <= window->hi;
    const bool upper_ok = !range->hi.has_value() || *range->hi >= window->lo;
    return lower_ok && upper_ok;
  }
  const auto* choice = std::get_if<CategoryChoice>(&request.requested);
  const auto* set = std::get_if<CategorySet>(&value);
  if (!choice || !set) kind_mismatch(request, property);
  for (auto m : choice->members) {
    if (set->members.contains(m)) return true;
  }
  return false;
}

}  // namespace

MatchOutcome match_one(const SpeciesRecord& species, const CriterionRequest& request,
                       const Property& property, Polarity polarity) {
  if (std::holds_alternative<Wildcard>(request.requested)) return MatchOutcome::Pass();
  bool pass = base_test(species, request, property);
  if (polarity == Polarity::Negative) pass = !pass;
  if (pass) return MatchOutcome::Pass();
  return MatchOutcome::Fail(not_adapted_message(request.property));
}

void validate_query(const SelectionQuery& query, const CriteriaSchema& schema) {
  std::set<std::string_view> seen;
  for (const auto& c : query.criteria) {
    const PropertyRef* ref = schema.find(c.property);
    if (!ref) {
      std::string detail;
      for (const auto& s : schema.suggestions(c.property)) {
        detail += detail.empty() ? "did you mean: " : ", ";
        detail += s;
      }
      throw Error(ErrorCode::ValidationError, "unknown property '" + c.property + "'", detail);
    }
    if (!seen.insert(c.property).second) {
      throw Error(ErrorCode::ValidationError, "property '" + c.property + "' appears twice");
    }
    const Property& prop = schema.property(*ref);
    auto bad = [&](const std::string& what) {
      throw Error(ErrorCode::ValidationError, c.property + ": " + what);
    };
    std::visit(
        [&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, OrdinalWindow>) {
            if (prop.kind != PropertyKind::Ordinal) kind_mismatch(c, prop);
            if (r.lo > r.hi) bad("window lo > hi");
            if (r.hi >= prop.size()) bad("option index out of range");
            if (prop.is_wildcard(r.lo) || prop.is_wildcard(r.hi)) {
              bad("a wildcard label cannot bound a window");
            }
          } else if constexpr (std::is_same_v<T, CategoryChoice>) {
            if (prop.kind != PropertyKind::Categorical) kind_mismatch(c, prop);
            if (r.members.empty()) bad("empty category choice");
            if (*r.members.rbegin() >= prop.size()) bad("option index out of range");
            for (auto m : r.members) {
              if (prop.is_wildcard(m)) bad("a wildcard label cannot be combined with others");
            }
          } else {
            if (r.label && (*r.label >= prop.size() || !prop.is_wildcard(*r.label))) {
              bad("not a wildcard label");
            }
          }
        },
        c.requested);
  }
}

std::vector<std::string> matching_species(const SelectionQuery& query, const SpeciesDB& db,
                                          const CriteriaSchema& schema) {
  validate_query(query, schema);
  struct Bound {
    const CriterionRequest* request;
    const Property* property;
    Polarity polarity;
  };
  std::vector<Bound> bound;
  bound.reserve(query.criteria.size());
  for (const auto& c : query.criteria) {
    const PropertyRef& ref = *schema.find(c.property);
    bound.push_back({&c, &schema.property(ref), schema.group(ref).polarity});
  }
  std::vector<std::string> out;
  for (const auto& [name, record] : db.species) {
    const bool all = std::all_of(bound.begin(), bound.end(), [&](const Bound& b) {
      return match_one(record, *b.request, *b.property, b.polarity).pass;
    });
    if (all) out.push_back(name);
  }
  return out;
}

std::string render_request(const Property& property, const Requested& requested) {
  return std::visit(
      [&](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, OrdinalWindow>) {
          if (r.lo == r.hi) return property.label(r.lo);
          return property.label(r.lo) + ".." + property.label(r.hi);
        } else if constexpr (std::is_same_v<T, CategoryChoice>) {
          std::string out;
          for (auto m : r.members) {
            if (!out.empty()) out += " | ";
            out += property.label(m);
          }
          return out;
        } else {
          return r.label ? property.label(*r.label) : std::string("(any)");
        }
      },
      requested);
}

Requested parse_request_value(const Property& property, std::string_view text) {
  text = detail::trim(text);
  auto unknown = [&](std::string_view label) {
    return Error(ErrorCode::ValidationError, "unknown option '" + std::string(label) +
                                                 "' for property '" + property.name + "'");
  };
  if (text.empty()) {
    throw Error(ErrorCode::ValidationError, "empty value for property '" + property.name + "'");
  }
  if (auto i = property.index_of(text); i && property.is_wildcard(*i)) return Wildcard{*i};

  if (property.kind == PropertyKind::Ordinal) {
    if (text.find('|') != std::string_view::npos) {
      throw Error(ErrorCode::KindMismatch,
                  "ordinal property '" + property.name + "' takes lo..hi, not a set");
    }
    const auto sep = text.find("..");
    if (sep == std::string_view::npos) {
      const auto i = property.index_of(text);
      if (!i) throw unknown(text);
      return OrdinalWindow{*i, *i};
    }
    const auto lo_text = detail::trim(text.substr(0, sep));
    const auto hi_text = detail::trim(text.substr(sep + 2));
    const auto lo = property.index_of(lo_text);
    const auto hi = property.index_of(hi_text);
    if (!lo) throw unknown(lo_text);
    if (!hi) throw unknown(hi_text);
    return OrdinalWindow{*lo, *hi};
  }

  CategoryChoice choice;
  for (auto part : split(text, '|')) {
    part = detail::trim(part);
    const auto i = property.index_of(part);
    if (!i) {
      if (text.find("..") != std::string_view::npos) {
        throw Error(ErrorCode::KindMismatch,
                    "categorical property '" + property.name + "' takes a|b, not a range");
      }
      throw unknown(part);
    }
    choice.members.insert(*i);
  }
  return choice;
}

CriterionRequest parse_criterion(const CriteriaSchema& schema, std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorCode::ValidationError,
                "criterion '" + std::string(text) + "' is not of the form Group.Property=value");
  }
  const std::string key(detail::trim(text.substr(0, eq)));
  const PropertyRef* ref = schema.find(key);
  if (!ref) {
    std::string detail;
    for (const auto& s : schema.suggestions(key)) {
      detail += detail.empty() ? "did you mean: " : ", ";
      detail += s;
    }
    throw Error(ErrorCode::ValidationError, "unknown property '" + key + "'", detail);
  }
  return CriterionRequest{key, parse_request_value(schema.property(*ref), text.substr(eq + 1))};
}

SelectionQuery parse_criteria_document(const CriteriaSchema& schema, std::string_view text) {
  const std::string cleaned = detail::strip_comments(text);
  const auto tokens = detail::tokenize(cleaned);
  if (tokens.empty() || detail::trim(tokens.front().content) != "Select") {
    throw SyntaxError("expected {Select}", tokens.empty() ? 1 : tokens.front().line,
                      tokens.empty() ? 1 : tokens.front().column,
                      tokens.empty() ? "" : tokens.front().content);
  }
  SelectionQuery query;
  std::optional<std::string> group;
  bool closed = false;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto& tok = tokens[i];
    const auto body = detail::trim(tok.content);
    if (body == "/Select") {
      if (i + 1 != tokens.size()) detail::fail_at(tokens[i + 1], "unexpected token after {/Select}");
      closed = true;
      break;
    }
    if (auto list = detail::split_list_token(tok)) {
      if (!group) detail::fail_at(tok, "criterion before any group");
      std::string joined;
      for (const auto& item : list->items) {
        if (!joined.empty()) joined += '|';
        joined += item;
      }
      query.criteria.push_back(parse_criterion(schema, *group + "." + list->name + "=" + joined));
      continue;
    }
    group = std::string(body);
  }
  if (!closed) {
    const auto& last = tokens.back();
    detail::fail_at(last, "missing {/Select}");
  }
  validate_query(query, schema);
  return query;
}

// ---------------------------------------------------------------------------
// Store

namespace {

constexpr std::string_view kIdPrefix = "sel-";

std::optional<std::uint64_t> id_sequence(std::string_view id) {
  if (!id.starts_with(kIdPrefix)) return std::nullopt;
  std::uint64_t n = 0;
  const auto digits = id.substr(kIdPrefix.size());
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  return n;
}

std::string make_id(std::uint64_t seq) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sel-%08llu", static_cast<unsigned long long>(seq));
  return buf;
}

}  // namespace

bool valid_store_id(std::string_view id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '-' || c == '_' || c == '.';
  });
}

SelectionStore::SelectionStore(std::filesystem::path dir,
                               std::shared_ptr<const CriteriaSchema> schema)
    : dir_(std::move(dir)), schema_(std::move(schema)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::StoreError, "cannot create '" + dir_.string() + "': " + ec.message());
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.path().extension() != ".json") continue;
    if (auto n = id_sequence(entry.path().stem().string())) next_ = std::max(next_, *n + 1);
  }
}

std::filesystem::path SelectionStore::file_for(std::string_view id) const {
  return dir_ / (std::string(id) + ".json");
}

std::string SelectionStore::save(SelectionResult result) {
  std::lock_guard lock(mu_);
  if (result.id.empty()) {
    result.id = make_id(next_++);
  } else {
    if (!valid_store_id(result.id)) {
      throw Error(ErrorCode::StoreError, "invalid selection id '" + result.id + "'");
    }
    if (auto n = id_sequence(result.id)) next_ = std::max(next_, *n + 1);
  }
  try {
    write_file_atomic(file_for(result.id), result_to_json(result, *schema_).dump(2) + "\n");
  } catch (const Error& e) {
    throw Error(ErrorCode::StoreError, e.what());
  }
  return result.id;
}

bool SelectionStore::contains(std::string_view id) const {
  return valid_store_id(id) && std::filesystem::exists(file_for(id));
}

SelectionResult SelectionStore::load(std::string_view id) const {
  if (!contains(id)) {
    throw Error(ErrorCode::NotFound, "unknown selection '" + std::string(id) + "'");
  }
  try {
    return result_from_json(Json::parse(read_file(file_for(id))), *schema_);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::StoreError, "selection '" + std::string(id) + "': " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::StoreError, "selection '" + std::string(id) + "': " + e.what());
  }
}

std::vector<SelectionMeta> SelectionStore::list() const {
  std::vector<SelectionMeta> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.path().extension() != ".json") continue;
    const auto result = load(entry.path().stem().string());
    SelectionMeta meta;
    meta.id = result.id;
    meta.label = result.query.label;
    meta.created_at = result.created_at;
    meta.matched_count = result.matched.size();
    meta.criteria_count = result.query.criteria.size();
    if (result.query.combined) meta.combined = result.query.combined->op;
    out.push_back(std::move(meta));
  }
  std::sort(out.begin(), out.end(), [](const SelectionMeta& a, const SelectionMeta& b) {
    if (a.created_at != b.created_at) return a.created_at > b.created_at;
    return a.id > b.id;
  });
  return out;
}

SelectionResult evaluate(const SelectionQuery& query, const SpeciesDB& db,
                         const CriteriaSchema& schema, SelectionStore& store, Instant now) {
  SelectionResult result;
  result.query = query;
  result.matched = matching_species(query, db, schema);
  result.created_at = now;
  result.id = store.save(result);
  return result;
}

std::string save_selection(const SelectionResult& result, SelectionStore& store) {
  return store.save(result);
}

SelectionResult load_selection(std::string_view id, const SelectionStore& store) {
  return store.load(id);
}

std::vector<SelectionMeta> list_selections(const SelectionStore& store) { return store.list(); }

}  // namespace lexsys
