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

#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lexsys/knowledgebase.hpp"
#include "lexsys/schema.hpp"
#include "lexsys/time.hpp"

namespace lexsys {

/// Requested closed window [lo, hi] of option indices on an ordinal scale.
struct OrdinalWindow {
  std::size_t lo = 0;
  std::size_t hi = 0;

  bool operator==(const OrdinalWindow&) const = default;
};

struct CategoryChoice {
  std::set<std::size_t> members;

  bool operator==(const CategoryChoice&) const = default;
};

/// Trivially satisfied criterion. `label` is the wildcard label the user
/// picked; it is empty only for system-generated suggestions on properties
/// that have no wildcard label.
struct Wildcard {
  std::optional<std::size_t> label;

  bool operator==(const Wildcard&) const = default;
};

using Requested = std::variant<OrdinalWindow, CategoryChoice, Wildcard>;

struct CriterionRequest {
  std::string property;  // "Group.Property"
  Requested requested;

  bool operator==(const CriterionRequest&) const = default;
};

enum class CombineOp { Intersect, Union, Difference };

std::string_view to_string(CombineOp op);
CombineOp combine_op_from_string(std::string_view s);  // UsageError

/// Set-algebra provenance recorded on combined selections in place of criteria.
struct CombineProvenance {
  CombineOp op = CombineOp::Intersect;
  std::vector<std::string> operands;

  bool operator==(const CombineProvenance&) const = default;
};

struct SelectionQuery {
  std::vector<CriterionRequest> criteria;
  std::optional<std::string> label;
  std::optional<CombineProvenance> combined;

  bool operator==(const SelectionQuery&) const = default;
};

struct SelectionResult {
  std::string id;
  SelectionQuery query;
  std::vector<std::string> matched;  // ascending by name
  Instant created_at{};

  bool operator==(const SelectionResult&) const = default;
};

struct MatchOutcome {
  bool pass = true;
  std::string reason;  // set on failure

  static MatchOutcome Pass() { return {}; }
  static MatchOutcome Fail(std::string reason) { return {false, std::move(reason)}; }
};

/// "Not adapted to <Group.Property>"
std::string not_adapted_message(std::string_view qualified_property);

/// Interval and set test for one species against one criterion.
///
/// Ordinal: with the species interval [q, r] and the request window [v, u],
/// pass when q is present, q <= u, and either r is missing or r >= v.
/// A missing lower bound always fails; a missing upper bound never blocks.
/// Categorical: pass when the species set meets the request set.
/// A wildcard pick passes outright. Negative polarity inverts every
/// non-wildcard outcome. Throws KindMismatch when the request form does not
/// fit the property kind.
MatchOutcome match_one(const SpeciesRecord& species, const CriterionRequest& request,
                       const Property& property, Polarity polarity);

/// Throws ValidationError (unknown property, duplicate property, bad index,
/// wildcard misuse) or KindMismatch.
void validate_query(const SelectionQuery& query, const CriteriaSchema& schema);

/// The conjunctive filter alone: names of every species passing all criteria.
std::vector<std::string> matching_species(const SelectionQuery& query, const SpeciesDB& db,
                                          const CriteriaSchema& schema);

/// Human-readable request text using option labels.
std::string render_request(const Property& property, const Requested& requested);

// Text grammar for one request value, shared by the CLI and criteria files:
//   lo..hi        ordinal window (single label means [label, label])
//   a|b|c         categorical choice
//   <wildcard>    a wildcard label on its own
Requested parse_request_value(const Property& property, std::string_view text);
/// "Group.Property=value"
CriterionRequest parse_criterion(const CriteriaSchema& schema, std::string_view text);
/// Brace document: {Select}{Group}{Property(value)}...{/Select}, where each
/// value follows parse_request_value with '|' separating labels.
SelectionQuery parse_criteria_document(const CriteriaSchema& schema, std::string_view text);

struct SelectionMeta {
  std::string id;
  std::optional<std::string> label;
  Instant created_at{};
  std::size_t matched_count = 0;
  std::size_t criteria_count = 0;
  std::optional<CombineOp> combined;
};

/// One JSON file per selection under a directory. Safe for concurrent use;
/// writes are serialized.
class SelectionStore {
 public:
  SelectionStore(std::filesystem::path dir, std::shared_ptr<const CriteriaSchema> schema);

  /// Assigns a fresh id when result.id is empty. Returns the id.
  std::string save(SelectionResult result);
  SelectionResult load(std::string_view id) const;  // NotFound
  bool contains(std::string_view id) const;
  /// Newest first; ties broken by id descending.
  std::vector<SelectionMeta> list() const;

  const std::filesystem::path& dir() const { return dir_; }
  const CriteriaSchema& schema() const { return *schema_; }

 private:
  std::filesystem::path file_for(std::string_view id) const;

  std::filesystem::path dir_;
  std::shared_ptr<const CriteriaSchema> schema_;
  mutable std::mutex mu_;
  std::uint64_t next_ = 1;
};

/// Filter, stamp, persist. Throws ValidationError / StoreError.
SelectionResult evaluate(const SelectionQuery& query, const SpeciesDB& db,
                         const CriteriaSchema& schema, SelectionStore& store, Instant now);

std::string save_selection(const SelectionResult& result, SelectionStore& store);
SelectionResult load_selection(std::string_view id, const SelectionStore& store);
std::vector<SelectionMeta> list_selections(const SelectionStore& store);

bool valid_store_id(std::string_view id);

}  // namespace lexsys
