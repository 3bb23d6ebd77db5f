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

// Why-not explanations for a species left out of a selection.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lexsys/knowledgebase.hpp"
#include "lexsys/schema.hpp"
#include "lexsys/selection.hpp"

namespace lexsys {

struct CriterionFailure {
  std::string criterion;  // "Group.Property"
  std::string message;    // "Not adapted to Group.Property"
  std::string species_value;
  std::string requested;

  bool operator==(const CriterionFailure&) const = default;
};

struct Explanation {
  std::string species;
  std::string query_id;  // empty for inline queries
  std::vector<CriterionFailure> failures;  // query order

  bool operator==(const Explanation&) const = default;
};

/// Every failing criterion of the selection's query, in query order.
/// Throws NotFound for an unknown species and ValidationError for a combined
/// selection, which has no criteria to explain.
Explanation why(const std::string& species_name, const SelectionResult& selection,
                const SpeciesDB& db, const CriteriaSchema& schema);

Explanation why_inline(const std::string& species_name, const SelectionQuery& query,
                       const SpeciesDB& db, const CriteriaSchema& schema);

/// Dropping one failing criterion. When the criterion can instead be widened
/// so that this species passes it, `widened` holds the smallest such request.
struct RelaxationHint {
  std::string criterion;
  std::size_t position = 0;        // index in the query's criteria
  std::size_t resulting_size = 0;  // matched count with the criterion dropped
  bool includes_species = false;   // species matches once it is dropped
  std::optional<CriterionRequest> widened;
  std::optional<std::size_t> widened_size;

  bool operator==(const RelaxationHint&) const = default;
};

/// Up to k hints, one per failing criterion, sorted by resulting_size
/// descending, ties by query position. Throws NothingToRelax when the species
/// already matches.
std::vector<RelaxationHint> why_suggestions(const std::string& species_name,
                                            const SelectionResult& selection,
                                            const SpeciesDB& db, const CriteriaSchema& schema,
                                            std::size_t k);

}  // namespace lexsys
