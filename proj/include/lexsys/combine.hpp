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

#include <optional>
#include <string>
#include <vector>

#include "lexsys/knowledgebase.hpp"
#include "lexsys/schema.hpp"
#include "lexsys/selection.hpp"

namespace lexsys {

struct CombineSpec {
  std::vector<std::string> operands;
  CombineOp op = CombineOp::Intersect;
};

/// Left fold of `op` over sorted name lists. Throws ArityError: Difference
/// takes exactly two operands, the others at least two.
std::vector<std::string> combine_sets(CombineOp op,
                                      const std::vector<std::vector<std::string>>& operands);

/// Resolves the operands in the store, folds their matched sets and persists
/// the result. Operands are left untouched.
SelectionResult combine(const CombineSpec& spec, SelectionStore& store, Instant now);

struct AttributeView {
  std::string property;  // "Group.Property"
  PropertyKind kind = PropertyKind::Categorical;
  AttributeValue value;
  std::string text;  // labels only
};

struct SpeciesView {
  std::string name;
  std::optional<std::string> provenance;
  std::vector<AttributeView> attributes;  // schema order
};

struct BrowseFilter {
  std::optional<std::string> property;  // restrict views to this property
  std::optional<std::string> prefix;    // species-name prefix
};

/// Labelled views ordered by name. Throws NotFound for an unknown property.
std::vector<SpeciesView> browse(const SpeciesDB& db, const CriteriaSchema& schema,
                                const BrowseFilter& filter = {});

SpeciesView view_of(const SpeciesRecord& record, const CriteriaSchema& schema,
                    const std::optional<std::string>& only_property = std::nullopt);

}  // namespace lexsys
