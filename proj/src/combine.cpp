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

#include "lexsys/combine.hpp"

#include <algorithm>
#include <iterator>

#include "lexsys/error.hpp"

namespace lexsys {

std::vector<std::string> combine_sets(CombineOp op,
                                      const std::vector<std::vector<std::string>>& operands) {
  if (op == CombineOp::Difference && operands.size() != 2) {
    throw Error(ErrorCode::ArityError, "difference takes exactly 2 operands, got " +
                                           std::to_string(operands.size()));
  }
  if (operands.size() < 2) {
    throw Error(ErrorCode::ArityError, std::string(to_string(op)) + " takes at least 2 operands");
  }
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  std::vector<std::string> acc = sorted(operands.front());
  for (std::size_t i = 1; i < operands.size(); ++i) {
    const auto rhs = sorted(operands[i]);
    std::vector<std::string> next;
    switch (op) {
      case CombineOp::Intersect:
        std::set_intersection(acc.begin(), acc.end(), rhs.begin(), rhs.end(),
                              std::back_inserter(next));
        break;
      case CombineOp::Union:
        std::set_union(acc.begin(), acc.end(), rhs.begin(), rhs.end(), std::back_inserter(next));
        break;
      case CombineOp::Difference:
        std::set_difference(acc.begin(), acc.end(), rhs.begin(), rhs.end(),
                            std::back_inserter(next));
        break;
    }
    acc = std::move(next);
  }
  return acc;
}

SelectionResult combine(const CombineSpec& spec, SelectionStore& store, Instant now) {
  std::vector<std::vector<std::string>> sets;
  sets.reserve(spec.operands.size());
  for (const auto& id : spec.operands) sets.push_back(store.load(id).matched);

  SelectionResult result;
  result.query.combined = CombineProvenance{spec.op, spec.operands};
  result.matched = combine_sets(spec.op, sets);
  result.created_at = now;
  result.id = store.save(result);
  return result;
}

SpeciesView view_of(const SpeciesRecord& record, const CriteriaSchema& schema,
                    const std::optional<std::string>& only_property) {
  SpeciesView view;
  view.name = record.name;
  view.provenance = record.provenance;
  for (const auto& ref : schema.properties()) {
    if (only_property && ref.qualified != *only_property) continue;
    const Property& prop = schema.property(ref);
    AttributeView attr;
    attr.property = ref.qualified;
    attr.kind = prop.kind;
    attr.value = record.value_or_missing(ref.qualified, prop.kind);
    attr.text = render_value(prop, attr.value);
    view.attributes.push_back(std::move(attr));
  }
  return view;
}

std::vector<SpeciesView> browse(const SpeciesDB& db, const CriteriaSchema& schema,
                                const BrowseFilter& filter) {
  if (filter.property) schema.resolve(*filter.property);
  std::vector<SpeciesView> out;
  for (const auto& [name, record] : db.species) {
    if (filter.prefix && !name.starts_with(*filter.prefix)) continue;
    out.push_back(view_of(record, schema, filter.property));
  }
  return out;
}

}  // namespace lexsys
