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

#include "lexsys/explain.hpp"

#include <algorithm>

#include "lexsys/error.hpp"

namespace lexsys {

Explanation why_inline(const std::string& species_name, const SelectionQuery& query,
                       const SpeciesDB& db, const CriteriaSchema& schema) {
  const SpeciesRecord& species = db.get(species_name);
  validate_query(query, schema);
  Explanation out;
  out.species = species_name;
  for (const auto& c : query.criteria) {
    const PropertyRef& ref = *schema.find(c.property);
    const Property& prop = schema.property(ref);
    const auto outcome = match_one(species, c, prop, schema.group(ref).polarity);
    if (outcome.pass) continue;
    out.failures.push_back(CriterionFailure{
        c.property, outcome.reason,
        render_value(prop, species.value_or_missing(c.property, prop.kind)),
        render_request(prop, c.requested)});
  }
  return out;
}

Explanation why(const std::string& species_name, const SelectionResult& selection,
                const SpeciesDB& db, const CriteriaSchema& schema) {
  if (selection.query.combined) {
    throw Error(ErrorCode::ValidationError,
                "selection '" + selection.id + "' is a " +
                    std::string(to_string(selection.query.combined->op)) +
                    " of other selections and has no criteria; ask why on an operand");
  }
  Explanation out = why_inline(species_name, selection.query, db, schema);
  out.query_id = selection.id;
  return out;
}

namespace {

// Smallest change to one failing request that lets `species` pass it.
std::optional<Requested> widen(const SpeciesRecord& species, const CriterionRequest& request,
                               const Property& prop, Polarity polarity) {
  const AttributeValue value = species.value_or_missing(request.property, prop.kind);
  if (polarity == Polarity::Negative) {
    // Only a categorical avoid-list can be loosened: stop avoiding what the species carries.
    const auto* choice = std::get_if<CategoryChoice>(&request.requested);
    const auto* set = std::get_if<CategorySet>(&value);
    if (!choice || !set) return std::nullopt;
    CategoryChoice kept;
    for (auto m : choice->members) {
      if (!set->members.contains(m)) kept.members.insert(m);
    }
    if (kept.members.empty()) return std::nullopt;
    return kept;
  }
  if (const auto* window = std::get_if<OrdinalWindow>(&request.requested)) {
    const auto& range = std::get<OrdinalRange>(value);
    if (!range.lo) return std::nullopt;
    OrdinalWindow wider = *window;
    if (*range.lo > wider.hi) wider.hi = *range.lo;
    if (range.hi && *range.hi < wider.lo) wider.lo = *range.hi;
    if (prop.is_wildcard(wider.lo) || prop.is_wildcard(wider.hi)) return std::nullopt;
    return wider;
  }
  if (const auto* choice = std::get_if<CategoryChoice>(&request.requested)) {
    const auto& set = std::get<CategorySet>(value);
    for (auto m : set.members) {
      if (prop.is_wildcard(m)) continue;
      CategoryChoice wider = *choice;
      wider.members.insert(m);
      return wider;
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<RelaxationHint> why_suggestions(const std::string& species_name,
                                            const SelectionResult& selection,
                                            const SpeciesDB& db, const CriteriaSchema& schema,
                                            std::size_t k) {
  const Explanation explanation = why(species_name, selection, db, schema);
  if (explanation.failures.empty()) {
    throw Error(ErrorCode::NothingToRelax,
                "species '" + species_name + "' already matches selection '" + selection.id + "'");
  }
  const SpeciesRecord& species = db.get(species_name);
  const auto& criteria = selection.query.criteria;

  std::vector<RelaxationHint> hints;
  for (const auto& failure : explanation.failures) {
    const auto it = std::find_if(criteria.begin(), criteria.end(),
                                 [&](const auto& c) { return c.property == failure.criterion; });
    const std::size_t pos = std::size_t(it - criteria.begin());

    SelectionQuery dropped;
    dropped.criteria = criteria;
    dropped.criteria.erase(dropped.criteria.begin() + std::ptrdiff_t(pos));

    RelaxationHint hint;
    hint.criterion = failure.criterion;
    hint.position = pos;
    hint.resulting_size = matching_species(dropped, db, schema).size();
    hint.includes_species = explanation.failures.size() == 1;

    const PropertyRef& ref = *schema.find(failure.criterion);
    if (auto wider = widen(species, *it, schema.property(ref), schema.group(ref).polarity)) {
      SelectionQuery widened = selection.query;
      widened.criteria[pos].requested = *wider;
      hint.widened = widened.criteria[pos];
      hint.widened_size = matching_species(widened, db, schema).size();
    }
    hints.push_back(std::move(hint));
  }
  std::stable_sort(hints.begin(), hints.end(), [](const auto& a, const auto& b) {
    if (a.resulting_size != b.resulting_size) return a.resulting_size > b.resulting_size;
    return a.position < b.position;
  });
  if (hints.size() > k) hints.resize(k);
  return hints;
}

}  // namespace lexsys
