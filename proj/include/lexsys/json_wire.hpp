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

// JSON shapes shared by the store files, the HTTP API and `--json` CLI
// output. Options always travel as labels; indices never leave the process.
//
//   ordinal value      {"lo": "601-900" | null, "hi": "1201-1500" | null}
//   categorical value  ["Sandy", "Loamy"]
//   criterion          {"property": P, "window": {"lo": L, "hi": H}}
//                      {"property": P, "members": [L, ...]}
//                      {"property": P, "wildcard": L}
//
// The *_from_json functions throw ValidationError on shape or label errors.

#pragma once

#include <json.hpp>

#include "lexsys/agent.hpp"
#include "lexsys/combine.hpp"
#include "lexsys/error.hpp"
#include "lexsys/explain.hpp"
#include "lexsys/knowledgebase.hpp"
#include "lexsys/schema.hpp"
#include "lexsys/selection.hpp"

namespace lexsys {

using Json = nlohmann::ordered_json;

Json schema_to_json(const CriteriaSchema& schema);

Json value_to_json(const Property& property, const AttributeValue& value);
AttributeValue value_from_json(const Property& property, const Json& j);

Json record_to_json(const SpeciesRecord& record, const CriteriaSchema& schema);
/// `name_override` wins over a "name" member (PUT /species/{name}).
SpeciesRecord record_from_json(const Json& j, const CriteriaSchema& schema,
                               const std::optional<std::string>& name_override = std::nullopt);

Json view_to_json(const SpeciesView& view, const CriteriaSchema& schema);

Json request_to_json(const CriterionRequest& request, const CriteriaSchema& schema);
CriterionRequest request_from_json(const Json& j, const CriteriaSchema& schema);

Json query_to_json(const SelectionQuery& query, const CriteriaSchema& schema);
SelectionQuery query_from_json(const Json& j, const CriteriaSchema& schema);

Json result_to_json(const SelectionResult& result, const CriteriaSchema& schema);
SelectionResult result_from_json(const Json& j, const CriteriaSchema& schema);
Json meta_to_json(const SelectionMeta& meta);

Json explanation_to_json(const Explanation& e);
Json hint_to_json(const RelaxationHint& hint, const CriteriaSchema& schema);

Json reference_to_json(const ReferenceEntry& entry);
ReferenceEntry reference_from_json(const Json& j);
Json note_to_json(const NoteEntry& note);
NoteEntry note_from_json(const Json& j);  // timestamp optional
Json change_to_json(const ChangeEntry& change);

Json event_to_json(const SessionEvent& event, const CriteriaSchema& schema);
SessionEvent event_from_json(const Json& j, const CriteriaSchema& schema);
Json profile_to_json(const UserProfile& profile, const CriteriaSchema& schema);
UserProfile profile_from_json(const Json& j, const CriteriaSchema& schema);
Json sync_report_to_json(const SyncReport& report);

Json error_to_json(const Error& error);

}  // namespace lexsys
