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

#include "lexsys/json_wire.hpp"

namespace lexsys {

namespace {

[[noreturn]] void bad_shape(const std::string& what) {
  throw Error(ErrorCode::ValidationError, what);
}

const Json& member(const Json& j, const char* key) {
  if (!j.is_object()) bad_shape(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) bad_shape(std::string("missing member '") + key + "'");
  return *it;
}

std::string string_member(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_string()) bad_shape(std::string("member '") + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const Json& j, const char* key) {
  if (!j.is_object()) return std::nullopt;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) bad_shape(std::string("member '") + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<std::string> string_list(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_array()) bad_shape(std::string("member '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) bad_shape(std::string("member '") + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::size_t label_index(const Property& property, const Json& j) {
  if (!j.is_string()) bad_shape("option labels must be strings for '" + property.name + "'");
  const auto label = j.get<std::string>();
  auto i = property.index_of(label);
  if (!i) bad_shape("unknown option '" + label + "' for property '" + property.name + "'");
  return *i;
}

Json optional_label(const Property& property, const std::optional<std::size_t>& i) {
  return i ? Json(property.label(*i)) : Json(nullptr);
}

const PropertyRef& resolve_property(const CriteriaSchema& schema, const std::string& name) {
  if (const PropertyRef* ref = schema.find(name)) return *ref;
  std::string detail;
  for (const auto& s : schema.suggestions(name)) {
    detail += detail.empty() ? "did you mean: " : ", ";
    detail += s;
  }
  throw Error(ErrorCode::ValidationError, "unknown property '" + name + "'", detail);
}

Instant instant_member(const Json& j, const char* key) {
  try {
    return parse_instant(string_member(j, key));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError) throw;
    bad_shape(std::string("member '") + key + "': " + e.what());
  }
}

Json string_array(const auto& names) {
  Json out = Json::array();
  for (const auto& n : names) out.push_back(n);
  return out;
}

}  // namespace

Json schema_to_json(const CriteriaSchema& schema) {
  Json groups = Json::array();
  for (const auto& g : schema.groups()) {
    Json props = Json::array();
    for (const auto& p : g.properties) {
      Json options = Json::array();
      for (const auto& o : p.scale) options.push_back(o.label);
      Json wildcards = Json::array();
      for (auto i : p.wildcard_labels) wildcards.push_back(p.label(i));
      props.push_back({{"name", p.name},
                       {"qualified", g.name + "." + p.name},
                       {"kind", to_string(p.kind)},
                       {"options", std::move(options)},
                       {"wildcards", std::move(wildcards)}});
    }
    groups.push_back(
        {{"name", g.name}, {"polarity", to_string(g.polarity)}, {"properties", std::move(props)}});
  }
  return {{"version", schema.version()},
          {"wildcards", string_array(schema.wildcard_vocabulary())},
          {"property_count", schema.property_count()},
          {"groups", std::move(groups)}};
}

Json value_to_json(const Property& property, const AttributeValue& value) {
  if (const auto* r = std::get_if<OrdinalRange>(&value)) {
    return {{"lo", optional_label(property, r->lo)}, {"hi", optional_label(property, r->hi)}};
  }
  Json out = Json::array();
  for (auto m : std::get<CategorySet>(value).members) out.push_back(property.label(m));
  return out;
}

AttributeValue value_from_json(const Property& property, const Json& j) {
  if (j.is_string()) {
    try {
      return parse_value(property, j.get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorCode::ValidationError, e.what(), e.detail());
    }
  }
  if (property.kind == PropertyKind::Ordinal) {
    if (!j.is_object()) bad_shape("ordinal value for '" + property.name + "' must be {lo, hi}");
    OrdinalRange r;
    if (auto it = j.find("lo"); it != j.end() && !it->is_null()) r.lo = label_index(property, *it);
    if (auto it = j.find("hi"); it != j.end() && !it->is_null()) r.hi = label_index(property, *it);
    return r;
  }
  if (!j.is_array()) bad_shape("categorical value for '" + property.name + "' must be an array");
  CategorySet s;
  for (const auto& e : j) s.members.insert(label_index(property, e));
  return s;
}

Json record_to_json(const SpeciesRecord& record, const CriteriaSchema& schema) {
  Json attrs = Json::object();
  for (const auto& ref : schema.properties()) {
    auto it = record.attributes.find(ref.qualified);
    if (it == record.attributes.end()) continue;
    attrs[ref.qualified] = value_to_json(schema.property(ref), it->second);
  }
  return {{"name", record.name},
          {"provenance", record.provenance ? Json(*record.provenance) : Json(nullptr)},
          {"attributes", std::move(attrs)}};
}

SpeciesRecord record_from_json(const Json& j, const CriteriaSchema& schema,
                               const std::optional<std::string>& name_override) {
  if (!j.is_object()) bad_shape("species record must be an object");
  SpeciesRecord r;
  r.name = name_override ? *name_override : string_member(j, "name");
  r.provenance = optional_string(j, "provenance");
  if (auto it = j.find("attributes"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) bad_shape("member 'attributes' must be an object");
    for (const auto& [key, value] : it->items()) {
      const PropertyRef& ref = resolve_property(schema, key);
      const Property& prop = schema.property(ref);
      AttributeValue v = value_from_json(prop, value);
      r.attributes.emplace(ref.qualified, std::move(v));
    }
  }
  return r;
}

Json view_to_json(const SpeciesView& view, const CriteriaSchema& schema) {
  Json attrs = Json::array();
  for (const auto& a : view.attributes) {
    attrs.push_back({{"property", a.property},
                     {"kind", to_string(a.kind)},
                     {"value", value_to_json(schema.lookup_property(a.property), a.value)},
                     {"text", a.text}});
  }
  return {{"name", view.name},
          {"provenance", view.provenance ? Json(*view.provenance) : Json(nullptr)},
          {"attributes", std::move(attrs)}};
}

Json request_to_json(const CriterionRequest& request, const CriteriaSchema& schema) {
  const Property& prop = schema.lookup_property(request.property);
  Json out = {{"property", request.property}};
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, OrdinalWindow>) {
          out["window"] = {{"lo", prop.label(r.lo)}, {"hi", prop.label(r.hi)}};
        } else if constexpr (std::is_same_v<T, CategoryChoice>) {
          Json members = Json::array();
          for (auto m : r.members) members.push_back(prop.label(m));
          out["members"] = std::move(members);
        } else {
          out["wildcard"] = optional_label(prop, r.label);
        }
      },
      request.requested);
  return out;
}

CriterionRequest request_from_json(const Json& j, const CriteriaSchema& schema) {
  const std::string name = string_member(j, "property");
  const PropertyRef& ref = resolve_property(schema, name);
  const Property& prop = schema.property(ref);
  CriterionRequest out{ref.qualified, Wildcard{}};

  const int forms = int(j.contains("window")) + int(j.contains("members")) +
                    int(j.contains("wildcard")) + int(j.contains("value"));
  if (forms != 1) {
    bad_shape("criterion '" + name + "' needs exactly one of window, members, wildcard, value");
  }
  if (auto it = j.find("window"); it != j.end()) {
    out.requested = OrdinalWindow{label_index(prop, member(*it, "lo")),
                                  label_index(prop, member(*it, "hi"))};
  } else if (auto it = j.find("members"); it != j.end()) {
    if (!it->is_array()) bad_shape("member 'members' must be an array");
    CategoryChoice c;
    for (const auto& e : *it) c.members.insert(label_index(prop, e));
    out.requested = std::move(c);
  } else if (auto it = j.find("wildcard"); it != j.end()) {
    out.requested = it->is_null() ? Wildcard{} : Wildcard{label_index(prop, *it)};
  } else {
    const Json& v = j.at("value");
    if (!v.is_string()) bad_shape("member 'value' must be a string");
    out.requested = parse_request_value(prop, v.get<std::string>());
  }
  return out;
}

Json query_to_json(const SelectionQuery& query, const CriteriaSchema& schema) {
  Json criteria = Json::array();
  for (const auto& c : query.criteria) criteria.push_back(request_to_json(c, schema));
  Json out = {{"criteria", std::move(criteria)}};
  if (query.label) out["label"] = *query.label;
  if (query.combined) {
    out["combined"] = {{"op", to_string(query.combined->op)},
                       {"operands", string_array(query.combined->operands)}};
  }
  return out;
}

SelectionQuery query_from_json(const Json& j, const CriteriaSchema& schema) {
  if (!j.is_object()) bad_shape("query must be an object");
  SelectionQuery q;
  if (auto it = j.find("criteria"); it != j.end()) {
    if (!it->is_array()) bad_shape("member 'criteria' must be an array");
    for (const auto& c : *it) q.criteria.push_back(request_from_json(c, schema));
  }
  q.label = optional_string(j, "label");
  if (auto it = j.find("combined"); it != j.end() && !it->is_null()) {
    CombineProvenance p;
    try {
      p.op = combine_op_from_string(string_member(*it, "op"));
    } catch (const Error& e) {
      bad_shape(e.what());
    }
    p.operands = string_list(*it, "operands");
    q.combined = std::move(p);
  }
  return q;
}

Json result_to_json(const SelectionResult& result, const CriteriaSchema& schema) {
  return {{"id", result.id},
          {"created_at", format_instant(result.created_at)},
          {"query", query_to_json(result.query, schema)},
          {"matched_count", result.matched.size()},
          {"matched", string_array(result.matched)}};
}

SelectionResult result_from_json(const Json& j, const CriteriaSchema& schema) {
  SelectionResult r;
  r.id = string_member(j, "id");
  r.created_at = instant_member(j, "created_at");
  r.query = query_from_json(member(j, "query"), schema);
  r.matched = string_list(j, "matched");
  return r;
}

Json meta_to_json(const SelectionMeta& meta) {
  return {{"id", meta.id},
          {"label", meta.label ? Json(*meta.label) : Json(nullptr)},
          {"created_at", format_instant(meta.created_at)},
          {"matched_count", meta.matched_count},
          {"criteria_count", meta.criteria_count},
          {"combined", meta.combined ? Json(to_string(*meta.combined)) : Json(nullptr)}};
}

Json explanation_to_json(const Explanation& e) {
  Json failures = Json::array();
  for (const auto& f : e.failures) {
    failures.push_back({{"criterion", f.criterion},
                        {"message", f.message},
                        {"species_value", f.species_value},
                        {"requested", f.requested}});
  }
  return {{"species", e.species},
          {"selection", e.query_id.empty() ? Json(nullptr) : Json(e.query_id)},
          {"matches", e.failures.empty()},
          {"failures", std::move(failures)}};
}

Json hint_to_json(const RelaxationHint& hint, const CriteriaSchema& schema) {
  return {{"criterion", hint.criterion},
          {"position", hint.position},
          {"action", "drop"},
          {"resulting_size", hint.resulting_size},
          {"includes_species", hint.includes_species},
          {"widened", hint.widened ? request_to_json(*hint.widened, schema) : Json(nullptr)},
          {"widened_size", hint.widened_size ? Json(*hint.widened_size) : Json(nullptr)}};
}

Json reference_to_json(const ReferenceEntry& entry) {
  return {{"id", entry.id}, {"citation", entry.citation}, {"tags", string_array(entry.tags)}};
}

ReferenceEntry reference_from_json(const Json& j) {
  ReferenceEntry r;
  r.id = string_member(j, "id");
  r.citation = string_member(j, "citation");
  if (j.contains("tags")) {
    for (auto& t : string_list(j, "tags")) r.tags.insert(std::move(t));
  }
  return r;
}

Json note_to_json(const NoteEntry& note) {
  return {{"author", note.author},
          {"target", note.target},
          {"body", note.body},
          {"timestamp", format_instant(note.timestamp)}};
}

NoteEntry note_from_json(const Json& j) {
  NoteEntry n;
  n.author = optional_string(j, "author").value_or("");
  n.target = string_member(j, "target");
  n.body = string_member(j, "body");
  if (optional_string(j, "timestamp")) n.timestamp = instant_member(j, "timestamp");
  return n;
}

Json change_to_json(const ChangeEntry& change) {
  Json out = {{"seq", change.seq},
              {"timestamp", format_instant(change.timestamp)},
              {"author", change.author},
              {"action", to_string(change.action)},
              {"target", change.target},
              {"diff", change.diff}};
  if (!change.payload.empty()) out["payload"] = change.payload;
  return out;
}

Json event_to_json(const SessionEvent& event, const CriteriaSchema& schema) {
  Json out = {{"timestamp", format_instant(event.timestamp)}};
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, QueryIssued>) {
          out["type"] = "query_issued";
          out["query"] = query_to_json(e.query, schema);
        } else if constexpr (std::is_same_v<T, WhyAsked>) {
          out["type"] = "why_asked";
          out["species"] = e.species;
        } else if constexpr (std::is_same_v<T, SelectionSaved>) {
          out["type"] = "selection_saved";
          out["id"] = e.id;
          out["matched"] = string_array(e.matched);
        } else if constexpr (std::is_same_v<T, NoteAdded>) {
          out["type"] = "note_added";
          out["target"] = e.target;
        } else {
          out["type"] = "suggestion_accepted";
          out["what"] = e.what;
        }
      },
      event.kind);
  return out;
}

SessionEvent event_from_json(const Json& j, const CriteriaSchema& schema) {
  SessionEvent e;
  e.timestamp = instant_member(j, "timestamp");
  const std::string type = string_member(j, "type");
  if (type == "query_issued") {
    e.kind = QueryIssued{query_from_json(member(j, "query"), schema)};
  } else if (type == "why_asked") {
    e.kind = WhyAsked{string_member(j, "species")};
  } else if (type == "selection_saved") {
    e.kind = SelectionSaved{string_member(j, "id"), string_list(j, "matched")};
  } else if (type == "note_added") {
    e.kind = NoteAdded{string_member(j, "target")};
  } else if (type == "suggestion_accepted") {
    e.kind = SuggestionAccepted{string_member(j, "what")};
  } else {
    bad_shape("unknown event type '" + type + "'");
  }
  return e;
}

namespace {

Json subset_to_json(const LocalSubset& s, const CriteriaSchema& schema) {
  Json records = Json::array();
  for (const auto& [_, r] : s.records) records.push_back(record_to_json(r, schema));
  Json base = Json::object();
  for (const auto& [name, rev] : s.base_revision) base[name] = rev;
  Json pending = Json::array();
  for (const auto& r : s.pending_species) pending.push_back(record_to_json(r, schema));
  Json notes = Json::array();
  for (const auto& n : s.pending_notes) notes.push_back(note_to_json(n));
  return {{"names", string_array(s.names)},
          {"records", std::move(records)},
          {"base_revision", std::move(base)},
          {"pending_species", std::move(pending)},
          {"pending_notes", std::move(notes)}};
}

LocalSubset subset_from_json(const Json& j, const CriteriaSchema& schema) {
  LocalSubset s;
  for (auto& n : string_list(j, "names")) s.names.insert(std::move(n));
  for (const auto& r : member(j, "records")) {
    auto rec = record_from_json(r, schema);
    s.records.emplace(rec.name, std::move(rec));
  }
  const Json& base = member(j, "base_revision");
  if (!base.is_object()) bad_shape("member 'base_revision' must be an object");
  for (const auto& [name, rev] : base.items()) {
    if (!rev.is_number_unsigned()) bad_shape("base revision of '" + name + "' must be unsigned");
    s.base_revision[name] = rev.get<std::uint64_t>();
  }
  for (const auto& r : member(j, "pending_species")) {
    s.pending_species.push_back(record_from_json(r, schema));
  }
  for (const auto& n : member(j, "pending_notes")) s.pending_notes.push_back(note_from_json(n));
  return s;
}

}  // namespace

Json profile_to_json(const UserProfile& profile, const CriteriaSchema& schema) {
  // Counters are written for readers of the file; loading refolds the log.
  Json criteria = Json::object();
  for (const auto& [k, n] : profile.criterion_counts) criteria[k] = n;
  Json why = Json::object();
  for (const auto& [k, n] : profile.species_why_counts) why[k] = n;
  Json selected = Json::object();
  for (const auto& [k, n] : profile.species_selected_counts) selected[k] = n;
  Json sessions = Json::array();
  for (const auto& e : profile.sessions) sessions.push_back(event_to_json(e, schema));
  return {{"user_id", profile.user_id},
          {"criterion_counts", std::move(criteria)},
          {"species_why_counts", std::move(why)},
          {"species_selected_counts", std::move(selected)},
          {"sessions", std::move(sessions)},
          {"local_subset",
           profile.local_subset ? subset_to_json(*profile.local_subset, schema) : Json(nullptr)}};
}

UserProfile profile_from_json(const Json& j, const CriteriaSchema& schema) {
  const std::string user_id = string_member(j, "user_id");
  std::vector<SessionEvent> events;
  const Json& sessions = member(j, "sessions");
  if (!sessions.is_array()) bad_shape("member 'sessions' must be an array");
  for (const auto& e : sessions) events.push_back(event_from_json(e, schema));
  UserProfile p = fold_events(user_id, events);
  if (auto it = j.find("local_subset"); it != j.end() && !it->is_null()) {
    p.local_subset = subset_from_json(*it, schema);
  }
  return p;
}

Json sync_report_to_json(const SyncReport& report) {
  return {{"direction", to_string(report.direction)},
          {"applied", string_array(report.applied)},
          {"staged", string_array(report.staged)},
          {"conflicted", string_array(report.conflicted)}};
}

Json error_to_json(const Error& error) {
  Json out = {{"code", to_string(error.code())},
              {"message", error.what()},
              {"detail", error.detail().empty() ? Json(nullptr) : Json(error.detail())}};
  if (const auto* s = dynamic_cast<const SyntaxError*>(&error)) {
    out["line"] = s->line();
    out["column"] = s->column();
    out["token"] = s->token();
  }
  return out;
}

}  // namespace lexsys
