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

#include "lexsys/service.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <random>

#include "lexsys/error.hpp"

namespace lexsys {

std::filesystem::path WorkspacePaths::db_path() const { return db ? *db : root / "species.db"; }
std::filesystem::path WorkspacePaths::selections_dir() const {
  return selections ? *selections : root / "selections";
}
std::filesystem::path WorkspacePaths::profiles_dir() const {
  return profiles ? *profiles : root / "profiles";
}

namespace {

std::shared_ptr<const CriteriaSchema> load_schema(const WorkspacePaths& paths) {
  if (!paths.schema) return std::make_shared<const CriteriaSchema>(default_schema());
  return std::make_shared<const CriteriaSchema>(parse_schema(read_file(*paths.schema)));
}

std::shared_ptr<const SpeciesDB> load_or_empty(const std::filesystem::path& path,
                                               const CriteriaSchema& schema) {
  if (!std::filesystem::exists(path)) return std::make_shared<const SpeciesDB>(empty_db(schema));
  return std::make_shared<const SpeciesDB>(load_db(path, schema));
}

}  // namespace

Workspace::Workspace(WorkspacePaths paths, Clock clock)
    : paths_(std::move(paths)),
      clock_(std::move(clock)),
      schema_(load_schema(paths_)),
      db_(load_or_empty(paths_.db_path(), *schema_)),
      selections_(paths_.selections_dir(), schema_),
      profiles_(paths_.profiles_dir(), schema_) {}

std::shared_ptr<const SpeciesDB> Workspace::snapshot() const {
  std::lock_guard lock(snapshot_mu_);
  return db_;
}

std::shared_ptr<const SpeciesDB> Workspace::mutate(
    const std::function<SpeciesDB(const SpeciesDB&)>& change) {
  std::lock_guard writer(writer_mu_);
  const auto current = snapshot();
  auto next = std::make_shared<const SpeciesDB>(change(*current));
  if (*next == *current) return current;
  const auto path = paths_.db_path();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  save_db(*next, *schema_, path);
  std::lock_guard lock(snapshot_mu_);
  db_ = next;
  return next;
}

UserProfile Workspace::update_profile(const std::string& user_id,
                                      const std::function<UserProfile(UserProfile)>& change) {
  std::lock_guard lock(profile_mu_);
  UserProfile updated = change(profiles_.load(user_id));
  profiles_.save(updated);
  return updated;
}

// ---------------------------------------------------------------------------
// Api

namespace {

Json reference_list(const std::vector<ReferenceEntry>& refs) {
  Json out = Json::array();
  for (const auto& r : refs) out.push_back(reference_to_json(r));
  return out;
}

}  // namespace

std::string Api::author(const std::optional<std::string>& user) const {
  return user ? *user : std::string("anonymous");
}

void Api::record(const std::optional<std::string>& user, std::vector<EventKind> events) {
  if (!user) return;
  const Instant at = ws_.now();
  ws_.update_profile(*user, [&](UserProfile p) {
    for (auto& e : events) p = record_event(std::move(p), SessionEvent{at, std::move(e)});
    return p;
  });
}

Json Api::schema() const { return schema_to_json(ws_.schema()); }

Json Api::list_species(const BrowseFilter& filter) const {
  const auto db = ws_.snapshot();
  Json species = Json::array();
  for (const auto& v : browse(*db, ws_.schema(), filter)) {
    species.push_back(view_to_json(v, ws_.schema()));
  }
  return {{"count", species.size()}, {"species", std::move(species)}};
}

Json Api::get_species(const std::string& name) const {
  const auto db = ws_.snapshot();
  Json out = view_to_json(view_of(db->get(name), ws_.schema()), ws_.schema());
  out["revision"] = db->revision_of(name);
  out["references"] = reference_list(lexsys::list_references(*db, name));
  Json notes = Json::array();
  for (const auto& n : db->notes) {
    if (n.target == name) notes.push_back(note_to_json(n));
  }
  out["notes"] = std::move(notes);
  return out;
}

Json Api::put_species(const std::string& name, const Json& body,
                      const std::optional<std::string>& user) {
  SpeciesRecord record = record_from_json(body, ws_.schema(), name);
  const ChangeContext ctx{author(user), ws_.now()};
  const auto db = ws_.mutate([&](const SpeciesDB& current) {
    return upsert_species(current, ws_.schema(), record, ctx);
  });
  return {{"record", record_to_json(db->get(name), ws_.schema())},
          {"revision", db->revision_of(name)},
          {"change", db->changelog.empty() ? Json(nullptr) : change_to_json(db->changelog.back())}};
}

Json Api::add_note(const Json& body, const std::optional<std::string>& user) {
  NoteEntry note = note_from_json(body);
  if (note.author.empty()) note.author = author(user);
  const Instant now = ws_.now();
  note.timestamp = now;
  ws_.mutate([&](const SpeciesDB& current) {
    return lexsys::add_note(current, ws_.schema(), note, ChangeContext{note.author, now});
  });
  record(user, {NoteAdded{note.target}});
  return note_to_json(note);
}

Json Api::list_references(const std::optional<std::string>& tag) const {
  const auto db = ws_.snapshot();
  return {{"references", reference_list(lexsys::list_references(*db, tag))}};
}

Json Api::add_reference(const Json& body, const std::optional<std::string>& user) {
  const ReferenceEntry entry = reference_from_json(body);
  const ChangeContext ctx{author(user), ws_.now()};
  ws_.mutate([&](const SpeciesDB& current) {
    return lexsys::add_reference(current, ws_.schema(), entry, ctx);
  });
  return reference_to_json(entry);
}

Json Api::select(const SelectionQuery& query, const std::optional<std::string>& user) {
  if (query.combined) {
    throw Error(ErrorCode::ValidationError, "a query cannot carry combine provenance; use combine");
  }
  const auto db = ws_.snapshot();
  const SelectionResult result = evaluate(query, *db, ws_.schema(), ws_.selections(), ws_.now());
  record(user, {QueryIssued{query}, SelectionSaved{result.id, result.matched}});
  return result_to_json(result, ws_.schema());
}

Json Api::list_selections() const {
  Json out = Json::array();
  for (const auto& m : lexsys::list_selections(ws_.selections())) out.push_back(meta_to_json(m));
  return {{"selections", std::move(out)}};
}

Json Api::get_selection(const std::string& id) const {
  return result_to_json(ws_.selections().load(id), ws_.schema());
}

Json Api::why(const std::string& id, const std::string& species, std::size_t hints,
              const std::optional<std::string>& user) {
  const auto db = ws_.snapshot();
  const SelectionResult selection = ws_.selections().load(id);
  const Explanation e = lexsys::why(species, selection, *db, ws_.schema());
  Json out = explanation_to_json(e);
  out["in_selection"] =
      std::binary_search(selection.matched.begin(), selection.matched.end(), species);
  Json hint_list = Json::array();
  if (!e.failures.empty() && hints > 0) {
    for (const auto& h : why_suggestions(species, selection, *db, ws_.schema(), hints)) {
      hint_list.push_back(hint_to_json(h, ws_.schema()));
    }
  }
  out["hints"] = std::move(hint_list);
  record(user, {WhyAsked{species}});
  return out;
}

Json Api::combine(const CombineSpec& spec, const std::optional<std::string>& user) {
  const SelectionResult result = lexsys::combine(spec, ws_.selections(), ws_.now());
  record(user, {SelectionSaved{result.id, result.matched}});
  return result_to_json(result, ws_.schema());
}

Json Api::suggest_criteria(const std::optional<std::string>& user, std::size_t k) const {
  const UserProfile profile = user ? ws_.profiles().load(*user) : new_profile("");
  Json out = Json::array();
  for (const auto& c : lexsys::suggest_criteria(profile, ws_.schema(), k)) {
    out.push_back(request_to_json(c, ws_.schema()));
  }
  return {{"user", user ? Json(*user) : Json(nullptr)}, {"criteria", std::move(out)}};
}

Json Api::suggest_species(const std::optional<std::string>& user, std::size_t k) const {
  const UserProfile profile = user ? ws_.profiles().load(*user) : new_profile("");
  const auto all = ws_.profiles().load_all();
  const auto db = ws_.snapshot();
  Json out = Json::array();
  auto scored = score_species(profile, all, *db, ws_.schema());
  if (scored.size() > k) scored.resize(k);
  for (const auto& s : scored) out.push_back({{"name", s.name}, {"score", s.score}});
  return {{"user", user ? Json(*user) : Json(nullptr)}, {"species", std::move(out)}};
}

Json Api::most_referenced(std::size_t k) const {
  Json out = Json::array();
  for (const auto& r : most_referenced_species(ws_.profiles().load_all(), k)) {
    out.push_back({{"name", r.name}, {"count", r.count}});
  }
  return {{"species", std::move(out)}};
}

Json Api::sync(const std::string& user, const Json& body) {
  if (!body.is_object()) throw Error(ErrorCode::ValidationError, "sync body must be an object");
  const auto dir_it = body.find("direction");
  if (dir_it == body.end() || !dir_it->is_string()) {
    throw Error(ErrorCode::ValidationError, "sync needs a 'direction' of pull or push");
  }
  const SyncDirection direction = sync_direction_from_string(dir_it->get<std::string>());
  std::optional<std::set<std::string>> names;
  if (auto it = body.find("names"); it != body.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorCode::ValidationError, "'names' must be an array");
    names.emplace();
    for (const auto& n : *it) {
      if (!n.is_string()) throw Error(ErrorCode::ValidationError, "'names' must hold strings");
      names->insert(n.get<std::string>());
    }
  }
  std::vector<SpeciesRecord> species;
  std::vector<NoteEntry> notes;
  if (auto it = body.find("contributions"); it != body.end() && !it->is_null()) {
    if (auto s = it->find("species"); s != it->end()) {
      for (const auto& r : *s) species.push_back(record_from_json(r, ws_.schema()));
    }
    if (auto n = it->find("notes"); n != it->end()) {
      for (const auto& j : *n) notes.push_back(note_from_json(j));
    }
  }

  const ChangeContext ctx{user, ws_.now()};
  SyncReport report;
  const UserProfile after = ws_.update_profile(user, [&](UserProfile p) {
    ws_.mutate([&](const SpeciesDB& central) {
      if (names) p = set_local_subset(std::move(p), *names, central);
      for (const auto& r : species) p = contribute_species(std::move(p), r, ws_.schema());
      for (auto n : notes) {
        if (n.author.empty()) n.author = user;
        n.timestamp = ctx.now;
        p = contribute_note(std::move(p), std::move(n));
      }
      SyncOutcome outcome = sync_local_subset(std::move(p), central, direction, ws_.schema(), ctx);
      p = std::move(outcome.profile);
      report = std::move(outcome.report);
      return outcome.central;
    });
    return p;
  });

  Json out = sync_report_to_json(report);
  Json subset = Json::array();
  if (after.local_subset) {
    for (const auto& n : after.local_subset->names) subset.push_back(n);
  }
  out["subset"] = std::move(subset);
  return out;
}

Json Api::export_tsv(const std::optional<std::string>& selection) const {
  const auto db = ws_.snapshot();
  std::vector<std::string> only;
  if (selection) {
    only = ws_.selections().load(*selection).matched;
    if (only.empty()) {
      return {{"format", "tsv"}, {"selection", *selection},
              {"content", lexsys::export_tsv(SpeciesDB{db->schema_version, {}, {}, {}, {}},
                                             ws_.schema())}};
    }
  }
  return {{"format", "tsv"},
          {"selection", selection ? Json(*selection) : Json(nullptr)},
          {"content", lexsys::export_tsv(*db, ws_.schema(), only)}};
}

Json Api::import_tsv(const Json& body, const std::optional<std::string>& user) {
  if (!body.is_object() || !body.contains("content") || !body["content"].is_string()) {
    throw Error(ErrorCode::ValidationError, "import body needs a string 'content'");
  }
  const auto records = lexsys::import_tsv(body["content"].get<std::string>(), ws_.schema());
  const ChangeContext ctx{author(user), ws_.now()};
  ws_.mutate([&](const SpeciesDB& current) {
    SpeciesDB db = current;
    for (const auto& r : records) db = upsert_species(std::move(db), ws_.schema(), r, ctx);
    return db;
  });
  Json names = Json::array();
  for (const auto& r : records) names.push_back(r.name);
  return {{"imported", std::move(names)}};
}

// ---------------------------------------------------------------------------
// Router

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Conflict:
    case ErrorCode::DuplicateId: return 409;
    case ErrorCode::StoreError:
    case ErrorCode::IoError:
    case ErrorCode::ConfigError:
    case ErrorCode::BindError: return 500;
    default: return 400;
  }
}

namespace {

std::vector<std::string> segments(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const std::size_t j = std::min(path.find('/', i), path.size());
    if (j > i) out.emplace_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<std::string> param(const HttpRequest& r, const char* key) {
  auto it = r.params.find(key);
  if (it == r.params.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

std::size_t count_param(const HttpRequest& r, const char* key, std::size_t fallback) {
  const auto text = param(r, key);
  if (!text) return fallback;
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
  if (ec != std::errc{} || ptr != text->data() + text->size()) {
    throw Error(ErrorCode::ValidationError,
                std::string("parameter '") + key + "' must be a non-negative integer");
  }
  return value;
}

Json parse_body(const HttpRequest& r) {
  if (r.body.empty()) return Json::object();
  try {
    return Json::parse(r.body);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::FormatError, "request body is not valid JSON", e.what());
  }
}

std::string new_token() {
  std::random_device rd;
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < 4; ++i) {
    std::uint32_t v = rd();
    for (int b = 0; b < 8; ++b) {
      out.push_back(hex[v & 0xf]);
      v >>= 4;
    }
  }
  return out;
}

CombineSpec combine_spec_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("op") || !j["op"].is_string()) {
    throw Error(ErrorCode::ValidationError, "combine needs a string 'op'");
  }
  CombineSpec spec;
  spec.op = combine_op_from_string(j["op"].get<std::string>());
  const auto it = j.find("operands");
  if (it == j.end() || !it->is_array()) {
    throw Error(ErrorCode::ValidationError, "combine needs an 'operands' array");
  }
  for (const auto& id : *it) {
    if (!id.is_string()) throw Error(ErrorCode::ValidationError, "operands must be ids");
    spec.operands.push_back(id.get<std::string>());
  }
  return spec;
}

}  // namespace

std::optional<Session> Router::session(const std::string& token) const {
  std::lock_guard lock(sessions_mu_);
  auto it = sessions_.find(token);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Router::user_of(const HttpRequest& request) const {
  auto it = request.headers.find("x-session-token");
  if (it == request.headers.end() || it->second.empty()) return std::nullopt;
  auto s = session(it->second);
  if (!s) throw Error(ErrorCode::NotFound, "unknown session token");
  return s->user_id;
}

void Router::set_active(const HttpRequest& request, const std::string& selection_id) {
  auto it = request.headers.find("x-session-token");
  if (it == request.headers.end()) return;
  std::lock_guard lock(sessions_mu_);
  if (auto s = sessions_.find(it->second); s != sessions_.end()) {
    s->second.active_selection = selection_id;
  }
}

HttpResponse Router::handle(const HttpRequest& request) {
  try {
    return route(request);
  } catch (const Error& e) {
    return {http_status(e.code()), error_to_json(e)};
  } catch (const Json::exception& e) {
    return {400, error_to_json(Error(ErrorCode::FormatError, "malformed JSON value", e.what()))};
  } catch (const std::exception& e) {
    return {500, Json{{"code", "InternalError"}, {"message", e.what()}, {"detail", nullptr}}};
  }
}

HttpResponse Router::route(const HttpRequest& r) {
  const auto seg = segments(r.path);
  const std::string& m = r.method;
  auto is = [&](std::initializer_list<const char*> parts) {
    if (seg.size() != parts.size()) return false;
    std::size_t i = 0;
    for (const char* p : parts) {
      if (p[0] != '*' && seg[i] != p) return false;
      ++i;
    }
    return true;
  };
  auto wrong_method = [&]() -> HttpResponse {
    throw Error(ErrorCode::UsageError, "method " + m + " not allowed on " + r.path);
  };

  if (is({"schema"})) {
    if (m != "GET") return wrong_method();
    return {200, api_.schema()};
  }
  if (is({"species"})) {
    if (m != "GET") return wrong_method();
    return {200, api_.list_species(BrowseFilter{param(r, "property"), param(r, "prefix")})};
  }
  if (is({"species", "most-referenced"}) && m == "GET") {
    return {200, api_.most_referenced(count_param(r, "k", 10))};
  }
  if (is({"species", "*"})) {
    if (m == "GET") return {200, api_.get_species(seg[1])};
    if (m == "PUT") return {200, api_.put_species(seg[1], parse_body(r), user_of(r))};
    return wrong_method();
  }
  if (is({"notes"})) {
    if (m != "POST") return wrong_method();
    return {201, api_.add_note(parse_body(r), user_of(r))};
  }
  if (is({"references"})) {
    if (m == "GET") return {200, api_.list_references(param(r, "tag"))};
    if (m == "POST") return {201, api_.add_reference(parse_body(r), user_of(r))};
    return wrong_method();
  }
  if (is({"select"})) {
    if (m != "POST") return wrong_method();
    const auto user = user_of(r);
    Json out = api_.select(query_from_json(parse_body(r), ws_.schema()), user);
    set_active(r, out["id"].get<std::string>());
    return {201, std::move(out)};
  }
  if (is({"selections"})) {
    if (m != "GET") return wrong_method();
    return {200, api_.list_selections()};
  }
  if (is({"selections", "*"})) {
    if (m != "GET") return wrong_method();
    return {200, api_.get_selection(seg[1])};
  }
  if (is({"selections", "*", "why", "*"})) {
    if (m != "GET") return wrong_method();
    return {200, api_.why(seg[1], seg[3], count_param(r, "hints", 3), user_of(r))};
  }
  if (is({"combine"})) {
    if (m != "POST") return wrong_method();
    const auto user = user_of(r);
    Json out = api_.combine(combine_spec_from_json(parse_body(r)), user);
    set_active(r, out["id"].get<std::string>());
    return {201, std::move(out)};
  }
  if (is({"suggest", "criteria"})) {
    if (m != "GET") return wrong_method();
    return {200, api_.suggest_criteria(user_of(r), count_param(r, "k", 3))};
  }
  if (is({"suggest", "species"})) {
    if (m != "GET") return wrong_method();
    return {200, api_.suggest_species(user_of(r), count_param(r, "k", 5))};
  }
  if (is({"sync"})) {
    if (m != "POST") return wrong_method();
    const auto user = user_of(r);
    if (!user) throw Error(ErrorCode::ValidationError, "sync needs a session (X-Session-Token)");
    return {200, api_.sync(*user, parse_body(r))};
  }
  if (is({"export"})) {
    if (m != "GET") return wrong_method();
    return {200, api_.export_tsv(param(r, "selection"))};
  }
  if (is({"import"})) {
    if (m != "POST") return wrong_method();
    return {200, api_.import_tsv(parse_body(r), user_of(r))};
  }
  if (is({"sessions"})) {
    if (m != "POST") return wrong_method();
    const Json body = parse_body(r);
    if (!body.contains("user_id") || !body["user_id"].is_string()) {
      throw Error(ErrorCode::ValidationError, "session needs a string 'user_id'");
    }
    Session s;
    s.user_id = body["user_id"].get<std::string>();
    if (!valid_user_id(s.user_id)) {
      throw Error(ErrorCode::ValidationError, "invalid user id '" + s.user_id + "'");
    }
    s.created_at = ws_.now();
    {
      std::lock_guard lock(sessions_mu_);
      do {
        s.token = new_token();
      } while (sessions_.contains(s.token));
      sessions_.emplace(s.token, s);
    }
    return {201, Json{{"token", s.token},
                      {"user_id", s.user_id},
                      {"created_at", format_instant(s.created_at)}}};
  }
  throw Error(ErrorCode::NotFound, "no route for " + m + " " + r.path);
}

// ---------------------------------------------------------------------------
// Configuration

void apply_bind(ServiceConfig& config, std::string_view bind) {
  if (bind.empty()) return;
  const auto colon = bind.rfind(':');
  std::string_view host = bind;
  if (colon != std::string_view::npos) {
    host = bind.substr(0, colon);
    const auto port_text = bind.substr(colon + 1);
    int port = -1;
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port < 0 ||
        port > 65535) {
      throw Error(ErrorCode::ConfigError, "bad port in bind address '" + std::string(bind) + "'");
    }
    config.port = port;
  }
  if (!host.empty()) config.host = std::string(host);
}

ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file) {
  ServiceConfig config;
  if (file) {
    Json j;
    try {
      j = Json::parse(read_file(*file));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::ConfigError, "config '" + file->string() + "' is not valid JSON",
                  e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
    const auto base = file->parent_path();
    auto path_of = [&](const Json& v, const std::string& key) {
      if (!v.is_string()) throw Error(ErrorCode::ConfigError, "'" + key + "' must be a string");
      std::filesystem::path p = v.get<std::string>();
      return p.is_relative() ? base / p : p;
    };
    for (const auto& [key, v] : j.items()) {
      if (key == "workspace") {
        config.paths.root = path_of(v, key);
      } else if (key == "schema") {
        config.paths.schema = path_of(v, key);
      } else if (key == "db") {
        config.paths.db = path_of(v, key);
      } else if (key == "selections") {
        config.paths.selections = path_of(v, key);
      } else if (key == "profiles") {
        config.paths.profiles = path_of(v, key);
      } else if (key == "host") {
        if (!v.is_string()) throw Error(ErrorCode::ConfigError, "'host' must be a string");
        config.host = v.get<std::string>();
      } else if (key == "port") {
        if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > 65535) {
          throw Error(ErrorCode::ConfigError, "'port' must be an integer in 0..65535");
        }
        config.port = v.get<int>();
      } else if (key == "bind") {
        if (!v.is_string()) throw Error(ErrorCode::ConfigError, "'bind' must be a string");
        apply_bind(config, v.get<std::string>());
      } else if (key == "threads") {
        if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) {
          throw Error(ErrorCode::ConfigError, "'threads' must be a positive integer");
        }
        config.threads = v.get<std::size_t>();
      } else {
        throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
      }
    }
  }
  if (const char* env = std::getenv("LEXSYS_BIND")) apply_bind(config, env);
  return config;
}

}  // namespace lexsys
