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

// Workspace state, the JSON operation facade shared by HTTP and the CLI, and
// the HTTP server itself.
//
// A workspace directory holds:
//   species.db            the knowledge base (and species.db.changes)
//   selections/           one JSON file per saved selection
//   profiles/             one JSON file per user
// The schema comes from a file when configured, otherwise the built-in one.

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "lexsys/agent.hpp"
#include "lexsys/combine.hpp"
#include "lexsys/json_wire.hpp"
#include "lexsys/knowledgebase.hpp"
#include "lexsys/schema.hpp"
#include "lexsys/selection.hpp"
#include "lexsys/time.hpp"

namespace lexsys {

struct WorkspacePaths {
  std::filesystem::path root = ".";
  std::optional<std::filesystem::path> schema;  // nullopt: built-in schema
  std::optional<std::filesystem::path> db;
  std::optional<std::filesystem::path> selections;
  std::optional<std::filesystem::path> profiles;

  std::filesystem::path db_path() const;
  std::filesystem::path selections_dir() const;
  std::filesystem::path profiles_dir() const;
};

/// Loaded state for one workspace. Readers take immutable snapshots; every
/// database mutation is serialized, persisted, then published.
class Workspace {
 public:
  Workspace(WorkspacePaths paths, Clock clock);

  const CriteriaSchema& schema() const { return *schema_; }
  std::shared_ptr<const CriteriaSchema> schema_ptr() const { return schema_; }
  std::shared_ptr<const SpeciesDB> snapshot() const;

  /// Runs `change` on the current snapshot under the writer lock, saves the
  /// result and publishes it. Returns the new snapshot.
  std::shared_ptr<const SpeciesDB> mutate(const std::function<SpeciesDB(const SpeciesDB&)>& change);

  /// Read-modify-write of one profile under the profile writer lock.
  UserProfile update_profile(const std::string& user_id,
                             const std::function<UserProfile(UserProfile)>& change);

  SelectionStore& selections() { return selections_; }
  ProfileStore& profiles() { return profiles_; }
  const WorkspacePaths& paths() const { return paths_; }
  Instant now() const { return clock_(); }

 private:
  WorkspacePaths paths_;
  Clock clock_;
  std::shared_ptr<const CriteriaSchema> schema_;
  mutable std::mutex snapshot_mu_;
  std::shared_ptr<const SpeciesDB> db_;
  std::mutex writer_mu_;
  std::mutex profile_mu_;
  SelectionStore selections_;
  ProfileStore profiles_;
};

/// Every operation reachable from HTTP or the CLI. Each returns the response
/// body; failures are thrown as Error. `user` binds the call to a profile,
/// whose event log then records the call.
class Api {
 public:
  explicit Api(Workspace& ws) : ws_(ws) {}

  Json schema() const;

  Json list_species(const BrowseFilter& filter) const;
  Json get_species(const std::string& name) const;
  /// Body is a species record; the path name wins over any "name" member.
  Json put_species(const std::string& name, const Json& body, const std::optional<std::string>& user);
  Json add_note(const Json& body, const std::optional<std::string>& user);
  Json list_references(const std::optional<std::string>& tag) const;
  Json add_reference(const Json& body, const std::optional<std::string>& user);

  Json select(const SelectionQuery& query, const std::optional<std::string>& user);
  Json list_selections() const;
  Json get_selection(const std::string& id) const;
  Json why(const std::string& id, const std::string& species, std::size_t hints,
           const std::optional<std::string>& user);
  Json combine(const CombineSpec& spec, const std::optional<std::string>& user);

  Json suggest_criteria(const std::optional<std::string>& user, std::size_t k) const;
  Json suggest_species(const std::optional<std::string>& user, std::size_t k) const;
  Json most_referenced(std::size_t k) const;

  /// Body: {"direction": "pull"|"push", "names": [...]?,
  ///        "contributions": {"species": [record...], "notes": [note...]}?}
  Json sync(const std::string& user, const Json& body);

  /// TSV of the whole database or of one selection's matched species.
  Json export_tsv(const std::optional<std::string>& selection) const;
  /// Body: {"content": "<tsv>"}. Upserts every row.
  Json import_tsv(const Json& body, const std::optional<std::string>& user);

  Workspace& workspace() { return ws_; }

 private:
  void record(const std::optional<std::string>& user, std::vector<EventKind> events);
  std::string author(const std::optional<std::string>& user) const;

  Workspace& ws_;
};

struct Session {
  std::string token;
  std::string user_id;
  Instant created_at{};
  std::optional<std::string> active_selection;
};

struct HttpRequest {
  std::string method;
  std::string path;  // decoded
  std::map<std::string, std::string> params;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct HttpResponse {
  int status = 200;
  Json body;
};

/// HTTP status for an error code: 400 for input errors, 404 NotFound,
/// 409 Conflict and DuplicateId, 500 for store and I/O faults.
int http_status(ErrorCode code);

/// Routes requests onto an Api and owns sessions. Thread safe.
class Router {
 public:
  explicit Router(Workspace& ws) : api_(ws), ws_(ws) {}

  HttpResponse handle(const HttpRequest& request);

  std::optional<Session> session(const std::string& token) const;

 private:
  HttpResponse route(const HttpRequest& request);
  std::optional<std::string> user_of(const HttpRequest& request) const;
  void set_active(const HttpRequest& request, const std::string& selection_id);

  Api api_;
  Workspace& ws_;
  mutable std::mutex sessions_mu_;
  std::map<std::string, Session> sessions_;
};

struct ServiceConfig {
  WorkspacePaths paths;
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::size_t threads = 8;
};

/// Layered configuration: defaults, then the JSON file, then LEXSYS_BIND
/// ("host", "host:port" or ":port"), then explicit overrides applied by the
/// caller. Throws ConfigError.
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file);
void apply_bind(ServiceConfig& config, std::string_view bind);

class Server {
 public:
  Server(Workspace& ws, ServiceConfig config);
  ~Server();

  /// Binds the listening socket and returns the actual port (BindError).
  int bind();
  /// Serves until stop(). Requires bind().
  void listen();
  /// bind() plus listen() on a background thread.
  int start_background();
  void stop();

  Router& router() { return router_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Router router_;
  ServiceConfig config_;
  std::thread thread_;
};

}  // namespace lexsys
