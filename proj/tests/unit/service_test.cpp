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

#include <doctest.h>

#include <httplib.h>

#include "fixtures.hpp"
#include "lexsys/service.hpp"

using namespace lexsys;
using testing::at_ms;

namespace {

struct Env {
  testing::TempDir dir{"svc"};
  std::unique_ptr<Workspace> ws;

  Env() {
    std::filesystem::copy_file(testing::data_dir() / "sample.db", dir / "species.db");
    WorkspacePaths p;
    p.root = dir.path();
    ws = std::make_unique<Workspace>(p, stepping_clock(at_ms(1'760'000'000'000LL),
                                                      std::chrono::milliseconds(1)));
  }
};

HttpRequest req(std::string method, std::string path, std::string body = {},
                std::map<std::string, std::string> params = {}) {
  HttpRequest r;
  r.method = std::move(method);
  r.path = std::move(path);
  r.body = std::move(body);
  r.params = std::move(params);
  return r;
}

}  // namespace

TEST_CASE("router basics") {
  Env env;
  Router router(*env.ws);

  auto schema = router.handle(req("GET", "/schema"));
  CHECK(schema.status == 200);
  CHECK(schema.body["groups"].size() == 5);
  CHECK(schema.body["property_count"] == 25);

  auto all = router.handle(req("POST", "/select", R"({"criteria": []})"));
  CHECK(all.status == 201);
  CHECK(all.body["matched_count"] == 20);
  CHECK(all.body["matched"].size() == 20);

  auto bogus = router.handle(req("GET", "/selections/bogus"));
  CHECK(bogus.status == 404);
  CHECK(bogus.body["code"] == "NotFound");

  CHECK(router.handle(req("GET", "/nowhere")).status == 404);
  CHECK(router.handle(req("DELETE", "/schema")).status == 400);
  auto bad_json = router.handle(req("POST", "/select", "{nope"));
  CHECK(bad_json.status == 400);
  CHECK(bad_json.body["code"] == "FormatError");
  auto bad_k = router.handle(req("GET", "/suggest/criteria", {}, {{"k", "-1"}}));
  CHECK(bad_k.status == 400);
}

TEST_CASE("select, why and combine through the router") {
  Env env;
  Router router(*env.ws);
  auto sel = router.handle(req("POST", "/select", R"({"criteria": [
      {"property": "Ecology.Precipitation", "value": "601-900..901-1200"},
      {"property": "Ecology.Soil texture", "members": ["Loamy"]}]})"));
  REQUIRE(sel.status == 201);
  const std::string id = sel.body["id"];
  CHECK(sel.body["matched_count"] == 7);

  auto why = router.handle(req("GET", "/selections/" + id + "/why/Lablab purpureus"));
  REQUIRE(why.status == 200);
  CHECK(why.body["in_selection"] == false);
  REQUIRE(why.body["failures"].size() == 1);
  CHECK(why.body["failures"][0]["message"] == "Not adapted to Ecology.Soil texture");
  CHECK(why.body["hints"].size() == 1);

  auto member = router.handle(
      req("GET", "/selections/" + id + "/why/" + sel.body["matched"][0].get<std::string>()));
  CHECK(member.body["in_selection"] == true);
  CHECK(member.body["hints"].empty());

  auto all = router.handle(req("POST", "/select", "{}"));
  auto diff = router.handle(req("POST", "/combine",
                                Json{{"op", "difference"}, {"operands", {all.body["id"], id}}}.dump()));
  REQUIRE(diff.status == 201);
  CHECK(diff.body["matched_count"] == 13);
  auto arity = router.handle(req("POST", "/combine", Json{{"op", "union"}, {"operands", {id}}}.dump()));
  CHECK(arity.status == 400);
  CHECK(arity.body["code"] == "ArityError");
  CHECK(router.handle(req("GET", "/selections")).body["selections"].size() == 3);
}

TEST_CASE("sessions bind calls to profiles") {
  Env env;
  Router router(*env.ws);
  auto s = router.handle(req("POST", "/sessions", R"({"user_id": "ana"})"));
  REQUIRE(s.status == 201);
  const std::string token = s.body["token"];
  CHECK(token.size() == 32);
  CHECK(router.session(token)->user_id == "ana");

  HttpRequest r = req("POST", "/select", R"({"criteria": [
      {"property": "Ecology.Soil texture", "members": ["Clay"]}]})");
  r.headers["x-session-token"] = token;
  auto sel = router.handle(r);
  REQUIRE(sel.status == 201);
  CHECK(router.session(token)->active_selection == sel.body["id"].get<std::string>());

  HttpRequest sug = req("GET", "/suggest/criteria");
  sug.headers["x-session-token"] = token;
  auto out = router.handle(sug);
  REQUIRE(out.status == 200);
  CHECK(out.body["criteria"][0]["property"] == "Ecology.Soil texture");

  HttpRequest unknown = req("GET", "/suggest/criteria");
  unknown.headers["x-session-token"] = "feedface";
  CHECK(router.handle(unknown).status == 404);
  CHECK(router.handle(req("POST", "/sync", R"({"direction": "pull"})")).status == 400);
  CHECK(router.handle(req("POST", "/sessions", R"({"user_id": "../x"})")).status == 400);
}

TEST_CASE("writes persist to the workspace") {
  Env env;
  {
    Router router(*env.ws);
    auto put = router.handle(req("PUT", "/species/Vicia villosa", R"({"provenance": "test",
        "attributes": {"Ecology.Soil texture": ["Sandy"]}})"));
    REQUIRE(put.status == 200);
    CHECK(put.body["record"]["name"] == "Vicia villosa");
    auto note = router.handle(req("POST", "/notes",
                                  R"({"target": "Vicia villosa", "body": "hairy", "author": "ana"})"));
    CHECK(note.status == 201);
    auto dup = router.handle(req("POST", "/references",
                                 R"({"id": "synthetic-2026", "citation": "x", "tags": []})"));
    CHECK(dup.status == 409);
    CHECK(dup.body["code"] == "DuplicateId");
    auto bad = router.handle(req("PUT", "/species/X", R"({"attributes": {"Ecology.Bogus": []}})"));
    CHECK(bad.status == 400);
  }
  WorkspacePaths p;
  p.root = env.dir.path();
  Workspace again(p, fixed_clock(at_ms(0)));
  CHECK(again.snapshot()->species.size() == 21);
  CHECK(again.snapshot()->notes.size() == 1);
  Router router(again);
  auto got = router.handle(req("GET", "/species/Vicia villosa"));
  REQUIRE(got.status == 200);
  CHECK(got.body["notes"].size() == 1);
}

TEST_CASE("real HTTP server on a free port") {
  Env env;
  ServiceConfig config;
  config.port = 0;
  config.threads = 2;
  Server server(*env.ws, config);
  const int port = server.start_background();
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);

  auto schema = client.Get("/schema");
  REQUIRE(schema);
  CHECK(schema->status == 200);
  const Json s = Json::parse(schema->body);
  CHECK(s["groups"].size() == 5);
  CHECK(s["property_count"] == 25);

  auto all = client.Post("/select", R"({"criteria": []})", "application/json");
  REQUIRE(all);
  CHECK(all->status == 201);
  CHECK(Json::parse(all->body)["matched"].size() == 20);

  auto bogus = client.Get("/selections/bogus");
  REQUIRE(bogus);
  CHECK(bogus->status == 404);
  CHECK(Json::parse(bogus->body)["code"] == "NotFound");

  auto species = client.Get("/species/Glycine%20max");
  REQUIRE(species);
  CHECK(species->status == 200);
  CHECK(Json::parse(species->body)["name"] == "Glycine max");

  auto prefixed = client.Get("/species?prefix=C");
  REQUIRE(prefixed);
  CHECK(Json::parse(prefixed->body)["count"] == 5);
  server.stop();
}

TEST_CASE("service configuration") {
  testing::TempDir dir("cfg");
  write_file_atomic(dir / "svc.json", R"({"workspace": "ws", "port": 9100, "threads": 3})");
  auto c = load_service_config(dir / "svc.json");
  CHECK(c.port == 9100);
  CHECK(c.threads == 3);
  CHECK(c.paths.root == dir / "ws");
  apply_bind(c, "0.0.0.0:9200");
  CHECK(c.host == "0.0.0.0");
  CHECK(c.port == 9200);
  apply_bind(c, ":0");
  CHECK(c.port == 0);
  CHECK_THROWS_AS(apply_bind(c, "host:99999"), Error);
  write_file_atomic(dir / "bad.json", R"({"colour": "blue"})");
  try {
    load_service_config(dir / "bad.json");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }
  CHECK(http_status(ErrorCode::Conflict) == 409);
  CHECK(http_status(ErrorCode::StoreError) == 500);
  CHECK(http_status(ErrorCode::KindMismatch) == 400);
}
