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

#include <sstream>

#include "fixtures.hpp"
#include "lexsys/cli.hpp"
#include "lexsys/json_wire.hpp"

using namespace lexsys;
using testing::at_ms;

namespace {

struct Run {
  int rc;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  cli::Context ctx;
  ctx.clock = fixed_clock(at_ms(1'760'000'000'000LL));
  ctx.out = &out;
  ctx.err = &err;
  const int rc = cli::run(args, ctx);
  return {rc, out.str(), err.str()};
}

struct Ws {
  testing::TempDir dir{"cli"};
  std::string root = dir.path().string();

  Ws() {
    const auto r = run({"-w", root, "init", "--from", (testing::data_dir() / "sample.db").string()});
    REQUIRE(r.rc == 0);
  }
};

}  // namespace

TEST_CASE("validate the shipped fixtures") {
  const auto r = run({"validate", (testing::data_dir() / "default.schema").string(),
                      (testing::data_dir() / "sample.db").string()});
  CHECK(r.rc == cli::kOk);
  const auto j = run({"--json", "validate", (testing::data_dir() / "default.schema").string()});
  REQUIRE(j.rc == 0);
  CHECK(Json::parse(j.out)["schema"]["properties"] == 25);
}

TEST_CASE("unknown property in an inline criterion") {
  Ws ws;
  const auto r = run({"-w", ws.root, "select", "-c", "Ecology.Precipitaton=601-900"});
  CHECK(r.rc == cli::kDomainError);
  CHECK(r.err.find("ValidationError") != std::string::npos);
  CHECK(r.err.find("Ecology.Precipitation") != std::string::npos);
}

TEST_CASE("why against a missing selection") {
  Ws ws;
  const auto r = run({"-w", ws.root, "why", "Glycine max", "--selection", "missing"});
  CHECK(r.rc == cli::kDomainError);
  CHECK(r.err.find("NotFound") != std::string::npos);
  const auto j = run({"-w", ws.root, "--json", "why", "Glycine max", "--selection", "missing"});
  CHECK(j.rc == cli::kDomainError);
  CHECK(Json::parse(j.err)["code"] == "NotFound");
}

TEST_CASE("usage errors exit 2") {
  Ws ws;
  CHECK(run({"frobnicate"}).rc == cli::kUsageError);
  CHECK(run({"select", "--nope"}).rc == cli::kUsageError);
  CHECK(run({"-w", ws.root, "combine", "--op", "xor", "a", "b"}).rc == cli::kUsageError);
  CHECK(run({"-w", ws.root, "sync", "pull"}).rc == cli::kUsageError);
}

TEST_CASE("select then why with text and json output") {
  Ws ws;
  const auto sel = run({"-w", ws.root, "--json", "select", "-c",
                        "Ecology.Precipitation=601-900..901-1200", "-c",
                        "Ecology.Soil texture=Loamy", "--label", "loam"});
  REQUIRE(sel.rc == 0);
  const Json s = Json::parse(sel.out);
  CHECK(s["matched_count"] == 7);
  const std::string id = s["id"];

  const auto why = run({"-w", ws.root, "why", "Lablab purpureus", "-s", id});
  CHECK(why.rc == 0);
  CHECK(why.out.find("Not adapted to Ecology.Soil texture") != std::string::npos);

  const auto list = run({"-w", ws.root, "--json", "selections"});
  REQUIRE(list.rc == 0);
  CHECK(Json::parse(list.out)["selections"].size() == 1);

  const auto text = run({"-w", ws.root, "browse", "--prefix", "Glyc"});
  CHECK(text.rc == 0);
  CHECK(text.out.find("Glycine max") != std::string::npos);
}

TEST_CASE("criteria file") {
  Ws ws;
  write_file_atomic(ws.dir / "q.crit", "{Select}{Ecology}{Soil texture(Loamy)}{/Select}\n");
  const auto r = run({"-w", ws.root, "--json", "select", "-c", (ws.dir / "q.crit").string()});
  REQUIRE(r.rc == 0);
  CHECK(Json::parse(r.out)["query"]["criteria"].size() == 1);
  write_file_atomic(ws.dir / "bad.crit", "{Select}{Ecology}{Soil texture(Loamy)}\n");
  const auto bad = run({"-w", ws.root, "select", "-c", (ws.dir / "bad.crit").string()});
  CHECK(bad.rc == cli::kDomainError);
  CHECK(bad.err.find("SyntaxError") != std::string::npos);
}

TEST_CASE("export and import") {
  Ws ws;
  const auto out = (ws.dir / "all.tsv").string();
  REQUIRE(run({"-w", ws.root, "export", "-o", out}).rc == 0);
  const auto imported = run({"-w", ws.root, "--json", "import", out});
  REQUIRE(imported.rc == 0);
  CHECK(Json::parse(imported.out)["imported"].size() == 20);
}
