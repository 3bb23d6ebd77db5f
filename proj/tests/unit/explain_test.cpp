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

#include "fixtures.hpp"
#include "generators.hpp"
#include "lexsys/error.hpp"
#include "lexsys/explain.hpp"
#include "oracles.hpp"

using namespace lexsys;

namespace {

const CriteriaSchema& schema() { return default_schema(); }

const std::string kPrecip = "Ecology.Precipitation";
const std::string kDrought = "Ecology.Drought risk";
const std::string kSoil = "Ecology.Soil texture";
const std::string kPests = "Avoid Susceptibility.Insect pests";

SpeciesRecord make(const std::string& name, std::size_t precip, std::size_t drought,
                   std::set<std::size_t> soil, std::set<std::size_t> pests = {}) {
  SpeciesRecord r;
  r.name = name;
  r.attributes[kPrecip] = OrdinalRange{precip, precip};
  r.attributes[kDrought] = OrdinalRange{drought, drought};
  r.attributes[kSoil] = CategorySet{std::move(soil)};
  r.attributes[kPests] = CategorySet{std::move(pests)};
  return r;
}

SpeciesDB tiny_db() {
  SpeciesDB db = empty_db(schema());
  for (auto r : {make("A", 1, 2, {1}), make("B", 1, 0, {1}), make("C", 3, 0, {0}),
                 make("D", 1, 2, {0}), make("E", 2, 2, {1}, {0})}) {
    db.species.emplace(r.name, r);
  }
  return db;
}

SelectionResult selection_of(SelectionQuery q, const SpeciesDB& db) {
  SelectionResult r;
  r.id = "sel-test";
  r.matched = matching_species(q, db, schema());
  r.query = std::move(q);
  return r;
}

SelectionQuery base_query() {
  SelectionQuery q;
  q.criteria = {{kPrecip, OrdinalWindow{1, 2}},
                {kDrought, OrdinalWindow{2, 3}},
                {kSoil, CategoryChoice{{1}}},
                {kPests, CategoryChoice{{0}}}};
  return q;
}

}  // namespace

TEST_CASE("member species has no failures") {
  const auto db = tiny_db();
  const auto sel = selection_of(base_query(), db);
  REQUIRE(sel.matched == std::vector<std::string>{"A"});
  const auto e = why("A", sel, db, schema());
  CHECK(e.failures.empty());
  CHECK(e.query_id == "sel-test");
}

TEST_CASE("a single failing criterion") {
  const auto db = tiny_db();
  const auto sel = selection_of(base_query(), db);
  const auto e = why("B", sel, db, schema());
  REQUIRE(e.failures.size() == 1);
  CHECK(e.failures[0].criterion == kDrought);
  CHECK(e.failures[0].message == "Not adapted to Ecology.Drought risk");
  CHECK(e.failures[0].species_value == "Low risk");
  CHECK(e.failures[0].requested.find("Moderate drought") != std::string::npos);

  const auto hints = why_suggestions("B", sel, db, schema(), 3);
  REQUIRE(hints.size() == 1);
  CHECK(hints[0].criterion == kDrought);
  CHECK(hints[0].position == 1);
  CHECK(hints[0].includes_species);
  SelectionQuery dropped = base_query();
  dropped.criteria.erase(dropped.criteria.begin() + 1);
  CHECK(hints[0].resulting_size == oracle::matches(dropped, db, schema()).size());
  REQUIRE(hints[0].widened.has_value());
  CHECK(hints[0].widened->requested == Requested(OrdinalWindow{0, 3}));
  CHECK(hints[0].widened_size == 2u);
}

TEST_CASE("avoid failure and its widening") {
  const auto db = tiny_db();
  const auto sel = selection_of(base_query(), db);
  const auto e = why("E", sel, db, schema());
  REQUIRE(e.failures.size() == 1);
  CHECK(e.failures[0].message == "Not adapted to Avoid Susceptibility.Insect pests");
  // Dropping the only pest avoided leaves nothing to widen to.
  const auto hints = why_suggestions("E", sel, db, schema(), 3);
  REQUIRE(hints.size() == 1);
  CHECK_FALSE(hints[0].widened.has_value());
}

TEST_CASE("two failing criteria give two hints") {
  const auto db = tiny_db();
  const auto sel = selection_of(base_query(), db);
  const auto e = why("C", sel, db, schema());
  REQUIRE(e.failures.size() == 3);
  CHECK(e.failures[0].criterion == kPrecip);
  CHECK(e.failures[1].criterion == kDrought);
  CHECK(e.failures[2].criterion == kSoil);

  const auto d = why("D", sel, db, schema());
  REQUIRE(d.failures.size() == 1);

  SelectionQuery q;
  q.criteria = {{kPrecip, OrdinalWindow{1, 1}}, {kSoil, CategoryChoice{{1}}}};
  const auto two = selection_of(q, db);
  const auto hints = why_suggestions("C", two, db, schema(), 5);
  REQUIRE(hints.size() == 2);
  for (const auto& h : hints) {
    SelectionQuery without = q;
    without.criteria.erase(without.criteria.begin() + std::ptrdiff_t(h.position));
    CHECK(h.resulting_size == oracle::matches(without, db, schema()).size());
    CHECK_FALSE(h.includes_species);
  }
  CHECK(hints[0].resulting_size >= hints[1].resulting_size);
  CHECK(why_suggestions("C", two, db, schema(), 1).size() == 1);
}

TEST_CASE("nothing to relax for a member") {
  const auto db = tiny_db();
  const auto sel = selection_of(base_query(), db);
  try {
    why_suggestions("A", sel, db, schema(), 3);
    FAIL("expected NothingToRelax");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NothingToRelax);
  }
}

TEST_CASE("unknown species and combined selections") {
  const auto db = tiny_db();
  auto sel = selection_of(base_query(), db);
  CHECK_THROWS_WITH_AS(why("Nobody", sel, db, schema()), doctest::Contains("Nobody"), Error);
  sel.query.criteria.clear();
  sel.query.combined = CombineProvenance{CombineOp::Union, {"a", "b"}};
  try {
    why("A", sel, db, schema());
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
  }
}

TEST_CASE("failures equal the per-criterion oracle") {
  testgen::Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const auto s = testgen::random_schema(rng);
    const auto db = testgen::random_db(rng, s, testgen::uniform(rng, 1, 30));
    const auto q = testgen::random_query(rng, s, 10);
    for (const auto& [name, record] : db.species) {
      const auto e = why_inline(name, q, db, s);
      std::vector<std::string> got;
      for (const auto& f : e.failures) {
        got.push_back(f.criterion);
        CHECK(f.message == "Not adapted to " + f.criterion);
      }
      CHECK(got == oracle::failures(record, q, s));
    }
  }
}
