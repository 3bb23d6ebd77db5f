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

#include <cmath>

#include "fixtures.hpp"
#include "generators.hpp"
#include "lexsys/agent.hpp"
#include "lexsys/error.hpp"
#include "oracles.hpp"

using namespace lexsys;
using testing::at_ms;

namespace {

const CriteriaSchema& schema() { return default_schema(); }

SessionEvent query_event(long long t, std::vector<CriterionRequest> criteria) {
  SelectionQuery q;
  q.criteria = std::move(criteria);
  return {at_ms(t), QueryIssued{std::move(q)}};
}

SessionEvent why_event(long long t, std::string species) {
  return {at_ms(t), WhyAsked{std::move(species)}};
}

UserProfile profile_of(const std::string& id, const std::vector<SessionEvent>& events) {
  return fold_events(id, events);
}

void check_counts(const UserProfile& p, const oracle::Counts& c) {
  CHECK(p.criterion_counts == c.criterion);
  CHECK(p.option_counts == c.option);
  CHECK(p.species_why_counts == c.why);
  CHECK(p.species_selected_counts == c.selected);
}

}  // namespace

TEST_CASE("event counters") {
  UserProfile p = new_profile("ana");
  p = record_event(std::move(p), query_event(1, {{"Ecology.Precipitation", OrdinalWindow{1, 2}}}));
  CHECK(p.criterion_counts.at("Ecology.Precipitation") == 1);
  CHECK(p.option_counts.at({"Ecology.Precipitation", 1}) == 1);
  CHECK(p.option_counts.at({"Ecology.Precipitation", 2}) == 1);
  p = record_event(std::move(p), why_event(2, "Mucuna pruriens"));
  p = record_event(std::move(p), why_event(3, "Mucuna pruriens"));
  CHECK(p.species_why_counts.at("Mucuna pruriens") == 2);
  p = record_event(std::move(p), {at_ms(4), SelectionSaved{"sel-1", {"Glycine max"}}});
  CHECK(p.species_selected_counts.at("Glycine max") == 1);
  CHECK(p.sessions.size() == 4);
  CHECK(fold_events("ana", p.sessions) == p);
  try {
    record_event(p, why_event(1, "Glycine max"));
    FAIL("expected ClockSkew");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ClockSkew);
  }
}

TEST_CASE("random logs fold like the oracle") {
  testgen::Rng rng(51);
  const auto names = testing::sample_db().names();
  for (int i = 0; i < 20; ++i) {
    const auto events = testgen::random_events(rng, schema(), names, 500, at_ms(0));
    UserProfile incremental = new_profile("u");
    for (const auto& e : events) incremental = record_event(std::move(incremental), e);
    check_counts(incremental, oracle::fold(events, schema()));
    CHECK(incremental == fold_events("u", events));
  }
}

TEST_CASE("cold start suggests the first properties as wildcards") {
  const auto s = suggest_criteria(new_profile("cold"), schema(), 3);
  REQUIRE(s.size() == 3);
  CHECK(s[0].property == "Ecology.Precipitation");
  CHECK(s[1].property == "Ecology.Altitude range");
  CHECK(s[2].property == "Ecology.Temperature range");
  for (const auto& c : s) CHECK(std::holds_alternative<Wildcard>(c.requested));
  const auto all = suggest_criteria(new_profile("cold"), schema(), 100);
  CHECK(all.size() == 25);
  CHECK(all[8].requested == Requested(Wildcard{4}));  // System niche.Morphology, "Any one"
}

TEST_CASE("dominant property ranks first") {
  std::vector<SessionEvent> events;
  for (int i = 0; i < 5; ++i) {
    events.push_back(query_event(i, {{"Ecology.Soil texture", CategoryChoice{{1}}}}));
  }
  events.push_back(query_event(9, {{"Ecology.Precipitation", OrdinalWindow{0, 0}}}));
  const auto s = suggest_criteria(profile_of("d", events), schema(), 3);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == CriterionRequest{"Ecology.Soil texture", CategoryChoice{{1}}});
  CHECK(s[1] == CriterionRequest{"Ecology.Precipitation", OrdinalWindow{0, 0}});
  CHECK(s[2].property == "Ecology.Altitude range");
}

TEST_CASE("criteria ranking equals the sort oracle") {
  testgen::Rng rng(52);
  for (int i = 0; i < 60; ++i) {
    const auto s = testgen::random_schema(rng);
    const auto names = testgen::random_species_names(rng, 8);
    const auto events = testgen::random_events(rng, s, names, testgen::uniform(rng, 0, 200), at_ms(0));
    const auto k = testgen::uniform(rng, 0, s.property_count() + 2);
    const auto got = suggest_criteria(fold_events("x", events), s, k);
    CHECK(got == oracle::suggest_criteria(events, s, k));
    SelectionQuery q;
    q.criteria = got;
    CHECK_NOTHROW(validate_query(q, s));
  }
}

TEST_CASE("cosine similarity") {
  const std::vector<double> a = {1, 0, 2}, b = {2, 0, 4}, c = {0, 3, 0}, z = {0, 0, 0}, o = {1, 1, 1};
  CHECK(cosine_similarity(a, b) == doctest::Approx(1.0));
  CHECK(cosine_similarity(a, c) == 0.0);
  CHECK(cosine_similarity(a, z) == 0.0);
  CHECK(cosine_similarity(a, o) == doctest::Approx(3.0 / (std::sqrt(5.0) * std::sqrt(3.0))));
}

TEST_CASE("collaborative suggestions") {
  const auto& db = testing::sample_db();
  const std::vector<SessionEvent> shared = {
      query_event(1, {{"Ecology.Precipitation", OrdinalWindow{1, 1}}})};
  const UserProfile me = profile_of("me", shared);
  CHECK(suggest_species(me, std::vector<UserProfile>{me}, db, schema(), 5).empty());

  auto neighbour_events = shared;
  neighbour_events.push_back(why_event(2, "Lablab purpureus"));
  const UserProfile neighbour = profile_of("you", neighbour_events);
  const std::vector<UserProfile> pop = {me, neighbour};
  CHECK(suggest_species(me, pop, db, schema(), 5) == std::vector<std::string>{"Lablab purpureus"});

  // The last saved selection is excluded.
  auto mine = shared;
  mine.push_back({at_ms(3), SelectionSaved{"sel-1", {"Lablab purpureus"}}});
  const std::vector<UserProfile> pop2 = {profile_of("me", mine), neighbour};
  CHECK(suggest_species(pop2[0], pop2, db, schema(), 5).empty());

  // Species missing from the database are skipped.
  auto ghost = shared;
  ghost.push_back(why_event(2, "Ghost species"));
  const std::vector<UserProfile> pop3 = {me, profile_of("g", ghost)};
  CHECK(suggest_species(me, pop3, db, schema(), 5).empty());
}

TEST_CASE("collaborative scores equal the dense oracle") {
  testgen::Rng rng(53);
  const auto& db = testing::sample_db();
  auto names = db.names();
  names.push_back("Not in db");
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<UserProfile> pop;
    for (int u = 0; u < 10; ++u) {
      pop.push_back(fold_events("u" + std::to_string(u),
                                testgen::random_events(rng, schema(), names, 60, at_ms(0))));
    }
    const auto& me = pop[testgen::uniform(rng, 0, 9)];
    const auto expected = oracle::species_scores(me.sessions, me.user_id, pop, db, schema());
    const auto got = score_species(me, pop, db, schema());
    // Scores are compared up to one common positive factor.
    long double top = 0;
    for (const auto& [_, v] : expected) top = std::max(top, v);
    std::set<std::string> got_names;
    for (const auto& s : got) {
      got_names.insert(s.name);
      REQUIRE(expected.count(s.name));
      const long double want = expected.at(s.name) / top;
      const long double have = (long double)s.score / (long double)got.front().score;
      CHECK(std::fabs(have - want) <= 1e-9L);
    }
    CHECK(got_names.size() == expected.size());
    for (std::size_t i = 1; i < got.size(); ++i) {
      CHECK(expected.at(got[i - 1].name) >= expected.at(got[i].name) - 1e-9L * top);
    }
  }
}

TEST_CASE("most referenced species") {
  CHECK(most_referenced_species({}, 5).empty());
  const auto p = profile_of("p", {why_event(1, "A"), why_event(2, "A"), why_event(3, "B"),
                                  why_event(4, "A")});
  const std::vector<UserProfile> one = {p};
  const auto top = most_referenced_species(one, 1);
  REQUIRE(top.size() == 1);
  CHECK(top[0] == ReferencedSpecies{"A", 3});

  testgen::Rng rng(54);
  const auto names = testgen::random_species_names(rng, 10);
  for (int i = 0; i < 20; ++i) {
    std::vector<UserProfile> pop;
    for (int u = 0; u < 5; ++u) {
      pop.push_back(fold_events("u", testgen::random_events(rng, schema(), names, 80, at_ms(0))));
    }
    const std::size_t k = testgen::uniform(rng, 0, 12);
    std::vector<std::pair<std::string, std::size_t>> got;
    for (const auto& r : most_referenced_species(pop, k)) got.emplace_back(r.name, r.count);
    CHECK(got == oracle::most_referenced(pop, k));
  }
}

TEST_CASE("sync of the local subset") {
  SpeciesDB central = testing::sample_db();
  const ChangeContext ctx{"ana", at_ms(100)};

  SUBCASE("pull of an empty subset") {
    UserProfile p = set_local_subset(new_profile("ana"), {}, central);
    const auto out = sync_local_subset(p, central, SyncDirection::Pull, schema(), ctx);
    CHECK(out.report.applied.empty());
    CHECK(out.report.staged.empty());
    CHECK(out.report.conflicted.empty());
    CHECK(out.central == central);
    CHECK(out.profile == p);
  }

  SUBCASE("pull copies records") {
    UserProfile p = set_local_subset(new_profile("ana"), {"Glycine max", "Cajanus cajan"}, central);
    const auto out = sync_local_subset(p, central, SyncDirection::Pull, schema(), ctx);
    CHECK(out.report.applied == std::vector<std::string>{"Cajanus cajan", "Glycine max"});
    CHECK(out.profile.local_subset->records.at("Glycine max") == central.get("Glycine max"));
    CHECK_THROWS_AS(set_local_subset(new_profile("ana"), {"Nope"}, central), Error);
  }

  SUBCASE("push of one new species stages it") {
    SpeciesRecord r;
    r.name = "Vicia villosa";
    r.attributes["Ecology.Soil texture"] = CategorySet{{0}};
    UserProfile p = contribute_species(new_profile("ana"), r, schema());
    const auto out = sync_local_subset(p, central, SyncDirection::PushContributions, schema(), ctx);
    CHECK(out.report.staged.size() == 1);
    CHECK(out.central.species.size() == central.species.size());
    REQUIRE(out.central.changelog.size() == central.changelog.size() + 1);
    CHECK(out.central.changelog.back().action == ChangeAction::StagedUpsert);
    CHECK(out.central.changelog.back().target == "Vicia villosa");
    CHECK(out.profile.local_subset->pending_species.empty());
  }

  SUBCASE("concurrent central edit conflicts") {
    UserProfile p = set_local_subset(new_profile("ana"), {"Glycine max"}, central);
    p = sync_local_subset(p, central, SyncDirection::Pull, schema(), ctx).profile;
    SpeciesRecord mine = central.get("Glycine max");
    mine.provenance = "field visit";
    p = contribute_species(p, mine, schema());
    SpeciesRecord theirs = central.get("Glycine max");
    theirs.provenance = "other edit";
    central = upsert_species(std::move(central), schema(), theirs, {"kwame", at_ms(50)});
    try {
      sync_local_subset(p, central, SyncDirection::PushContributions, schema(), ctx);
      FAIL("expected Conflict");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Conflict);
      CHECK(std::string(e.what()).find("Glycine max") != std::string::npos);
    }
    const auto pulled = sync_local_subset(p, central, SyncDirection::Pull, schema(), ctx);
    CHECK(pulled.report.conflicted == std::vector<std::string>{"Glycine max"});
  }
}

TEST_CASE("profile store round trip") {
  testing::TempDir dir("prof");
  ProfileStore store(dir / "profiles", std::make_shared<const CriteriaSchema>(schema()));
  CHECK(store.load("nobody") == new_profile("nobody"));
  testgen::Rng rng(55);
  UserProfile p = fold_events("ana", testgen::random_events(rng, schema(), testing::sample_db().names(),
                                                            100, at_ms(5)));
  p = set_local_subset(std::move(p), {"Glycine max"}, testing::sample_db());
  p = sync_local_subset(p, testing::sample_db(), SyncDirection::Pull, schema(), {}).profile;
  p = contribute_note(std::move(p), {"ana", "Glycine max", "tall\nand green", at_ms(9)});
  store.save(p);
  CHECK(store.load("ana") == p);
  CHECK(store.load_all().size() == 1);
  CHECK_THROWS_AS(store.load("../x"), Error);
}
