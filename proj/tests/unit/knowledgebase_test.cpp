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

#include <map>

#include "fixtures.hpp"
#include "generators.hpp"
#include "lexsys/error.hpp"
#include "lexsys/knowledgebase.hpp"

using namespace lexsys;
using testing::at_ms;

namespace {

const CriteriaSchema& schema() { return default_schema(); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::UsageError;
}

bool is_missing(const AttributeValue& v) {
  if (const auto* r = std::get_if<OrdinalRange>(&v)) return !r->lo && !r->hi;
  return std::get<CategorySet>(v).members.empty();
}

SpeciesRecord without_missing(SpeciesRecord r) {
  std::erase_if(r.attributes, [](const auto& kv) { return is_missing(kv.second); });
  return r;
}

}  // namespace

TEST_CASE("shipped sample loads cleanly") {
  const SpeciesDB& db = testing::sample_db();
  CHECK(db.species.size() == 20);
  CHECK(db.schema_version == "lexsys-default-1");
  CHECK_NOTHROW(validate_db(db, schema()));
  const auto& mucuna = db.get("Mucuna pruriens");
  CHECK(mucuna.provenance == "synthetic sample");
  const auto& p = std::get<OrdinalRange>(mucuna.attributes.at("Ecology.Precipitation"));
  CHECK(p.lo == 1u);
  CHECK_FALSE(p.hi.has_value());
  CHECK(db.references.size() == 1);
}

TEST_CASE("empty database file") {
  const SpeciesDB db = parse_db("lexsys-db 1\nschema-version: lexsys-default-1\n", schema());
  CHECK(db.species.empty());
  CHECK(db == empty_db(schema()));
}

TEST_CASE("unknown property key is a schema mismatch") {
  const std::string text =
      "lexsys-db 1\nschema-version: lexsys-default-1\n\n[species X]\nEcology.Bogus = Low\n";
  try {
    parse_db(text, schema());
    FAIL("expected SchemaMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaMismatch);
    CHECK(std::string(e.what()).find("Ecology.Bogus") != std::string::npos);
  }
}

TEST_CASE("malformed database files") {
  CHECK(code_of([] { parse_db("", schema()); }) == ErrorCode::FormatError);
  CHECK(code_of([] { parse_db("lexsys-db 1\n", schema()); }) == ErrorCode::FormatError);
  CHECK(code_of([] {
          parse_db("lexsys-db 1\nschema-version: other\n", schema());
        }) == ErrorCode::SchemaMismatch);
  CHECK(code_of([] {
          parse_db("lexsys-db 1\nschema-version: lexsys-default-1\n\n[species X]\n"
                   "Ecology.Precipitation = Wet\n",
                   schema());
        }) == ErrorCode::SchemaMismatch);
  CHECK(code_of([] {
          parse_db("lexsys-db 1\nschema-version: lexsys-default-1\n\n[species X]\n"
                   "Ecology.Soil texture = Sandy..Clay\n",
                   schema());
        }) == ErrorCode::KindMismatch);
}

TEST_CASE("value text") {
  const Property& precip = schema().lookup_property("Ecology.Precipitation");
  CHECK(parse_value(precip, "601-900..1201-1500") == AttributeValue(OrdinalRange{1, 3}));
  CHECK(parse_value(precip, "901-1200") == AttributeValue(OrdinalRange{2, 2}));
  CHECK(parse_value(precip, "..> 1500") == AttributeValue(OrdinalRange{std::nullopt, 4}));
  CHECK(render_value(precip, OrdinalRange{std::nullopt, 4}) .find('?') != std::string::npos);
  const Property& soil = schema().lookup_property("Ecology.Soil texture");
  CHECK(parse_value(soil, "Sandy | Clay") == AttributeValue(CategorySet{{0, 2}}));
  CHECK(format_value(soil, CategorySet{{0, 2}}) == "Sandy | Clay");
}

TEST_CASE("upsert then get") {
  testgen::Rng rng(11);
  const SpeciesRecord r = testgen::random_record(rng, schema(), "Vicia villosa");
  const SpeciesDB db = upsert_species(empty_db(schema()), schema(), r, {"ana", at_ms(1000)});
  CHECK(db.get("Vicia villosa") == r);
  REQUIRE(db.changelog.size() == 1);
  CHECK(db.changelog[0].action == ChangeAction::Upsert);
  CHECK(db.changelog[0].author == "ana");
  CHECK(db.revision_of("Vicia villosa") == 1);
  CHECK(db.revision_of("Other") == 0);
}

TEST_CASE("remove of an unknown species") {
  CHECK(code_of([] { remove_species(empty_db(schema()), "X", {}); }) == ErrorCode::NotFound);
  CHECK(code_of([] { (void)empty_db(schema()).get("X"); }) == ErrorCode::NotFound);
}

TEST_CASE("invalid records are rejected") {
  SpeciesRecord r;
  r.name = "Bad";
  r.attributes["Ecology.Precipitation"] = OrdinalRange{3, 1};
  CHECK(code_of([&] { upsert_species(empty_db(schema()), schema(), r, {}); }) ==
        ErrorCode::ValidationError);
  r.attributes["Ecology.Precipitation"] = OrdinalRange{0, 9};
  CHECK(code_of([&] { upsert_species(empty_db(schema()), schema(), r, {}); }) ==
        ErrorCode::ValidationError);
  r.attributes.clear();
  r.attributes["Ecology.Precipitation"] = CategorySet{{0}};
  CHECK(code_of([&] { upsert_species(empty_db(schema()), schema(), r, {}); }) ==
        ErrorCode::KindMismatch);
}

TEST_CASE("random upserts and removes replay like a map") {
  testgen::Rng rng(12);
  const auto pool = testgen::random_species_names(rng, 12);
  for (int trial = 0; trial < 20; ++trial) {
    SpeciesDB db = empty_db(schema());
    std::map<std::string, SpeciesRecord> oracle;
    for (int i = 0; i < 50; ++i) {
      const std::string& name = testgen::pick(rng, pool);
      if (testgen::chance(rng, 0.3)) {
        if (oracle.erase(name)) {
          db = remove_species(std::move(db), name, {"x", at_ms(i)});
        } else {
          CHECK_THROWS_AS(remove_species(db, name, {}), Error);
        }
      } else {
        SpeciesRecord r = testgen::random_record(rng, schema(), name);
        oracle.insert_or_assign(name, r);
        db = upsert_species(std::move(db), schema(), r, {"x", at_ms(i)});
      }
    }
    CHECK(db.species == oracle);
    for (std::size_t i = 1; i < db.changelog.size(); ++i) {
      CHECK(db.changelog[i].seq == db.changelog[i - 1].seq + 1);
    }
  }
}

TEST_CASE("references by tag") {
  SpeciesDB db = testing::sample_db();
  db = add_reference(std::move(db), schema(),
                     {"drought-1", "A drought study", {"Ecology.Drought risk"}}, {});
  const auto hits = list_references(db, std::string("Ecology.Drought risk"));
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].id == "drought-1");
  CHECK(code_of([&] { add_reference(db, schema(), {"drought-1", "again", {}}, {}); }) ==
        ErrorCode::DuplicateId);
  CHECK(code_of([&] { add_reference(db, schema(), {"r2", "c", {"Nope"}}, {}); }) ==
        ErrorCode::UnresolvedTarget);
  CHECK(list_references(db).size() == 2);
}

TEST_CASE("reference filter equals a linear scan") {
  testgen::Rng rng(13);
  SpeciesDB db = testing::sample_db();
  std::vector<std::string> tags = db.names();
  for (const auto& ref : schema().properties()) tags.push_back(ref.qualified);
  std::vector<ReferenceEntry> all = db.references;
  for (int i = 0; i < 200; ++i) {
    ReferenceEntry e{"r" + std::to_string(i), testgen::random_text(rng, 1, 30), {}};
    const std::size_t n = testgen::uniform(rng, 0, 4);
    for (std::size_t k = 0; k < n; ++k) e.tags.insert(testgen::pick(rng, tags));
    all.push_back(e);
    db = add_reference(std::move(db), schema(), e, {});
  }
  for (const auto& tag : tags) {
    std::set<std::string> expected;
    for (const auto& e : all) {
      for (const auto& t : e.tags) {
        if (t == tag) expected.insert(e.id);
      }
    }
    std::set<std::string> got;
    for (const auto& e : list_references(db, tag)) got.insert(e.id);
    CHECK(got == expected);
  }
}

TEST_CASE("notes need a resolvable target") {
  SpeciesDB db = testing::sample_db();
  db = add_note(std::move(db), schema(), {"ana", "Mucuna pruriens", "tall", at_ms(5)}, {});
  db = add_note(std::move(db), schema(), {"ana", "Ecology.Soil texture", "hm", at_ms(6)}, {});
  CHECK(db.notes.size() == 2);
  CHECK(code_of([&] { add_note(db, schema(), {"ana", "Nobody", "x", {}}, {}); }) ==
        ErrorCode::UnresolvedTarget);
}

TEST_CASE("database text round trip with history") {
  testgen::Rng rng(14);
  for (int i = 0; i < 25; ++i) {
    SpeciesDB db = testgen::random_db(rng, schema(), testgen::uniform(rng, 0, 30));
    db = testgen::with_random_history(rng, std::move(db), schema(), 40, at_ms(1'700'000'000'000));
    const SpeciesDB back = parse_db(serialize_db(db, schema()), schema());
    SpeciesDB expected = db;
    expected.changelog.clear();
    CHECK(back == expected);
    CHECK(parse_changelog(serialize_changelog(db.changelog)) == db.changelog);
  }
}

TEST_CASE("save and load through files") {
  testing::TempDir dir("kb");
  testgen::Rng rng(15);
  SpeciesDB db = testgen::with_random_history(rng, testgen::random_db(rng, schema(), 10),
                                              schema(), 30, at_ms(0));
  save_db(db, schema(), dir / "species.db");
  CHECK(std::filesystem::exists(dir / "species.db.changes"));
  CHECK(load_db(dir / "species.db", schema()) == db);
  CHECK(code_of([&] { load_db(dir / "missing.db", schema()); }) == ErrorCode::IoError);
}

TEST_CASE("tabular export and import") {
  const SpeciesDB& db = testing::sample_db();
  const std::string tsv = export_tsv(db, schema());
  const auto rows = import_tsv(tsv, schema());
  REQUIRE(rows.size() == db.species.size());
  for (const auto& r : rows) CHECK(without_missing(r) == without_missing(db.get(r.name)));

  testgen::Rng rng(16);
  for (int i = 0; i < 20; ++i) {
    const SpeciesDB rdb = testgen::random_db(rng, schema(), 15);
    for (const auto& r : import_tsv(export_tsv(rdb, schema()), schema())) {
      CHECK(without_missing(r) == without_missing(rdb.get(r.name)));
    }
  }
  const auto only = import_tsv(export_tsv(db, schema(), {"Glycine max"}), schema());
  REQUIRE(only.size() == 1);
  CHECK(only[0].name == "Glycine max");
  CHECK(code_of([] { import_tsv("species\tx\n", schema()); }) == ErrorCode::FormatError);
  CHECK(code_of([] { import_tsv("name\tEcology.Bogus\nA\tx\n", schema()); }) ==
        ErrorCode::SchemaMismatch);
}
