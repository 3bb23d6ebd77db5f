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

// Species knowledge base: records, bibliographic references, field notes and
// an append-only change log. SpeciesDB is a value; every mutation returns a
// new snapshot.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lexsys/schema.hpp"
#include "lexsys/time.hpp"

namespace lexsys {

/// Stored interval of option indices; nullopt is a missing bound.
struct OrdinalRange {
  std::optional<std::size_t> lo;
  std::optional<std::size_t> hi;

  bool operator==(const OrdinalRange&) const = default;
};

/// Stored category memberships; empty means missing.
struct CategorySet {
  std::set<std::size_t> members;

  bool operator==(const CategorySet&) const = default;
};

using AttributeValue = std::variant<OrdinalRange, CategorySet>;

struct SpeciesRecord {
  std::string name;
  std::map<std::string, AttributeValue> attributes;  // keyed by "Group.Property"
  std::optional<std::string> provenance;

  /// Stored value, or the kind's missing value when the key is absent.
  AttributeValue value_or_missing(const std::string& qualified, PropertyKind kind) const;

  bool operator==(const SpeciesRecord&) const = default;
};

struct ReferenceEntry {
  std::string id;
  std::string citation;
  std::set<std::string> tags;  // qualified property names or species names

  bool operator==(const ReferenceEntry&) const = default;
};

struct NoteEntry {
  std::string author;
  std::string target;  // species name or qualified property name
  std::string body;
  Instant timestamp{};

  bool operator==(const NoteEntry&) const = default;
};

enum class ChangeAction { Upsert, Remove, Note, Reference, StagedUpsert, StagedNote };

std::string_view to_string(ChangeAction a);
ChangeAction change_action_from_string(std::string_view s);

/// One change-log line. Staged entries carry their payload for later review.
struct ChangeEntry {
  std::uint64_t seq = 0;
  Instant timestamp{};
  std::string author;
  ChangeAction action = ChangeAction::Upsert;
  std::string target;
  std::string diff;
  std::string payload;  // JSON text, staged entries only

  bool operator==(const ChangeEntry&) const = default;
};

struct SpeciesDB {
  std::string schema_version;
  std::map<std::string, SpeciesRecord> species;
  std::vector<ReferenceEntry> references;  // append order
  std::vector<NoteEntry> notes;
  std::vector<ChangeEntry> changelog;

  const SpeciesRecord* find(std::string_view name) const;
  const SpeciesRecord& get(std::string_view name) const;  // NotFound
  std::vector<std::string> names() const;

  /// Sequence of the last applied upsert/remove touching `name`, 0 if none.
  std::uint64_t revision_of(std::string_view name) const;
  std::uint64_t next_seq() const;

  bool operator==(const SpeciesDB&) const = default;
};

/// Who and when, for change-log entries.
struct ChangeContext {
  std::string author = "system";
  Instant now{};
};

/// Throws ValidationError naming the offending key or index, KindMismatch when a
/// value has the wrong form for its property.
void validate_record(const SpeciesRecord& record, const CriteriaSchema& schema);
void validate_db(const SpeciesDB& db, const CriteriaSchema& schema);

SpeciesDB empty_db(const CriteriaSchema& schema);

SpeciesDB upsert_species(SpeciesDB db, const CriteriaSchema& schema, SpeciesRecord record,
                         const ChangeContext& ctx);
SpeciesDB remove_species(SpeciesDB db, std::string_view name, const ChangeContext& ctx);

/// Target must name a species in db or a property in schema (UnresolvedTarget).
SpeciesDB add_note(SpeciesDB db, const CriteriaSchema& schema, NoteEntry note,
                   const ChangeContext& ctx);
/// DuplicateId on a reused id; every tag must resolve (UnresolvedTarget).
SpeciesDB add_reference(SpeciesDB db, const CriteriaSchema& schema, ReferenceEntry entry,
                        const ChangeContext& ctx);
/// Ordered by id.
std::vector<ReferenceEntry> list_references(const SpeciesDB& db,
                                            const std::optional<std::string>& tag = std::nullopt);

/// Appends a staged entry without touching records.
SpeciesDB stage_change(SpeciesDB db, ChangeAction action, std::string target, std::string diff,
                       std::string payload, const ChangeContext& ctx);

// Rendering with option labels. Missing bounds render as "?".
std::string render_value(const Property& property, const AttributeValue& value);
/// Value text in the database file syntax ("lo..hi", "a | b").
std::string format_value(const Property& property, const AttributeValue& value);
/// Throws SchemaMismatch on an unknown label, KindMismatch on a range for a
/// categorical property.
AttributeValue parse_value(const Property& property, std::string_view text);

// Persistence. The database text goes to `path`; the change log goes to
// `path` + ".changes", one JSON object per line.
std::string serialize_db(const SpeciesDB& db, const CriteriaSchema& schema);
SpeciesDB parse_db(std::string_view text, const CriteriaSchema& schema);
std::string serialize_changelog(const std::vector<ChangeEntry>& log);
std::vector<ChangeEntry> parse_changelog(std::string_view text);

SpeciesDB load_db(const std::filesystem::path& path, const CriteriaSchema& schema);
void save_db(const SpeciesDB& db, const CriteriaSchema& schema, const std::filesystem::path& path);
std::filesystem::path changelog_path(const std::filesystem::path& db_path);

// Tabular interchange: tab-separated, header "name<TAB>provenance<TAB>Group.Property...".
std::string export_tsv(const SpeciesDB& db, const CriteriaSchema& schema,
                       const std::vector<std::string>& only = {});
std::vector<SpeciesRecord> import_tsv(std::string_view text, const CriteriaSchema& schema);

std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace lexsys
