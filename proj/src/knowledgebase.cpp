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

#include "lexsys/knowledgebase.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lexsys/error.hpp"
#include "text_util.hpp"

namespace lexsys {

namespace {

constexpr std::string_view kMagic = "lexsys-db 1";

Error invalid(const std::string& message) { return Error(ErrorCode::ValidationError, message); }

void check_key_text(std::string_view what, std::string_view s) {
  if (s.empty()) throw invalid(std::string(what) + " is empty");
  if (detail::trim(s) != s) throw invalid(std::string(what) + " '" + std::string(s) + "' has surrounding whitespace");
  if (s.find_first_of("\t\r\n") != std::string_view::npos) {
    throw invalid(std::string(what) + " contains a control character");
  }
}

bool resolves(const SpeciesDB& db, const CriteriaSchema& schema, const std::string& target) {
  return db.species.contains(target) || schema.find(target) != nullptr;
}

}  // namespace

std::string_view to_string(ChangeAction a) {
  switch (a) {
    case ChangeAction::Upsert: return "upsert";
    case ChangeAction::Remove: return "remove";
    case ChangeAction::Note: return "note";
    case ChangeAction::Reference: return "reference";
    case ChangeAction::StagedUpsert: return "staged-upsert";
    case ChangeAction::StagedNote: return "staged-note";
  }
  return "upsert";
}

ChangeAction change_action_from_string(std::string_view s) {
  for (auto a : {ChangeAction::Upsert, ChangeAction::Remove, ChangeAction::Note,
                 ChangeAction::Reference, ChangeAction::StagedUpsert, ChangeAction::StagedNote}) {
    if (to_string(a) == s) return a;
  }
  throw Error(ErrorCode::FormatError, "unknown change action '" + std::string(s) + "'");
}

AttributeValue SpeciesRecord::value_or_missing(const std::string& qualified,
                                               PropertyKind kind) const {
  if (auto it = attributes.find(qualified); it != attributes.end()) return it->second;
  if (kind == PropertyKind::Ordinal) return OrdinalRange{};
  return CategorySet{};
}

const SpeciesRecord* SpeciesDB::find(std::string_view name) const {
  auto it = species.find(std::string(name));
  return it == species.end() ? nullptr : &it->second;
}

const SpeciesRecord& SpeciesDB::get(std::string_view name) const {
  if (const auto* r = find(name)) return *r;
  throw Error(ErrorCode::NotFound, "unknown species '" + std::string(name) + "'");
}

std::vector<std::string> SpeciesDB::names() const {
  std::vector<std::string> out;
  out.reserve(species.size());
  for (const auto& [name, _] : species) out.push_back(name);
  return out;
}

std::uint64_t SpeciesDB::revision_of(std::string_view name) const {
  std::uint64_t rev = 0;
  for (const auto& c : changelog) {
    if ((c.action == ChangeAction::Upsert || c.action == ChangeAction::Remove) && c.target == name) {
      rev = std::max(rev, c.seq);
    }
  }
  return rev;
}

std::uint64_t SpeciesDB::next_seq() const {
  return changelog.empty() ? 1 : changelog.back().seq + 1;
}

void validate_record(const SpeciesRecord& record, const CriteriaSchema& schema) {
  check_key_text("species name", record.name);
  for (const auto& [key, value] : record.attributes) {
    const PropertyRef* ref = schema.find(key);
    if (!ref) {
      throw invalid("species '" + record.name + "': unknown property '" + key + "'");
    }
    const Property& prop = schema.property(*ref);
    const auto where = "species '" + record.name + "', " + key + ": ";
    if (const auto* range = std::get_if<OrdinalRange>(&value)) {
      if (prop.kind != PropertyKind::Ordinal) {
        throw Error(ErrorCode::KindMismatch, where + "range on a categorical property");
      }
      for (const auto& bound : {range->lo, range->hi}) {
        if (bound && *bound >= prop.size()) throw invalid(where + "option index out of range");
      }
      if (range->lo && range->hi && *range->lo > *range->hi) throw invalid(where + "lo > hi");
    } else {
      const auto& set = std::get<CategorySet>(value);
      if (prop.kind != PropertyKind::Categorical) {
        throw Error(ErrorCode::KindMismatch, where + "category set on an ordinal property");
      }
      if (!set.members.empty() && *set.members.rbegin() >= prop.size()) {
        throw invalid(where + "option index out of range");
      }
    }
  }
}

void validate_db(const SpeciesDB& db, const CriteriaSchema& schema) {
  if (db.schema_version != schema.version()) {
    throw Error(ErrorCode::SchemaMismatch, "database schema version '" + db.schema_version +
                                               "' does not match schema '" + schema.version() + "'");
  }
  for (const auto& [name, record] : db.species) {
    if (name != record.name) throw invalid("species key '" + name + "' differs from record name");
    validate_record(record, schema);
  }
  std::set<std::string_view> ids;
  for (const auto& ref : db.references) {
    check_key_text("reference id", ref.id);
    if (!ids.insert(ref.id).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate reference id '" + ref.id + "'");
    }
  }
}

SpeciesDB empty_db(const CriteriaSchema& schema) {
  SpeciesDB db;
  db.schema_version = schema.version();
  return db;
}

namespace {

std::string record_diff(const CriteriaSchema& schema, const SpeciesRecord* before,
                        const SpeciesRecord& after) {
  std::vector<std::string> parts;
  if (!before) parts.push_back("created");
  for (const auto& ref : schema.properties()) {
    const Property& prop = schema.property(ref);
    const AttributeValue* old_value = nullptr;
    if (before) {
      if (auto it = before->attributes.find(ref.qualified); it != before->attributes.end()) {
        old_value = &it->second;
      }
    }
    const AttributeValue* new_value = nullptr;
    if (auto it = after.attributes.find(ref.qualified); it != after.attributes.end()) {
      new_value = &it->second;
    }
    if (old_value && new_value) {
      if (!(*old_value == *new_value)) {
        parts.push_back("~" + ref.qualified + ": " + format_value(prop, *old_value) + " -> " +
                        format_value(prop, *new_value));
      }
    } else if (new_value) {
      parts.push_back("+" + ref.qualified + "=" + format_value(prop, *new_value));
    } else if (old_value) {
      parts.push_back("-" + ref.qualified);
    }
  }
  if (before && before->provenance != after.provenance) parts.push_back("~provenance");
  if (parts.empty()) parts.push_back("unchanged");
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

void append_change(SpeciesDB& db, ChangeAction action, std::string target, std::string diff,
                   std::string payload, const ChangeContext& ctx) {
  ChangeEntry entry;
  entry.seq = db.next_seq();
  entry.timestamp = ctx.now;
  entry.author = ctx.author;
  entry.action = action;
  entry.target = std::move(target);
  entry.diff = std::move(diff);
  entry.payload = std::move(payload);
  db.changelog.push_back(std::move(entry));
}

}  // namespace

SpeciesDB upsert_species(SpeciesDB db, const CriteriaSchema& schema, SpeciesRecord record,
                         const ChangeContext& ctx) {
  validate_record(record, schema);
  const SpeciesRecord* before = db.find(record.name);
  std::string diff = record_diff(schema, before, record);
  std::string name = record.name;
  db.species.insert_or_assign(name, std::move(record));
  append_change(db, ChangeAction::Upsert, name, std::move(diff), {}, ctx);
  return db;
}

SpeciesDB remove_species(SpeciesDB db, std::string_view name, const ChangeContext& ctx) {
  auto it = db.species.find(std::string(name));
  if (it == db.species.end()) {
    throw Error(ErrorCode::NotFound, "unknown species '" + std::string(name) + "'");
  }
  db.species.erase(it);
  append_change(db, ChangeAction::Remove, std::string(name), "removed", {}, ctx);
  return db;
}

SpeciesDB add_note(SpeciesDB db, const CriteriaSchema& schema, NoteEntry note,
                   const ChangeContext& ctx) {
  if (!resolves(db, schema, note.target)) {
    throw Error(ErrorCode::UnresolvedTarget,
                "note target '" + note.target + "' is neither a species nor a property");
  }
  if (note.author.empty()) throw invalid("note author is empty");
  std::string target = note.target;
  std::string author = note.author;
  db.notes.push_back(std::move(note));
  append_change(db, ChangeAction::Note, std::move(target), "note by " + author, {}, ctx);
  return db;
}

SpeciesDB add_reference(SpeciesDB db, const CriteriaSchema& schema, ReferenceEntry entry,
                        const ChangeContext& ctx) {
  check_key_text("reference id", entry.id);
  for (const auto& ref : db.references) {
    if (ref.id == entry.id) {
      throw Error(ErrorCode::DuplicateId, "reference id '" + entry.id + "' already exists");
    }
  }
  for (const auto& tag : entry.tags) {
    if (!resolves(db, schema, tag)) {
      throw Error(ErrorCode::UnresolvedTarget,
                  "reference tag '" + tag + "' is neither a species nor a property");
    }
  }
  std::string id = entry.id;
  db.references.push_back(std::move(entry));
  append_change(db, ChangeAction::Reference, std::move(id), "reference added", {}, ctx);
  return db;
}

std::vector<ReferenceEntry> list_references(const SpeciesDB& db,
                                            const std::optional<std::string>& tag) {
  std::vector<ReferenceEntry> out;
  for (const auto& ref : db.references) {
    if (!tag || ref.tags.contains(*tag)) out.push_back(ref);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

SpeciesDB stage_change(SpeciesDB db, ChangeAction action, std::string target, std::string diff,
                       std::string payload, const ChangeContext& ctx) {
  append_change(db, action, std::move(target), std::move(diff), std::move(payload), ctx);
  return db;
}

// ---------------------------------------------------------------------------
// Value text

std::string render_value(const Property& property, const AttributeValue& value) {
  if (const auto* range = std::get_if<OrdinalRange>(&value)) {
    if (!range->lo && !range->hi) return "(missing)";
    auto bound = [&](const std::optional<std::size_t>& b) {
      return b ? property.label(*b) : std::string("?");
    };
    if (range->lo && range->hi && *range->lo == *range->hi) return property.label(*range->lo);
    return bound(range->lo) + ".." + bound(range->hi);
  }
  const auto& set = std::get<CategorySet>(value);
  if (set.members.empty()) return "(none)";
  std::string out;
  for (auto m : set.members) {
    if (!out.empty()) out += " | ";
    out += property.label(m);
  }
  return out;
}

std::string format_value(const Property& property, const AttributeValue& value) {
  if (const auto* range = std::get_if<OrdinalRange>(&value)) {
    std::string out;
    if (range->lo) out += property.label(*range->lo);
    out += "..";
    if (range->hi) out += property.label(*range->hi);
    return out;
  }
  std::string out;
  for (auto m : std::get<CategorySet>(value).members) {
    if (!out.empty()) out += " | ";
    out += property.label(m);
  }
  return out;
}

namespace {

std::size_t label_index(const Property& property, std::string_view label) {
  if (auto i = property.index_of(label)) return *i;
  throw Error(ErrorCode::SchemaMismatch,
              "unknown option '" + std::string(label) + "' for property '" + property.name + "'");
}

}  // namespace

AttributeValue parse_value(const Property& property, std::string_view text) {
  text = detail::trim(text);
  if (property.kind == PropertyKind::Ordinal) {
    if (text.find('|') != std::string_view::npos) {
      throw Error(ErrorCode::KindMismatch,
                  "ordinal property '" + property.name + "' takes a range lo..hi, not a set");
    }
    OrdinalRange range;
    const auto sep = text.find("..");
    if (sep == std::string_view::npos) {
      if (text.empty()) return range;
      range.lo = range.hi = label_index(property, text);
      return range;
    }
    const auto lo = detail::trim(text.substr(0, sep));
    const auto hi = detail::trim(text.substr(sep + 2));
    if (!lo.empty()) range.lo = label_index(property, lo);
    if (!hi.empty()) range.hi = label_index(property, hi);
    return range;
  }
  CategorySet set;
  if (text.empty()) return set;
  for (const auto& label : split(text, '|')) {
    const auto trimmed = detail::trim(label);
    if (!property.index_of(trimmed) && text.find("..") != std::string_view::npos) {
      throw Error(ErrorCode::KindMismatch,
                  "categorical property '" + property.name + "' takes a set a|b, not a range");
    }
    set.members.insert(label_index(property, trimmed));
  }
  return set;
}

// ---------------------------------------------------------------------------
// Database text format

std::string serialize_db(const SpeciesDB& db, const CriteriaSchema& schema) {
  std::string out;
  out += kMagic;
  out += "\nschema-version: " + escape_text(db.schema_version) + "\n";
  for (const auto& [name, record] : db.species) {
    out += "\n[species " + name + "]\n";
    if (record.provenance) out += "provenance: " + escape_text(*record.provenance) + "\n";
    for (const auto& ref : schema.properties()) {
      auto it = record.attributes.find(ref.qualified);
      if (it == record.attributes.end()) continue;
      const std::string value = format_value(schema.property(ref), it->second);
      out += ref.qualified + " =" + (value.empty() ? "" : " " + value) + "\n";
    }
  }
  for (const auto& ref : db.references) {
    out += "\n[reference " + ref.id + "]\n";
    out += "citation: " + escape_text(ref.citation) + "\n";
    for (const auto& tag : ref.tags) out += "tag: " + tag + "\n";
  }
  for (const auto& note : db.notes) {
    out += "\n[note]\n";
    out += "author: " + escape_text(note.author) + "\n";
    out += "target: " + note.target + "\n";
    out += "timestamp: " + format_instant(note.timestamp) + "\n";
    out += "body: " + escape_text(note.body) + "\n";
  }
  return out;
}

SpeciesDB parse_db(std::string_view text, const CriteriaSchema& schema) {
  SpeciesDB db;
  enum class Block { Header, Species, Reference, Note } block = Block::Header;
  SpeciesRecord* record = nullptr;
  ReferenceEntry* reference = nullptr;
  NoteEntry* note = nullptr;
  bool saw_magic = false, saw_version = false, note_has_time = false;
  std::size_t line_no = 0;

  auto format_error = [&](const std::string& message) {
    return Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": " + message);
  };
  // Free-text fields are escaped; names (target, tag) are stored verbatim.
  auto raw_field = [&](std::string_view line, std::string_view key) -> std::optional<std::string_view> {
    if (line.size() < key.size() + 1 || line.substr(0, key.size()) != key ||
        line[key.size()] != ':') {
      return std::nullopt;
    }
    std::string_view rest = line.substr(key.size() + 1);
    if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    return rest;
  };
  auto field = [&](std::string_view line, std::string_view key) -> std::optional<std::string> {
    if (auto rest = raw_field(line, key)) return unescape_text(*rest);
    return std::nullopt;
  };
  auto finish_note = [&] {
    if (note && !note_has_time) throw format_error("note without timestamp");
  };

  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    const std::string_view line = raw;
    const std::string_view trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;

    if (!saw_magic) {
      if (trimmed != kMagic) throw format_error("expected '" + std::string(kMagic) + "' header");
      saw_magic = true;
      continue;
    }
    if (trimmed.front() == '[' && trimmed.back() == ']') {
      finish_note();
      record = nullptr;
      reference = nullptr;
      note = nullptr;
      const std::string_view inner = trimmed.substr(1, trimmed.size() - 2);
      if (inner.starts_with("species ")) {
        const std::string name(detail::trim(inner.substr(8)));
        if (name.empty()) throw format_error("species block without a name");
        if (db.species.contains(name)) throw format_error("duplicate species '" + name + "'");
        record = &db.species[name];
        record->name = name;
        block = Block::Species;
      } else if (inner.starts_with("reference ")) {
        db.references.push_back(ReferenceEntry{std::string(detail::trim(inner.substr(10))), {}, {}});
        reference = &db.references.back();
        block = Block::Reference;
      } else if (inner == "note") {
        db.notes.emplace_back();
        note = &db.notes.back();
        note_has_time = false;
        block = Block::Note;
      } else {
        throw format_error("unknown block '" + std::string(trimmed) + "'");
      }
      continue;
    }

    switch (block) {
      case Block::Header: {
        auto v = field(line, "schema-version");
        if (!v) throw format_error("unexpected line before first block");
        db.schema_version = *v;
        saw_version = true;
        break;
      }
      case Block::Species: {
        if (auto v = field(line, "provenance")) {
          record->provenance = *v;
          break;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw format_error("expected 'Group.Property = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const PropertyRef* ref = schema.find(key);
        if (!ref) {
          throw Error(ErrorCode::SchemaMismatch, "line " + std::to_string(line_no) +
                                                     ": unknown property '" + key + "' in species '" +
                                                     record->name + "'",
                      key);
        }
        if (record->attributes.contains(key)) throw format_error("duplicate attribute '" + key + "'");
        record->attributes.emplace(key, parse_value(schema.property(*ref), line.substr(eq + 1)));
        break;
      }
      case Block::Reference: {
        if (auto v = field(line, "citation")) {
          reference->citation = *v;
        } else if (auto t = raw_field(line, "tag")) {
          reference->tags.insert(std::string(detail::trim(*t)));
        } else {
          throw format_error("expected 'citation:' or 'tag:'");
        }
        break;
      }
      case Block::Note: {
        if (auto v = field(line, "author")) {
          note->author = *v;
        } else if (auto t = raw_field(line, "target")) {
          note->target = std::string(detail::trim(*t));
        } else if (auto ts = raw_field(line, "timestamp")) {
          note->timestamp = parse_instant(detail::trim(*ts));
          note_has_time = true;
        } else if (auto b = field(line, "body")) {
          note->body = *b;
        } else {
          throw format_error("expected 'author:', 'target:', 'timestamp:' or 'body:'");
        }
        break;
      }
    }
  }
  finish_note();
  if (!saw_magic) throw Error(ErrorCode::FormatError, "empty database file");
  if (!saw_version) throw Error(ErrorCode::FormatError, "missing schema-version");
  validate_db(db, schema);
  return db;
}

std::string serialize_changelog(const std::vector<ChangeEntry>& log) {
  std::string out;
  for (const auto& c : log) {
    nlohmann::ordered_json j;
    j["seq"] = c.seq;
    j["timestamp"] = format_instant(c.timestamp);
    j["author"] = c.author;
    j["action"] = to_string(c.action);
    j["target"] = c.target;
    j["diff"] = c.diff;
    if (!c.payload.empty()) j["payload"] = c.payload;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<ChangeEntry> parse_changelog(std::string_view text) {
  std::vector<ChangeEntry> log;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ChangeEntry c;
      c.seq = j.at("seq").get<std::uint64_t>();
      c.timestamp = parse_instant(j.at("timestamp").get<std::string>());
      c.author = j.at("author").get<std::string>();
      c.action = change_action_from_string(j.at("action").get<std::string>());
      c.target = j.at("target").get<std::string>();
      c.diff = j.at("diff").get<std::string>();
      c.payload = j.value("payload", std::string{});
      if (!log.empty() && c.seq <= log.back().seq) {
        throw Error(ErrorCode::FormatError, "change-log sequence is not increasing");
      }
      log.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::FormatError,
                  "change log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return log;
}

std::filesystem::path changelog_path(const std::filesystem::path& db_path) {
  auto p = db_path;
  p += ".changes";
  return p;
}

SpeciesDB load_db(const std::filesystem::path& path, const CriteriaSchema& schema) {
  SpeciesDB db = parse_db(read_file(path), schema);
  const auto log_path = changelog_path(path);
  if (std::filesystem::exists(log_path)) db.changelog = parse_changelog(read_file(log_path));
  return db;
}

void save_db(const SpeciesDB& db, const CriteriaSchema& schema, const std::filesystem::path& path) {
  validate_db(db, schema);
  write_file_atomic(path, serialize_db(db, schema));
  write_file_atomic(changelog_path(path), serialize_changelog(db.changelog));
}

// ---------------------------------------------------------------------------
// Tabular interchange

std::string export_tsv(const SpeciesDB& db, const CriteriaSchema& schema,
                       const std::vector<std::string>& only) {
  std::string out = "name\tprovenance";
  for (const auto& ref : schema.properties()) out += "\t" + ref.qualified;
  out += '\n';
  auto row = [&](const SpeciesRecord& record) {
    out += record.name;
    out += '\t';
    if (record.provenance) out += escape_text(*record.provenance);
    for (const auto& ref : schema.properties()) {
      out += '\t';
      auto it = record.attributes.find(ref.qualified);
      if (it == record.attributes.end()) continue;
      const std::string value = format_value(schema.property(ref), it->second);
      // "a | b" -> "a|b"; spaces inside labels stay
      std::string compact;
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (value.compare(i, 3, " | ") == 0) {
          compact += '|';
          i += 2;
        } else {
          compact += value[i];
        }
      }
      out += compact;
    }
    out += '\n';
  };
  if (only.empty()) {
    for (const auto& [_, record] : db.species) row(record);
  } else {
    for (const auto& name : only) row(db.get(name));
  }
  return out;
}

std::vector<SpeciesRecord> import_tsv(std::string_view text, const CriteriaSchema& schema) {
  std::vector<SpeciesRecord> records;
  std::vector<const PropertyRef*> columns;
  int provenance_col = -1;
  bool header = true;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto cells = split(line, '\t');
    if (header) {
      if (cells.empty() || cells[0] != "name") {
        throw Error(ErrorCode::FormatError, "tabular header must start with 'name'");
      }
      for (std::size_t c = 1; c < cells.size(); ++c) {
        if (cells[c] == "provenance") {
          provenance_col = int(c);
          columns.push_back(nullptr);
          continue;
        }
        const PropertyRef* ref = schema.find(cells[c]);
        if (!ref) {
          throw Error(ErrorCode::SchemaMismatch,
                      "unknown property column '" + std::string(cells[c]) + "'",
                      std::string(cells[c]));
        }
        columns.push_back(ref);
      }
      header = false;
      continue;
    }
    if (cells.size() != columns.size() + 1) {
      throw Error(ErrorCode::FormatError,
                  "row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(columns.size() + 1));
    }
    SpeciesRecord record;
    record.name = std::string(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (int(c) == provenance_col) {
        if (!cells[c].empty()) record.provenance = unescape_text(cells[c]);
        continue;
      }
      if (cells[c].empty()) continue;
      const PropertyRef* ref = columns[c - 1];
      record.attributes.emplace(ref->qualified, parse_value(schema.property(*ref), cells[c]));
    }
    validate_record(record, schema);
    records.push_back(std::move(record));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Files

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot replace '" + path.string() + "': " + ec.message());
}

}  // namespace lexsys
