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

#include "lexsys/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "lexsys/error.hpp"
#include "lexsys/service.hpp"

namespace lexsys::cli {

namespace {

constexpr const char* kCriteriaHelp = R"(Criteria, repeatable. Each value is either a criteria file or one
inline pair Group.Property=value, where value is
  lo..hi      an ordinal window, e.g. Ecology.Precipitation=601-900..1201-1500
  label       a single option (a one-bin window on ordinal scales)
  a|b|c       categorical options, any of which may match
  Any one     a wildcard label, trivially satisfied
A criteria file uses the schema brace syntax:
  {Select}{Ecology}{Precipitation(601-900..901-1200)}{/Select})";

struct Options {
  std::string workspace;
  std::string schema;
  std::string db;
  std::string user;
  bool json = false;
};

WorkspacePaths paths_from(const Options& o) {
  WorkspacePaths p;
  if (!o.workspace.empty()) {
    p.root = o.workspace;
  } else if (const char* env = std::getenv("LEXSYS_WORKSPACE")) {
    p.root = env;
  }
  if (!o.schema.empty()) {
    p.schema = o.schema;
  } else if (std::filesystem::exists(p.root / "criteria.schema")) {
    p.schema = p.root / "criteria.schema";
  }
  if (!o.db.empty()) p.db = o.db;
  return p;
}

std::optional<std::string> user_of(const Options& o) {
  if (o.user.empty()) return std::nullopt;
  return o.user;
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::FormatError, "'" + path + "' is not valid JSON", e.what());
  }
}

SelectionQuery build_query(const CriteriaSchema& schema, const std::vector<std::string>& items,
                           const std::string& label) {
  SelectionQuery q;
  for (const auto& item : items) {
    if (item.find('=') == std::string::npos && std::filesystem::is_regular_file(item)) {
      auto doc = parse_criteria_document(schema, read_file(item));
      for (auto& c : doc.criteria) q.criteria.push_back(std::move(c));
    } else if (item.find('=') != std::string::npos) {
      q.criteria.push_back(parse_criterion(schema, item));
    } else {
      throw Error(ErrorCode::UsageError,
                  "criteria '" + item + "' is neither a file nor Group.Property=value");
    }
  }
  if (!label.empty()) q.label = label;
  return q;
}

// ---------------------------------------------------------------------------
// Text rendering of API bodies

std::string str(const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

void text_selection(std::ostream& out, const Json& r) {
  out << str(r["id"]) << "  " << r["matched_count"].get<std::size_t>() << " matched";
  const Json& q = r["query"];
  if (q.contains("label")) out << "  (" << str(q["label"]) << ")";
  out << "\n";
  if (q.contains("combined")) {
    out << "  " << str(q["combined"]["op"]) << " of";
    for (const auto& id : q["combined"]["operands"]) out << " " << str(id);
    out << "\n";
  }
  for (const auto& m : r["matched"]) out << "  " << str(m) << "\n";
}

void text_view(std::ostream& out, const Json& v) {
  out << str(v["name"]);
  if (!v["provenance"].is_null()) out << "  [" << str(v["provenance"]) << "]";
  out << "\n";
  for (const auto& a : v["attributes"]) {
    out << "  " << str(a["property"]) << ": " << str(a["text"]) << "\n";
  }
}

std::string text_request(const Json& c, const CriteriaSchema& schema) {
  const CriterionRequest r = request_from_json(c, schema);
  return r.property + " = " + render_request(schema.lookup_property(r.property), r.requested);
}

void text_why(std::ostream& out, const Json& w, const CriteriaSchema& schema) {
  const std::string species = str(w["species"]);
  const std::string id = str(w["selection"]);
  if (w["failures"].empty()) {
    out << species << " matches " << id << "\n";
    return;
  }
  out << species << " is not in " << id << ":\n";
  for (const auto& f : w["failures"]) {
    out << "  " << str(f["message"]) << "  (species: " << str(f["species_value"])
        << "; requested: " << str(f["requested"]) << ")\n";
  }
  if (!w["hints"].empty()) out << "hints:\n";
  for (const auto& h : w["hints"]) {
    out << "  drop " << str(h["criterion"]) << " -> " << h["resulting_size"].get<std::size_t>()
        << " matched" << (h["includes_species"].get<bool>() ? ", species included" : "") << "\n";
    if (!h["widened"].is_null()) {
      out << "  or widen to " << text_request(h["widened"], schema) << " -> "
          << h["widened_size"].get<std::size_t>() << " matched\n";
    }
  }
}

void text_schema(std::ostream& out, const Json& s) {
  out << "schema " << str(s["version"]) << ": " << s["groups"].size() << " groups, "
      << s["property_count"].get<std::size_t>() << " properties\n";
  for (const auto& g : s["groups"]) {
    out << str(g["name"]) << " (" << str(g["polarity"]) << ")\n";
    for (const auto& p : g["properties"]) {
      out << "  " << str(p["name"]) << " [" << str(p["kind"]) << "]:";
      bool first = true;
      for (const auto& o : p["options"]) {
        out << (first ? " " : " | ") << str(o);
        first = false;
      }
      out << "\n";
    }
  }
}

void text_list(std::ostream& out, const char* label, const Json& items) {
  out << label << ":";
  if (items.empty()) out << " (none)";
  for (std::size_t i = 0; i < items.size(); ++i) out << (i ? ", " : " ") << str(items[i]);
  out << "\n";
}

void emit_error(std::ostream& err, const Error& e, bool json) {
  if (json) {
    err << error_to_json(e).dump(2) << "\n";
    return;
  }
  err << "error[" << to_string(e.code()) << "]: " << e.what() << "\n";
  if (!e.detail().empty()) err << "  " << e.detail() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, const Context& ctx) {
  std::ostream& out = ctx.out ? *ctx.out : std::cout;
  std::ostream& err = ctx.err ? *ctx.err : std::cerr;

  CLI::App app{"lexsys: explainable species selection over a criteria taxonomy", "lexsys"};
  app.require_subcommand(1);
  Options o;
  app.add_option("-w,--workspace", o.workspace,
                 "Workspace directory (default: $LEXSYS_WORKSPACE or .)");
  app.add_option("--schema", o.schema,
                 "Schema file (default: <workspace>/criteria.schema, else built-in)");
  app.add_option("--db", o.db, "Database file (default: <workspace>/species.db)");
  app.add_option("-u,--user", o.user, "Bind the command to this user's profile");
  app.add_flag("--json", o.json, "Machine-readable JSON on stdout");

  auto* init = app.add_subcommand("init", "Create a workspace, optionally seeded from a database");
  std::string init_from;
  init->add_option("--from", init_from, "Database file to copy in")->check(CLI::ExistingFile);

  auto* validate = app.add_subcommand("validate", "Check a schema file and optionally a database");
  std::string v_schema, v_db;
  validate->add_option("schema", v_schema, "Schema file")->required();
  validate->add_option("db", v_db, "Database file");

  auto* schema_cmd = app.add_subcommand("schema", "Print the criteria taxonomy");

  auto* select = app.add_subcommand("select", "Run and save a selection");
  std::vector<std::string> criteria;
  std::string label;
  select->add_option("-c,--criteria", criteria, kCriteriaHelp);
  select->add_option("--label", label, "Label stored with the selection");

  auto* why = app.add_subcommand("why", "Explain why a species is not in a selection");
  std::string why_species, why_selection;
  std::size_t hints = 3;
  why->add_option("species", why_species, "Species name")->required();
  why->add_option("-s,--selection", why_selection, "Selection id")->required();
  why->add_option("--hints", hints, "Number of relaxation hints")->capture_default_str();

  auto* combine = app.add_subcommand("combine", "Combine saved selections");
  std::string op = "intersect";
  std::vector<std::string> operands;
  combine->add_option("--op", op, "intersect | union | difference")->capture_default_str();
  combine->add_option("ids", operands, "Selection ids")->required();

  auto* browse = app.add_subcommand("browse", "List species with labelled attributes");
  std::string prefix, property;
  browse->add_option("--prefix", prefix, "Species name prefix");
  browse->add_option("--property", property, "Show only this Group.Property");

  auto* show = app.add_subcommand("show", "One species with references and notes");
  std::string show_name;
  show->add_option("name", show_name, "Species name")->required();

  auto* upsert = app.add_subcommand("upsert", "Create or replace a species from a JSON record");
  std::string upsert_file;
  upsert->add_option("record", upsert_file, "Record JSON file")->required();

  auto* note = app.add_subcommand("note", "Attach a note to a species or property");
  std::string note_target, note_body, note_author;
  note->add_option("--target", note_target, "Species name or Group.Property")->required();
  note->add_option("--body", note_body, "Note text")->required();
  note->add_option("--author", note_author, "Author (default: --user)");

  auto* reference = app.add_subcommand("reference", "Bibliographic references");
  reference->require_subcommand(1);
  auto* ref_add = reference->add_subcommand("add", "Add a reference");
  std::string ref_id, ref_citation;
  std::vector<std::string> ref_tags;
  ref_add->add_option("--id", ref_id, "Reference id")->required();
  ref_add->add_option("--citation", ref_citation, "Citation text")->required();
  ref_add->add_option("--tag", ref_tags, "Species or Group.Property, repeatable");
  auto* ref_list = reference->add_subcommand("list", "List references by id");
  std::string ref_filter;
  ref_list->add_option("--tag", ref_filter, "Only references with this tag");

  auto* selections = app.add_subcommand("selections", "List saved selections or show one");
  std::string selection_id;
  selections->add_option("id", selection_id, "Selection id");

  auto* suggest = app.add_subcommand("suggest", "Suggestions from usage profiles");
  std::string suggest_what;
  std::optional<std::size_t> suggest_k;
  suggest->add_option("what", suggest_what, "criteria | species | referenced")
      ->required()
      ->check(CLI::IsMember({"criteria", "species", "referenced"}));
  suggest->add_option("-k,--k", suggest_k, "How many (defaults 3, 5, 10)");

  auto* sync = app.add_subcommand("sync", "Pull or push the user's local subset");
  std::string sync_direction;
  std::vector<std::string> sync_names, sync_records, sync_notes;
  sync->add_option("direction", sync_direction, "pull | push")
      ->required()
      ->check(CLI::IsMember({"pull", "push"}));
  sync->add_option("--names", sync_names, "Replace the subset with these species, repeatable");
  sync->add_option("--contribute", sync_records, "Record JSON file to propose, repeatable");
  sync->add_option("--note", sync_notes, "TARGET=TEXT note to propose, repeatable");

  auto* export_cmd = app.add_subcommand("export", "Tab-separated export of the database");
  std::string export_selection, export_output;
  export_cmd->add_option("--selection", export_selection, "Only species of this selection");
  export_cmd->add_option("-o,--output", export_output, "Write to a file instead of stdout");

  auto* import_cmd = app.add_subcommand("import", "Upsert every row of a tab-separated file");
  std::string import_file;
  import_cmd->add_option("file", import_file, "TSV file")->required();

  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
  std::string config_file, bind;
  std::optional<int> port;
  std::optional<std::size_t> threads;
  serve->add_option("--config", config_file, "JSON config file");
  serve->add_option("--bind", bind, "host, host:port or :port (also $LEXSYS_BIND)");
  serve->add_option("--port", port, "Port; 0 picks a free one");
  serve->add_option("--threads", threads, "Worker threads");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o_out, o_err;
    const int code = app.exit(e, o_out, o_err);
    out << o_out.str();
    err << o_err.str();
    return code == 0 ? kOk : kUsageError;
  }

  auto print = [&](const Json& body, const std::function<void()>& text) {
    if (o.json) {
      out << body.dump(2) << "\n";
    } else {
      text();
    }
  };

  try {
    if (validate->parsed()) {
      const CriteriaSchema schema = parse_schema(read_file(v_schema));
      Json body = {{"schema",
                    {{"version", schema.version()},
                     {"groups", schema.groups().size()},
                     {"properties", schema.property_count()}}},
                   {"db", nullptr}};
      if (!v_db.empty()) {
        const SpeciesDB db = load_db(v_db, schema);
        body["db"] = {{"species", db.species.size()},
                      {"references", db.references.size()},
                      {"notes", db.notes.size()},
                      {"changes", db.changelog.size()}};
      }
      print(body, [&] {
        out << "schema ok: " << schema.version() << ", " << schema.groups().size() << " groups, "
            << schema.property_count() << " properties\n";
        if (!body["db"].is_null()) {
          out << "db ok: " << body["db"]["species"] << " species, " << body["db"]["references"]
              << " references, " << body["db"]["notes"] << " notes, " << body["db"]["changes"]
              << " changes\n";
        }
      });
      return kOk;
    }

    if (serve->parsed()) {
      ServiceConfig config =
          load_service_config(config_file.empty() ? std::nullopt
                                                  : std::optional<std::filesystem::path>(config_file));
      // Flags override the config file; without a file the usual workspace defaults apply.
      const WorkspacePaths p = paths_from(o);
      if (!o.workspace.empty() || config_file.empty()) config.paths.root = p.root;
      if (!o.schema.empty() || (config_file.empty() && p.schema)) config.paths.schema = p.schema;
      if (!o.db.empty()) config.paths.db = p.db;
      if (!bind.empty()) apply_bind(config, bind);
      if (port) config.port = *port;
      if (threads) config.threads = *threads;
      Workspace ws(config.paths, ctx.clock);
      Server server(ws, config);
      const int actual = server.bind();
      err << "lexsys serving " << ws.paths().db_path().string() << " on http://" << config.host
          << ":" << actual << "\n";
      err.flush();
      server.listen();
      return kOk;
    }

    WorkspacePaths paths = paths_from(o);
    if (init->parsed()) {
      std::filesystem::create_directories(paths.root);
      if (std::filesystem::exists(paths.db_path())) {
        throw Error(ErrorCode::ValidationError,
                    "'" + paths.db_path().string() + "' already exists");
      }
      const auto schema = paths.schema ? parse_schema(read_file(*paths.schema)) : default_schema();
      const SpeciesDB db = init_from.empty() ? empty_db(schema) : load_db(init_from, schema);
      save_db(db, schema, paths.db_path());
      Workspace ws(paths, ctx.clock);
      const Json body = {{"workspace", paths.root.string()}, {"species", db.species.size()}};
      print(body, [&] {
        out << "initialized " << paths.root.string() << " with " << db.species.size()
            << " species\n";
      });
      return kOk;
    }

    Workspace ws(paths, ctx.clock);
    Api api(ws);
    const auto user = user_of(o);
    const CriteriaSchema& schema = ws.schema();

    if (schema_cmd->parsed()) {
      const Json body = api.schema();
      print(body, [&] { text_schema(out, body); });
    } else if (select->parsed()) {
      const Json body = api.select(build_query(schema, criteria, label), user);
      print(body, [&] { text_selection(out, body); });
    } else if (why->parsed()) {
      const Json body = api.why(why_selection, why_species, hints, user);
      print(body, [&] { text_why(out, body, schema); });
    } else if (combine->parsed()) {
      const Json body = api.combine(CombineSpec{operands, combine_op_from_string(op)}, user);
      print(body, [&] { text_selection(out, body); });
    } else if (browse->parsed()) {
      BrowseFilter filter;
      if (!prefix.empty()) filter.prefix = prefix;
      if (!property.empty()) filter.property = property;
      const Json body = api.list_species(filter);
      print(body, [&] {
        for (const auto& v : body["species"]) text_view(out, v);
      });
    } else if (show->parsed()) {
      const Json body = api.get_species(show_name);
      print(body, [&] {
        text_view(out, body);
        out << "revision " << body["revision"] << "\n";
        for (const auto& r : body["references"]) {
          out << "reference " << str(r["id"]) << ": " << str(r["citation"]) << "\n";
        }
        for (const auto& n : body["notes"]) {
          out << "note " << str(n["timestamp"]) << " " << str(n["author"]) << ": "
              << str(n["body"]) << "\n";
        }
      });
    } else if (upsert->parsed()) {
      const Json record = read_json_file(upsert_file);
      if (!record.is_object() || !record.contains("name") || !record["name"].is_string()) {
        throw Error(ErrorCode::ValidationError, "record needs a string 'name'");
      }
      const Json body = api.put_species(record["name"].get<std::string>(), record, user);
      print(body, [&] {
        out << "upserted " << str(body["record"]["name"]) << " (revision " << body["revision"]
            << "): " << str(body["change"]["diff"]) << "\n";
      });
    } else if (note->parsed()) {
      Json req = {{"target", note_target}, {"body", note_body}};
      if (!note_author.empty()) req["author"] = note_author;
      const Json body = api.add_note(req, user);
      print(body, [&] { out << "note added to " << str(body["target"]) << "\n"; });
    } else if (ref_add->parsed()) {
      Json req = {{"id", ref_id}, {"citation", ref_citation}, {"tags", ref_tags}};
      const Json body = api.add_reference(req, user);
      print(body, [&] { out << "reference " << str(body["id"]) << " added\n"; });
    } else if (ref_list->parsed()) {
      const Json body = api.list_references(ref_filter.empty() ? std::nullopt
                                                               : std::optional(ref_filter));
      print(body, [&] {
        for (const auto& r : body["references"]) {
          out << str(r["id"]) << "  " << str(r["citation"]);
          if (!r["tags"].empty()) text_list(out, "  tags", r["tags"]);
          else out << "\n";
        }
      });
    } else if (selections->parsed()) {
      if (selection_id.empty()) {
        const Json body = api.list_selections();
        print(body, [&] {
          for (const auto& m : body["selections"]) {
            out << str(m["id"]) << "  " << str(m["created_at"]) << "  "
                << m["matched_count"].get<std::size_t>() << " matched";
            if (!m["combined"].is_null()) {
              out << "  " << str(m["combined"]);
            } else {
              out << "  " << m["criteria_count"].get<std::size_t>() << " criteria";
            }
            if (!m["label"].is_null()) out << "  " << str(m["label"]);
            out << "\n";
          }
        });
      } else {
        const Json body = api.get_selection(selection_id);
        print(body, [&] {
          text_selection(out, body);
          for (const auto& c : body["query"]["criteria"]) {
            out << "  where " << text_request(c, schema) << "\n";
          }
        });
      }
    } else if (suggest->parsed()) {
      if (suggest_what == "criteria") {
        const Json body = api.suggest_criteria(user, suggest_k.value_or(3));
        print(body, [&] {
          for (const auto& c : body["criteria"]) out << text_request(c, schema) << "\n";
        });
      } else if (suggest_what == "species") {
        const Json body = api.suggest_species(user, suggest_k.value_or(5));
        print(body, [&] {
          for (const auto& s : body["species"]) out << str(s["name"]) << "  " << s["score"] << "\n";
        });
      } else {
        const Json body = api.most_referenced(suggest_k.value_or(10));
        print(body, [&] {
          for (const auto& s : body["species"]) out << str(s["name"]) << "  " << s["count"] << "\n";
        });
      }
    } else if (sync->parsed()) {
      if (!user) throw Error(ErrorCode::UsageError, "sync needs --user");
      Json req = {{"direction", sync_direction}};
      if (!sync_names.empty()) req["names"] = sync_names;
      if (!sync_records.empty() || !sync_notes.empty()) {
        Json species = Json::array();
        for (const auto& f : sync_records) species.push_back(read_json_file(f));
        Json notes = Json::array();
        for (const auto& n : sync_notes) {
          const auto eq = n.find('=');
          if (eq == std::string::npos) {
            throw Error(ErrorCode::UsageError, "--note expects TARGET=TEXT, got '" + n + "'");
          }
          notes.push_back({{"target", n.substr(0, eq)}, {"body", n.substr(eq + 1)}});
        }
        req["contributions"] = {{"species", std::move(species)}, {"notes", std::move(notes)}};
      }
      const Json body = api.sync(*user, req);
      print(body, [&] {
        out << str(body["direction"]) << "\n";
        text_list(out, "  applied", body["applied"]);
        text_list(out, "  staged", body["staged"]);
        text_list(out, "  conflicted", body["conflicted"]);
      });
    } else if (export_cmd->parsed()) {
      const Json body = api.export_tsv(export_selection.empty() ? std::nullopt
                                                                : std::optional(export_selection));
      if (!export_output.empty()) {
        write_file_atomic(export_output, body["content"].get<std::string>());
        print(body, [&] { out << "wrote " << export_output << "\n"; });
      } else {
        print(body, [&] { out << body["content"].get<std::string>(); });
      }
    } else if (import_cmd->parsed()) {
      const Json body = api.import_tsv(Json{{"content", read_file(import_file)}}, user);
      print(body, [&] { out << "imported " << body["imported"].size() << " species\n"; });
    }
    return kOk;
  } catch (const Error& e) {
    emit_error(err, e, o.json);
    return e.code() == ErrorCode::UsageError ? kUsageError : kDomainError;
  } catch (const std::filesystem::filesystem_error& e) {
    emit_error(err, Error(ErrorCode::IoError, e.what()), o.json);
    return kDomainError;
  }
}

}  // namespace lexsys::cli
