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

#include "lexsys/schema.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "lexsys/error.hpp"
#include "brace_lexer.hpp"
#include "schema_rules.hpp"

namespace lexsys {

std::string_view to_string(Polarity p) {
  return p == Polarity::Positive ? "positive" : "negative";
}

std::string_view to_string(PropertyKind k) {
  return k == PropertyKind::Ordinal ? "ordinal" : "categorical";
}

std::optional<std::size_t> Property::index_of(std::string_view label) const {
  for (const auto& opt : scale) {
    if (opt.label == label) return opt.index;
  }
  return std::nullopt;
}

bool Property::is_wildcard(std::size_t index) const {
  return std::binary_search(wildcard_labels.begin(), wildcard_labels.end(), index);
}

namespace detail {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool balanced_parens(std::string_view s) {
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')' && --depth < 0) return false;
  }
  return depth == 0;
}

namespace {

std::optional<std::string> common_text_rule(std::string_view what, std::string_view s) {
  if (s.empty()) return std::string(what) + " is empty";
  if (trim(s) != s) return std::string(what) + " has surrounding whitespace";
  if (s.find_first_of("{}|\t\r\n") != std::string_view::npos) {
    return std::string(what) + " contains a reserved character";
  }
  if (!balanced_parens(s)) return std::string(what) + " has unbalanced parentheses";
  return std::nullopt;
}

}  // namespace

std::optional<std::string> check_group_name(std::string_view name) {
  if (auto e = common_text_rule("group name", name)) return e;
  if (name.find_first_of(".=") != std::string_view::npos) {
    return "group name may not contain '.' or '='";
  }
  if (name.front() == '/' || name.front() == '#' || name.front() == '[') {
    return "group name may not start with '/', '#' or '['";
  }
  if (name.back() == ')') return "group name may not end with ')'";
  return std::nullopt;
}

std::optional<std::string> check_property_name(std::string_view name) {
  if (auto e = common_text_rule("property name", name)) return e;
  if (name.find('=') != std::string_view::npos) return "property name may not contain '='";
  if (name.front() == '#' || name.front() == '[') {
    return "property name may not start with '#' or '['";
  }
  return std::nullopt;
}

std::optional<std::string> check_label(std::string_view label) {
  return common_text_rule("option label", label);
}

std::optional<std::string> check_ordinal_label(std::string_view label) {
  if (label.find("..") != std::string_view::npos || label.front() == '.' ||
      label.back() == '.') {
    return "ordinal option label may not contain '..' or start/end with '.'";
  }
  return std::nullopt;
}

}  // namespace detail

CriteriaSchema::CriteriaSchema(std::string version, std::vector<Group> groups,
                               std::vector<std::string> wildcard_vocabulary)
    : version_(std::move(version)),
      groups_(std::move(groups)),
      wildcards_(std::move(wildcard_vocabulary)) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::ValidationError, "invalid schema: " + what);
  };
  if (auto e = detail::check_label(version_)) fail("version tag: " + *e);
  std::set<std::string_view> vocab;
  for (const auto& w : wildcards_) {
    if (auto e = detail::check_label(w)) fail("wildcard '" + w + "': " + *e);
    if (!vocab.insert(w).second) fail("duplicate wildcard label '" + w + "'");
  }
  if (groups_.empty()) fail("no groups");

  std::set<std::string_view> group_names;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    Group& group = groups_[g];
    if (auto e = detail::check_group_name(group.name)) fail("'" + group.name + "': " + *e);
    if (!group_names.insert(group.name).second) fail("duplicate group '" + group.name + "'");
    if (group.properties.empty()) fail("group '" + group.name + "' has no properties");

    std::set<std::string_view> prop_names;
    for (std::size_t p = 0; p < group.properties.size(); ++p) {
      Property& prop = group.properties[p];
      const std::string qualified = group.name + "." + prop.name;
      if (auto e = detail::check_property_name(prop.name)) fail("'" + qualified + "': " + *e);
      if (!prop_names.insert(prop.name).second) fail("duplicate property '" + qualified + "'");
      if (prop.scale.empty()) fail("'" + qualified + "' has an empty scale");

      std::set<std::string_view> labels;
      prop.wildcard_labels.clear();
      for (std::size_t i = 0; i < prop.scale.size(); ++i) {
        OptionLabel& opt = prop.scale[i];
        opt.index = i;
        if (auto e = detail::check_label(opt.label)) fail("'" + qualified + "': " + *e);
        if (prop.kind == PropertyKind::Ordinal) {
          if (auto e = detail::check_ordinal_label(opt.label)) fail("'" + qualified + "': " + *e);
        }
        if (!labels.insert(opt.label).second) {
          fail("duplicate option '" + opt.label + "' in '" + qualified + "'");
        }
        if (vocab.contains(opt.label)) prop.wildcard_labels.push_back(i);
      }

      const std::size_t position = refs_.size();
      by_name_.emplace(qualified, position);
      refs_.push_back(PropertyRef{g, p, position, qualified});
    }
  }
}

const PropertyRef* CriteriaSchema::find(std::string_view qualified_name) const {
  auto it = by_name_.find(qualified_name);
  return it == by_name_.end() ? nullptr : &refs_[it->second];
}

std::vector<std::string> CriteriaSchema::suggestions(std::string_view qualified_name,
                                                     std::size_t max_distance) const {
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& ref : refs_) {
    const auto d = edit_distance(qualified_name, ref.qualified);
    if (d <= max_distance) scored.emplace_back(d, ref.qualified);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  for (auto& s : scored) out.push_back(std::move(s.second));
  return out;
}

const PropertyRef& CriteriaSchema::resolve(std::string_view qualified_name) const {
  if (const auto* ref = find(qualified_name)) return *ref;
  std::string detail;
  for (const auto& s : suggestions(qualified_name)) {
    detail += detail.empty() ? "did you mean: " : ", ";
    detail += s;
  }
  throw Error(ErrorCode::NotFound, "unknown property '" + std::string(qualified_name) + "'",
              detail);
}

const Property& CriteriaSchema::lookup_property(std::string_view qualified_name) const {
  return property(resolve(qualified_name));
}

const Property& CriteriaSchema::property(const PropertyRef& ref) const {
  return groups_.at(ref.group).properties.at(ref.property);
}

const Group& CriteriaSchema::group(const PropertyRef& ref) const { return groups_.at(ref.group); }

bool CriteriaSchema::operator==(const CriteriaSchema& other) const {
  return version_ == other.version_ && groups_ == other.groups_ &&
         wildcards_ == other.wildcards_;
}

const Property& lookup_property(const CriteriaSchema& schema, std::string_view qualified_name) {
  return schema.lookup_property(qualified_name);
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// ---------------------------------------------------------------------------
// Parsing


using detail::fail_at;
using detail::split_list_token;
using detail::Token;

CriteriaSchema parse_schema(std::string_view text) {
  const std::string cleaned = detail::strip_comments(text);
  const std::vector<Token> tokens = detail::tokenize(cleaned);
  if (tokens.empty()) throw SyntaxError("empty document", 1, 1, "");

  std::size_t i = 0;
  if (detail::trim(tokens[i].content) != "Select") fail_at(tokens[i], "expected {Select}");
  ++i;

  std::vector<Group> groups;
  std::vector<const Token*> group_tokens;
  std::map<std::string, const Token*> property_tokens;
  bool closed = false;
  for (; i < tokens.size(); ++i) {
    const Token& tok = tokens[i];
    const std::string_view body = detail::trim(tok.content);
    if (body == "/Select") {
      closed = true;
      ++i;
      break;
    }
    if (auto list = split_list_token(tok)) {
      if (groups.empty()) fail_at(tok, "property before any group");
      Group& group = groups.back();
      if (auto e = detail::check_property_name(list->name)) fail_at(tok, *e);
      for (const auto& p : group.properties) {
        if (p.name == list->name) fail_at(tok, "duplicate property name '" + list->name + "'");
      }
      Property prop;
      prop.name = list->name;
      std::set<std::string> seen;
      for (auto& label : list->items) {
        if (auto e = detail::check_label(label)) fail_at(tok, *e + " ('" + label + "')");
        if (!seen.insert(label).second) fail_at(tok, "duplicate option label '" + label + "'");
        prop.scale.push_back(OptionLabel{std::move(label), prop.scale.size()});
      }
      property_tokens[group.name + "." + prop.name] = &tok;
      group.properties.push_back(std::move(prop));
      continue;
    }
    if (!groups.empty() && groups.back().properties.empty()) {
      fail_at(*group_tokens.back(), "group has no properties");
    }
    const std::string name(body);
    if (auto e = detail::check_group_name(name)) fail_at(tok, *e);
    for (const auto& g : groups) {
      if (g.name == name) fail_at(tok, "duplicate group name '" + name + "'");
    }
    groups.push_back(Group{name, Polarity::Positive, {}});
    group_tokens.push_back(&tok);
  }
  if (!closed) {
    const Token& last = tokens.back();
    fail_at(last, "missing {/Select}");
  }
  if (groups.empty()) fail_at(tokens[i - 1], "no groups in {Select}");
  if (groups.back().properties.empty()) fail_at(*group_tokens.back(), "group has no properties");

  std::string version = "untagged";
  std::vector<std::string> wildcards = CriteriaSchema::kDefaultWildcards;

  if (i < tokens.size()) {
    if (detail::trim(tokens[i].content) != "Schema") {
      fail_at(tokens[i], "unexpected token after {/Select}");
    }
    const Token& open = tokens[i];
    ++i;
    wildcards.clear();
    bool have_version = false, have_wildcard = false, have_negative = false, have_ordinal = false;
    bool schema_closed = false;
    for (; i < tokens.size(); ++i) {
      const Token& tok = tokens[i];
      if (detail::trim(tok.content) == "/Schema") {
        schema_closed = true;
        ++i;
        break;
      }
      auto list = split_list_token(tok);
      if (!list) fail_at(tok, "expected Key(values) inside {Schema}");
      auto once = [&](bool& flag) {
        if (flag) fail_at(tok, "duplicate {" + list->name + "} entry");
        flag = true;
      };
      if (list->name == "Version") {
        once(have_version);
        if (list->items.size() != 1) fail_at(tok, "Version takes exactly one value");
        if (auto e = detail::check_label(list->items[0])) fail_at(tok, *e);
        version = list->items[0];
      } else if (list->name == "Wildcard") {
        once(have_wildcard);
        for (const auto& w : list->items) {
          if (auto e = detail::check_label(w)) fail_at(tok, *e);
          if (std::find(wildcards.begin(), wildcards.end(), w) != wildcards.end()) {
            fail_at(tok, "duplicate wildcard '" + w + "'");
          }
          wildcards.push_back(w);
        }
      } else if (list->name == "Negative") {
        once(have_negative);
        for (const auto& name : list->items) {
          auto it = std::find_if(groups.begin(), groups.end(),
                                 [&](const Group& g) { return g.name == name; });
          if (it == groups.end()) fail_at(tok, "unknown group '" + name + "'");
          if (it->polarity == Polarity::Negative) fail_at(tok, "group '" + name + "' listed twice");
          it->polarity = Polarity::Negative;
        }
      } else if (list->name == "Ordinal") {
        once(have_ordinal);
        for (const auto& qualified : list->items) {
          const auto dot = qualified.find('.');
          Property* found = nullptr;
          if (dot != std::string::npos) {
            for (auto& g : groups) {
              if (g.name != qualified.substr(0, dot)) continue;
              for (auto& p : g.properties) {
                if (p.name == qualified.substr(dot + 1)) found = &p;
              }
            }
          }
          if (!found) fail_at(tok, "unknown property '" + qualified + "'");
          if (found->kind == PropertyKind::Ordinal) {
            fail_at(tok, "property '" + qualified + "' listed twice");
          }
          found->kind = PropertyKind::Ordinal;
          for (const auto& opt : found->scale) {
            if (auto e = detail::check_ordinal_label(opt.label)) {
              fail_at(*property_tokens.at(qualified), *e + " ('" + opt.label + "')");
            }
          }
        }
      } else {
        fail_at(tok, "unknown {Schema} entry '" + list->name + "'");
      }
    }
    if (!schema_closed) fail_at(open, "missing {/Schema}");
    if (i < tokens.size()) fail_at(tokens[i], "unexpected token after {/Schema}");
  }

  try {
    return CriteriaSchema(std::move(version), std::move(groups), std::move(wildcards));
  } catch (const Error& e) {
    // Every rule is checked above with a source position; this is a backstop.
    throw SyntaxError(e.what(), 1, 1, "");
  }
}

std::string serialize_schema(const CriteriaSchema& schema) {
  std::string out = "{Select}\n";
  for (const auto& group : schema.groups()) {
    out += "  {" + group.name + "}\n";
    for (const auto& prop : group.properties) {
      out += "    {" + prop.name + "(";
      for (std::size_t i = 0; i < prop.scale.size(); ++i) {
        if (i) out += '|';
        out += prop.scale[i].label;
      }
      out += ")}\n";
    }
  }
  out += "{/Select}\n{Schema}\n";
  out += "  {Version(" + schema.version() + ")}\n";

  auto emit_list = [&out](std::string_view key, const std::vector<std::string>& items) {
    if (items.empty()) return;
    out += "  {";
    out += key;
    out += '(';
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += '|';
      out += items[i];
    }
    out += ")}\n";
  };
  emit_list("Wildcard", schema.wildcard_vocabulary());

  std::vector<std::string> negative, ordinal;
  for (const auto& group : schema.groups()) {
    if (group.polarity == Polarity::Negative) negative.push_back(group.name);
    for (const auto& prop : group.properties) {
      if (prop.kind == PropertyKind::Ordinal) ordinal.push_back(group.name + "." + prop.name);
    }
  }
  emit_list("Negative", negative);
  emit_list("Ordinal", ordinal);
  out += "{/Schema}\n";
  return out;
}

const CriteriaSchema& default_schema() {
  static const CriteriaSchema schema = parse_schema(default_schema_text());
  return schema;
}

}  // namespace lexsys
