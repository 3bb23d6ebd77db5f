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

// Criteria taxonomy: groups of properties, each with an ordered option scale.
//
// Text format (brace syntax, one token per {...}):
//
//   {Select}
//     {Group name}
//       {Property name(option|option|...)}
//   {/Select}
//   {Schema}                      optional metadata block
//     {Version(tag)}
//     {Wildcard(label|label)}
//     {Negative(Group name|...)}
//     {Ordinal(Group.Property|...)}
//   {/Schema}
//
// Lines whose first non-blank character is '#' are comments. Without a
// {Schema} block the version is "untagged", every group is positive, every
// property is categorical and the wildcard labels are "Any one" and
// "Not relevant".

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexsys {

enum class Polarity { Positive, Negative };
enum class PropertyKind { Ordinal, Categorical };

std::string_view to_string(Polarity p);
std::string_view to_string(PropertyKind k);

struct OptionLabel {
  std::string label;
  std::size_t index = 0;

  bool operator==(const OptionLabel&) const = default;
};

struct Property {
  std::string name;
  PropertyKind kind = PropertyKind::Categorical;
  std::vector<OptionLabel> scale;
  // Indices into scale, ascending. Derived from the schema's wildcard vocabulary.
  std::vector<std::size_t> wildcard_labels;

  std::optional<std::size_t> index_of(std::string_view label) const;
  bool is_wildcard(std::size_t index) const;
  const std::string& label(std::size_t index) const { return scale.at(index).label; }
  std::size_t size() const { return scale.size(); }

  bool operator==(const Property&) const = default;
};

struct Group {
  std::string name;
  Polarity polarity = Polarity::Positive;
  std::vector<Property> properties;

  bool operator==(const Group&) const = default;
};

/// A property addressed by its position in the schema.
struct PropertyRef {
  std::size_t group = 0;
  std::size_t property = 0;
  std::size_t position = 0;  // rank in document order over all properties
  std::string qualified;     // "Group.Property"
};

/// Immutable, validated taxonomy.
class CriteriaSchema {
 public:
  static inline const std::vector<std::string> kDefaultWildcards = {"Any one", "Not relevant"};

  /// Validates and indexes. Throws ValidationError when an invariant fails.
  /// Each property's wildcard_labels is recomputed from `wildcard_vocabulary`
  /// and each OptionLabel::index is renumbered to its position.
  CriteriaSchema(std::string version, std::vector<Group> groups,
                 std::vector<std::string> wildcard_vocabulary = kDefaultWildcards);

  const std::string& version() const { return version_; }
  const std::vector<Group>& groups() const { return groups_; }
  const std::vector<std::string>& wildcard_vocabulary() const { return wildcards_; }

  /// All properties in document order.
  const std::vector<PropertyRef>& properties() const { return refs_; }
  std::size_t property_count() const { return refs_.size(); }

  const PropertyRef* find(std::string_view qualified_name) const;

  /// Throws NotFound listing names within edit distance 2.
  const PropertyRef& resolve(std::string_view qualified_name) const;
  const Property& lookup_property(std::string_view qualified_name) const;

  const Property& property(const PropertyRef& ref) const;
  const Group& group(const PropertyRef& ref) const;

  /// Qualified names within edit distance `max_distance`, closest first.
  std::vector<std::string> suggestions(std::string_view qualified_name,
                                       std::size_t max_distance = 2) const;

  bool operator==(const CriteriaSchema& other) const;

 private:
  std::string version_;
  std::vector<Group> groups_;
  std::vector<std::string> wildcards_;
  std::vector<PropertyRef> refs_;
  std::map<std::string, std::size_t, std::less<>> by_name_;
};

/// Throws SyntaxError (with line/column and offending token) on malformed input.
CriteriaSchema parse_schema(std::string_view text);

std::string serialize_schema(const CriteriaSchema& schema);

/// Free function form of CriteriaSchema::lookup_property.
const Property& lookup_property(const CriteriaSchema& schema, std::string_view qualified_name);

/// The shipped default taxonomy, embedded at build time.
std::string_view default_schema_text();
const CriteriaSchema& default_schema();

std::size_t edit_distance(std::string_view a, std::string_view b);

namespace detail {
// Lexical rules shared with the other text formats.
std::string_view trim(std::string_view s);
bool balanced_parens(std::string_view s);
}  // namespace detail

}  // namespace lexsys
