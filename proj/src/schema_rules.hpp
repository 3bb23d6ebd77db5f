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

#pragma once

#include <optional>
#include <string>
#include <string_view>

// Lexical constraints on names and labels. Each returns a description of the
// violated rule, or nullopt.
namespace lexsys::detail {

std::optional<std::string> check_group_name(std::string_view name);
std::optional<std::string> check_property_name(std::string_view name);
std::optional<std::string> check_label(std::string_view label);
std::optional<std::string> check_ordinal_label(std::string_view label);

}  // namespace lexsys::detail
