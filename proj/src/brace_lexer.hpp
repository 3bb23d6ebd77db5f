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

// Tokenizer for the brace document syntax shared by schema and criteria files.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexsys::detail {

struct Token {
  std::string content;  // raw text between the braces
  std::size_t line = 0;
  std::size_t column = 0;
};

/// Blanks out lines whose first non-blank character is '#', keeping line numbers.
std::string strip_comments(std::string_view text);

/// Throws SyntaxError on unbalanced or nested braces and stray text.
std::vector<Token> tokenize(std::string_view text);

struct ListToken {
  std::string name;
  std::vector<std::string> items;  // trimmed, non-empty
};

/// Splits "Name(a|b|c)"; Name may contain balanced parentheses. Returns
/// nullopt when the token does not end in ')'.
std::optional<ListToken> split_list_token(const Token& tok);

[[noreturn]] void fail_at(const Token& tok, const std::string& message);

}  // namespace lexsys::detail
