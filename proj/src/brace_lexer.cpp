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

#include "brace_lexer.hpp"

#include "lexsys/error.hpp"
#include "lexsys/schema.hpp"

namespace lexsys::detail {

std::string strip_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    const bool last = nl == std::string_view::npos;
    std::string_view line = text.substr(pos, last ? std::string_view::npos : nl - pos);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] != '#') out.append(line);
    if (last) break;
    out.push_back('\n');
    pos = nl + 1;
  }
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1, column = 1;
  std::size_t i = 0;
  auto advance = [&](char c) {
    if (c == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(c);
      ++i;
      continue;
    }
    if (c == '}') throw SyntaxError("unbalanced '}'", line, column, "}");
    if (c != '{') {
      const auto end = text.find_first_of(" \t\r\n{}", i);
      throw SyntaxError("text outside braces", line, column,
                        std::string(text.substr(i, end == std::string_view::npos ? end : end - i)));
    }
    Token tok;
    tok.line = line;
    tok.column = column;
    advance(c);
    ++i;
    const std::size_t start = i;
    while (true) {
      if (i >= text.size()) {
        throw SyntaxError("unbalanced '{' (missing '}')", tok.line, tok.column,
                          "{" + std::string(text.substr(start, 40)));
      }
      const char d = text[i];
      if (d == '{') {
        throw SyntaxError("nested '{' inside a token", line, column,
                          "{" + std::string(text.substr(start, i - start)));
      }
      if (d == '}') break;
      advance(d);
      ++i;
    }
    tok.content = std::string(text.substr(start, i - start));
    advance('}');
    ++i;
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

std::optional<ListToken> split_list_token(const Token& tok) {
  const std::string_view body = detail::trim(tok.content);
  if (body.empty() || body.back() != ')') return std::nullopt;
  int depth = 0;
  std::size_t open = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 0;) {
    if (body[i] == ')') ++depth;
    if (body[i] == '(' && --depth == 0) {
      open = i;
      break;
    }
  }
  if (open == std::string_view::npos) {
    throw SyntaxError("unbalanced parentheses", tok.line, tok.column, tok.content);
  }
  ListToken out;
  out.name = std::string(detail::trim(body.substr(0, open)));
  const std::string_view inner = body.substr(open + 1, body.size() - open - 2);
  if (detail::trim(inner).empty()) {
    throw SyntaxError("empty option list", tok.line, tok.column, tok.content);
  }
  std::size_t pos = 0;
  while (true) {
    const auto bar = inner.find('|', pos);
    const auto item = detail::trim(inner.substr(pos, bar == std::string_view::npos ? bar : bar - pos));
    if (item.empty()) throw SyntaxError("empty option label", tok.line, tok.column, tok.content);
    out.items.emplace_back(item);
    if (bar == std::string_view::npos) break;
    pos = bar + 1;
  }
  return out;
}

void fail_at(const Token& tok, const std::string& message) {
  throw SyntaxError(message, tok.line, tok.column, tok.content);
}

}  // namespace lexsys::detail
