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

#include "lexsys/error.hpp"

namespace lexsys {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnresolvedTarget: return "UnresolvedTarget";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::ClockSkew: return "ClockSkew";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::NothingToRelax: return "NothingToRelax";
    case ErrorCode::StoreError: return "StoreError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::BindError: return "BindError";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

SyntaxError::SyntaxError(const std::string& message, std::size_t line, std::size_t column,
                         std::string token)
    : Error(ErrorCode::SyntaxError,
            "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                message + " near '" + token + "'",
            token),
      line_(line),
      column_(column),
      token_(std::move(token)) {}

}  // namespace lexsys
