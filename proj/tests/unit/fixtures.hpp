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

// Shared helpers for the unit suites.

#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include "lexsys/knowledgebase.hpp"
#include "lexsys/schema.hpp"
#include "lexsys/time.hpp"

namespace lexsys::testing {

inline std::filesystem::path data_dir() { return LEXSYS_DATA_DIR; }

inline const SpeciesDB& sample_db() {
  static const SpeciesDB db = load_db(data_dir() / "sample.db", default_schema());
  return db;
}

inline Instant at_ms(long long ms) { return Instant(std::chrono::milliseconds(ms)); }

/// Fresh directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("lexsys-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace lexsys::testing
