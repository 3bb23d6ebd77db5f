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

#include "lexsys/time.hpp"

#include <charconv>
#include <cstdio>
#include <memory>
#include <mutex>

#include "lexsys/error.hpp"

namespace lexsys {

using namespace std::chrono;

Instant system_now() { return floor<milliseconds>(std::chrono::system_clock::now()); }

Clock system_clock() { return [] { return system_now(); }; }

Clock fixed_clock(Instant at) {
  return [at] { return at; };
}

Clock stepping_clock(Instant start, milliseconds step) {
  struct State {
    std::mutex mu;
    Instant next;
  };
  auto state = std::make_shared<State>();
  state->next = start;
  return [state, step] {
    std::lock_guard lock(state->mu);
    Instant now = state->next;
    state->next += step;
    return now;
  };
}

std::string format_instant(Instant t) {
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss tod{t - day};
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lld.%03lldZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), long(tod.hours().count()),
                long(tod.minutes().count()), static_cast<long long>(tod.seconds().count()),
                static_cast<long long>(tod.subseconds().count()));
  return buf;
}

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  if (pos + len > text.size()) throw Error(ErrorCode::FormatError, "truncated timestamp");
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
  if (ec != std::errc{} || ptr != text.data() + pos + len) {
    throw Error(ErrorCode::FormatError, "malformed timestamp '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Instant parse_instant(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS(.mmm)?Z
  auto bad = [&] {
    return Error(ErrorCode::FormatError, "malformed timestamp '" + std::string(text) + "'");
  };
  if (text.size() < 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':' || text.back() != 'Z') {
    throw bad();
  }
  const int y = read_int(text, 0, 4);
  const int mo = read_int(text, 5, 2);
  const int d = read_int(text, 8, 2);
  const int h = read_int(text, 11, 2);
  const int mi = read_int(text, 14, 2);
  const int s = read_int(text, 17, 2);
  int ms = 0;
  if (text.size() == 24 && text[19] == '.') {
    ms = read_int(text, 20, 3);
  } else if (text.size() != 20) {
    throw bad();
  }
  const year_month_day ymd{year{y}, month{unsigned(mo)}, day{unsigned(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) throw bad();
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
}

}  // namespace lexsys
