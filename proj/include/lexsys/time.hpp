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

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace lexsys {

/// UTC instant at millisecond resolution.
using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

/// Injectable time source; the service and CLI take one so runs can be replayed.
using Clock = std::function<Instant()>;

Instant system_now();
Clock system_clock();
Clock fixed_clock(Instant at);

/// Clock that starts at `start` and advances by `step` on every call.
Clock stepping_clock(Instant start, std::chrono::milliseconds step);

/// "2026-10-14T08:30:00.000Z"
std::string format_instant(Instant t);

/// Inverse of format_instant. Throws FormatError.
Instant parse_instant(std::string_view text);

}  // namespace lexsys
