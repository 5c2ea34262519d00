/*
 * Copyright (c) 2026 The FGMP Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fgmp/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace fgmp {

unsigned default_threads()
{
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char *env = std::getenv("FGMP_THREADS");
  if (env == nullptr)
    return hw;
  unsigned requested = 0;
  const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), requested);
  if (ec != std::errc{} || requested == 0)
    return hw;
  return std::min(requested, hw);
}

} // namespace fgmp
