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

#ifndef FGMP_PARALLEL_HPP
#define FGMP_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace fgmp {

/// Worker count from FGMP_THREADS, capped by hardware concurrency; at least 1.
unsigned default_threads();

/// Runs fn(begin, end) over contiguous chunks of [0, n) on up to `threads` threads.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn &&fn)
{
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1u), n);
  if (workers <= 1)
  {
    if (n > 0)
      fn(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0, begin = 0; begin < n; ++w, begin += chunk)
      pool.emplace_back([&fn, &error = errors[w], begin, end = std::min(n, begin + chunk)] {
        try
        {
          fn(begin, end);
        }
        catch (...)
        {
          error = std::current_exception();
        }
      });
  }
  for (const auto &e : errors)
    if (e)
      std::rethrow_exception(e);
}

} // namespace fgmp

#endif // FGMP_PARALLEL_HPP
