// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace roadbev {

// Runs fn(begin, end) over disjoint chunks of [0, n). threads <= 0 picks the
// hardware concurrency. Chunks never overlap, so callers that write only to
// their own slice get output independent of the thread count. An exception
// from a worker is rethrown on the calling thread (first chunk in range
// order wins).
inline void parallel_for(std::int64_t n, int threads,
                         const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  int t = threads > 0 ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  t = std::max<std::int64_t>(1, std::min<std::int64_t>(t, n));
  if (t == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
  pool.reserve(static_cast<std::size_t>(t));
  const std::int64_t chunk = (n + t - 1) / t;
  for (int i = 0; i < t; ++i) {
    const std::int64_t begin = i * chunk;
    const std::int64_t end = std::min<std::int64_t>(begin + chunk, n);
    if (begin >= end) break;
    pool.emplace_back([&fn, &errors, i, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace roadbev
