// src/parallel.cpp

// Copyright 2026 dirsep authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>

namespace dirsep {

namespace {
std::atomic<int> g_num_threads{1};
}

void set_num_threads(int n) {
  if (n < 1) n = 1;
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw > 0) n = std::min(n, hw);
  g_num_threads.store(n);
}

int num_threads() { return g_num_threads.load(); }

void parallel_for(int begin, int end, const std::function<void(int)>& fn) {
  int n = end - begin;
  if (n <= 0) return;
  int workers = std::min(num_threads(), n);
  if (workers <= 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mutex;
  std::atomic<int> next{begin};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= end) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace dirsep
