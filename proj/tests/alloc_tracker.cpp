// tests/alloc_tracker.cpp

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

// Interposes the glibc allocation entry points so a test binary can
// bound its own peak heap growth. Tracking is off until started; while
// on, every live allocation's usable size feeds a current/peak pair.
// Forwarding goes straight to the __libc_* symbols, so no dlsym
// bootstrap is needed.

#include <malloc.h>

#include <atomic>
#include <cerrno>
#include <cstddef>

extern "C" {
void* __libc_malloc(size_t size);
void __libc_free(void* ptr);
void* __libc_calloc(size_t count, size_t size);
void* __libc_realloc(void* ptr, size_t size);
void* __libc_memalign(size_t alignment, size_t size);
}

namespace {

std::atomic<bool> g_tracking{false};
std::atomic<long long> g_current{0};
std::atomic<long long> g_peak{0};

void track_add(void* ptr) {
  if (ptr == nullptr || !g_tracking.load(std::memory_order_relaxed)) return;
  const long long bytes = static_cast<long long>(malloc_usable_size(ptr));
  const long long now = g_current.fetch_add(bytes, std::memory_order_relaxed) + bytes;
  long long peak = g_peak.load(std::memory_order_relaxed);
  while (now > peak &&
         !g_peak.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
  }
}

void track_drop(void* ptr) {
  if (ptr == nullptr || !g_tracking.load(std::memory_order_relaxed)) return;
  g_current.fetch_sub(static_cast<long long>(malloc_usable_size(ptr)),
                      std::memory_order_relaxed);
}

}  // namespace

extern "C" {

void alloc_tracker_start() {
  g_current.store(0);
  g_peak.store(0);
  g_tracking.store(true);
}

long long alloc_tracker_stop() {
  g_tracking.store(false);
  return g_peak.load();
}

void* malloc(size_t size) {
  void* ptr = __libc_malloc(size);
  track_add(ptr);
  return ptr;
}

void free(void* ptr) {
  track_drop(ptr);
  __libc_free(ptr);
}

void* calloc(size_t count, size_t size) {
  void* ptr = __libc_calloc(count, size);
  track_add(ptr);
  return ptr;
}

void* realloc(void* ptr, size_t size) {
  track_drop(ptr);
  void* out = __libc_realloc(ptr, size);
  if (out == nullptr && size != 0) {
    track_add(ptr);  // grow failed; the old block is still live
    return nullptr;
  }
  track_add(out);
  return out;
}

void* memalign(size_t alignment, size_t size) {
  void* ptr = __libc_memalign(alignment, size);
  track_add(ptr);
  return ptr;
}

void* aligned_alloc(size_t alignment, size_t size) {
  void* ptr = __libc_memalign(alignment, size);
  track_add(ptr);
  return ptr;
}

int posix_memalign(void** out, size_t alignment, size_t size) {
  if (alignment % sizeof(void*) != 0 || (alignment & (alignment - 1)) != 0) {
    return EINVAL;
  }
  void* ptr = __libc_memalign(alignment, size);
  if (ptr == nullptr) return ENOMEM;
  track_add(ptr);
  *out = ptr;
  return 0;
}

}  // extern "C"
