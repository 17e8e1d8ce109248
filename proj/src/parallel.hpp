// src/parallel.hpp

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

#ifndef DIRSEP_PARALLEL_HPP
#define DIRSEP_PARALLEL_HPP

#include <functional>
#include <thread>
#include <vector>

namespace dirsep {

// Process-wide worker count. 1 (the default) means fully sequential
// execution; results must not depend on the setting beyond summation
// order, and loops parallelized here write disjoint outputs so they
// are bitwise reproducible at any thread count.
void set_num_threads(int n);
int num_threads();

// Runs fn(i) for i in [begin, end). Splits the range over worker
// threads when more than one is configured and the range is worth it.
void parallel_for(int begin, int end, const std::function<void(int)>& fn);

}  // namespace dirsep

#endif  // DIRSEP_PARALLEL_HPP
