// Copyright 2026 The capnmpc Authors
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

#ifndef CAPNMPC__PARALLEL_HPP_
#define CAPNMPC__PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace capnmpc {

/// Worker count from CAPNMPC_THREADS (0 or unset = hardware concurrency).
std::size_t thread_count();

/// Runs body(begin, end) over disjoint contiguous chunks of [0, n). Every
/// index is visited exactly once; callers must only write per-index outputs.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)> & body);

}  // namespace capnmpc

#endif  // CAPNMPC__PARALLEL_HPP_
