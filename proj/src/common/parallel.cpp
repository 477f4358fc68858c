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

#include "capnmpc/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace capnmpc {

std::size_t thread_count()
{
  std::size_t requested = 0;
  if (const char * env = std::getenv("CAPNMPC_THREADS")) {
    try {
      requested = static_cast<std::size_t>(std::stoul(env));
    } catch (const std::exception &) {
      requested = 0;
    }
  }
  if (requested == 0) {
    requested = std::max(1u, std::thread::hardware_concurrency());
  }
  return requested;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)> & body)
{
  constexpr std::size_t kMinChunk = 64;
  const std::size_t workers = std::min(thread_count(), std::max<std::size_t>(1, n / kMinChunk));
  if (workers <= 1) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](std::size_t w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    try {
      if (begin < end) {
        body(begin, end);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    pool.emplace_back(run, w);
  }
  run(0);
  for (auto & t : pool) {
    t.join();
  }
  // lowest chunk wins so the surfaced error does not depend on scheduling
  for (const auto & e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

}  // namespace capnmpc
