// Copyright 2026 The vld Authors
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
#pragma once

#include <cstddef>
#include <functional>

namespace vld {

/// Worker cap: VLD_THREADS if set to a positive integer, else the hardware
/// concurrency (at least 1).
int worker_count();

/// Calls f(i) for i in [0, n). The range is cut into fixed chunks that do
/// not depend on the worker count, so any per-index result is identical
/// for every thread setting. f must not write shared state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace vld
