// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>

namespace quadri {

/// Worker count used by all data-parallel loops. Resolution order:
/// explicit set_worker_count, then QUADRI_WORKERS, then hardware concurrency.
unsigned worker_count();
void set_worker_count(unsigned workers);

/// Runs body(i) for i in [0, n_tasks) on the worker pool. Tasks are handed out
/// dynamically; callers that reduce must store per-task results and combine
/// them in task order so output does not depend on the worker count.
void parallel_for(std::int64_t n_tasks, const std::function<void(std::int64_t)>& body);

}  // namespace quadri
