// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mutex>

namespace quadri::detail {

// FFTW's planner is not thread safe; plan creation and destruction share this lock.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace quadri::detail
