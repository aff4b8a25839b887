#pragma once

#include <mutex>

namespace specbeam::detail {

/// FFTW's planner is a process-global resource and not thread-safe; every
/// fftw_plan_* / fftw_destroy_plan call must hold this lock. Execution via
/// the new-array interface needs no lock.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace specbeam::detail
