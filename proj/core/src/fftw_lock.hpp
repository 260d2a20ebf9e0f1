#pragma once

#include <mutex>

namespace toalab::detail {

// FFTW planning is not thread-safe; every plan create/destroy takes this lock.
std::mutex& fftw_plan_mutex();

}  // namespace toalab::detail
