#pragma once

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstdlib>
#include <mutex>
#include <vector>

#include "dpl/error.hpp"

namespace dpl::fft {

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline int& thread_count() {
  static int n = [] {
    const char* env = std::getenv("DPL_THREADS");
    int v = env ? std::atoi(env) : 1;
    return v > 0 ? v : 1;
  }();
  return n;
}

inline void ensure_threads_initialized() {
  static const bool ok = fftw_init_threads() != 0;
  (void)ok;
}

}  // namespace detail

/// Caps the number of threads used by subsequent transforms.
inline void set_threads(int n) {
  std::lock_guard lock(detail::planner_mutex());
  detail::thread_count() = n > 0 ? n : 1;
}

inline int threads() { return detail::thread_count(); }

// In-place unnormalized 3D DFT of every component of an interleaved
// N-component field on an n^3 grid, x index fastest.
// sign = FFTW_BACKWARD computes sum f e^{+ik.x}; FFTW_FORWARD uses e^{-ik.x}.
template <std::size_t N>
void transform(std::vector<std::array<std::complex<double>, N>>& data, int n, int sign) {
  if (data.size() != std::size_t(n) * n * n) throw DomainError("fft: buffer size does not match grid");
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  const int dims[3] = {n, n, n};
  fftw_plan plan;
  {
    std::lock_guard lock(detail::planner_mutex());
    detail::ensure_threads_initialized();
    fftw_plan_with_nthreads(detail::thread_count());
    plan = fftw_plan_many_dft(3, dims, int(N), ptr, nullptr, int(N), 1, ptr, nullptr, int(N), 1, sign,
                              FFTW_ESTIMATE);
  }
  if (!plan) throw Error("fft: planner failed");
  fftw_execute(plan);
  std::lock_guard lock(detail::planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace dpl::fft
