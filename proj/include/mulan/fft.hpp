// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_FFT_HPP
#define MULAN_FFT_HPP

#include <fftw3.h>

#include <mutex>

#include "mulan/types.hpp"

namespace mulan {
namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Smallest 2^a 3^b 5^c >= n; FFTW is fast at smooth sizes.
inline int next_fast_size(int n) {
  if (n < 1) return 1;
  for (int candidate = n;; ++candidate) {
    int rest = candidate;
    for (int p : {2, 3, 5})
      while (rest % p == 0) rest /= p;
    if (rest == 1) return candidate;
  }
}

/// Forward real-to-complex transform, n/2+1 bins, unnormalized.
inline ComplexVector rfft(const RealVector& in) {
  const int n = static_cast<int>(in.size());
  RealVector buf = in;
  ComplexVector out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, buf.data(),
                                reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw numeric_error("rfft: fftw planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

/// Inverse transform of rfft output back to n real samples, 1/n normalized.
inline RealVector irfft(const ComplexVector& in, int n) {
  if (in.size() != n / 2 + 1) throw config_error("irfft: bin count does not match length");
  ComplexVector buf = in;  // c2r destroys its input
  RealVector out(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(buf.data()), out.data(),
                                FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw numeric_error("irfft: fftw planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  out /= static_cast<double>(n);
  return out;
}

}  // namespace detail
}  // namespace mulan

#endif  // MULAN_FFT_HPP
