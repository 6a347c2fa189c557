// Copyright 2026 The closure-fdr Authors.
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

// NEON row kernels (AArch64 only; NEON is part of the base ISA there).

#include <arm_neon.h>

#include "cfdr/kernels.hpp"

namespace cfdr::kernels {
namespace {

inline float64x2_t iota2(std::size_t base) {
  const double b = static_cast<double>(base);
  const double lanes[2] = {b, b + 1.0};
  return vld1q_f64(lanes);
}

bool any_mean_below_neon(const double* outside_prefix, std::size_t n,
                         double inside, double threshold,
                         std::size_t first_size) {
  const float64x2_t vin = vdupq_n_f64(inside);
  const float64x2_t vthr = vdupq_n_f64(threshold);
  const float64x2_t two = vdupq_n_f64(2.0);
  float64x2_t denom = iota2(first_size);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t sum = vaddq_f64(vin, vld1q_f64(outside_prefix + j));
    const float64x2_t mean = vdivq_f64(sum, denom);
    if (vmaxvq_u32(vreinterpretq_u32_u64(vcgtq_f64(vthr, mean))) != 0) {
      return true;
    }
    denom = vaddq_f64(denom, two);
  }
  for (; j < n; ++j) {
    const double mean = (inside + outside_prefix[j]) /
                        static_cast<double>(first_size + j);
    if (threshold > mean) return true;
  }
  return false;
}

double max_ratio_neon(const double* outside_prefix, std::size_t n,
                      double inside, double fdp, std::size_t first_size) {
  const float64x2_t vin = vdupq_n_f64(inside);
  const float64x2_t vfdp = vdupq_n_f64(fdp);
  const float64x2_t two = vdupq_n_f64(2.0);
  float64x2_t denom = iota2(first_size);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t sum = vaddq_f64(vin, vld1q_f64(outside_prefix + j));
    const float64x2_t mean = vdivq_f64(sum, denom);
    acc = vmaxq_f64(acc, vdivq_f64(vfdp, mean));
    denom = vaddq_f64(denom, two);
  }
  double best = vgetq_lane_f64(acc, 0);
  const double hi = vgetq_lane_f64(acc, 1);
  if (hi > best) best = hi;
  for (; j < n; ++j) {
    const double mean = (inside + outside_prefix[j]) /
                        static_cast<double>(first_size + j);
    const double ratio = fdp / mean;
    if (ratio > best) best = ratio;
  }
  return best;
}

}  // namespace

namespace detail {
const RowKernels kNeon{any_mean_below_neon, max_ratio_neon};
}  // namespace detail

}  // namespace cfdr::kernels
