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

// AVX2 row kernels. This translation unit is compiled with -mavx2 and is only
// entered after the dispatcher has confirmed CPU support.

#include <immintrin.h>

#include "cfdr/kernels.hpp"

namespace cfdr::kernels {
namespace {

inline __m256d iota4(std::size_t base) {
  const double b = static_cast<double>(base);
  return _mm256_setr_pd(b, b + 1.0, b + 2.0, b + 3.0);
}

bool any_mean_below_avx2(const double* outside_prefix, std::size_t n,
                         double inside, double threshold,
                         std::size_t first_size) {
  const __m256d vin = _mm256_set1_pd(inside);
  const __m256d vthr = _mm256_set1_pd(threshold);
  const __m256d four = _mm256_set1_pd(4.0);
  __m256d denom = iota4(first_size);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d sum = _mm256_add_pd(vin, _mm256_loadu_pd(outside_prefix + j));
    const __m256d mean = _mm256_div_pd(sum, denom);
    if (_mm256_movemask_pd(_mm256_cmp_pd(vthr, mean, _CMP_GT_OQ)) != 0) {
      return true;
    }
    denom = _mm256_add_pd(denom, four);
  }
  for (; j < n; ++j) {
    const double mean = (inside + outside_prefix[j]) /
                        static_cast<double>(first_size + j);
    if (threshold > mean) return true;
  }
  return false;
}

double max_ratio_avx2(const double* outside_prefix, std::size_t n,
                      double inside, double fdp, std::size_t first_size) {
  const __m256d vin = _mm256_set1_pd(inside);
  const __m256d vfdp = _mm256_set1_pd(fdp);
  const __m256d four = _mm256_set1_pd(4.0);
  __m256d denom = iota4(first_size);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d sum = _mm256_add_pd(vin, _mm256_loadu_pd(outside_prefix + j));
    const __m256d mean = _mm256_div_pd(sum, denom);
    acc = _mm256_max_pd(acc, _mm256_div_pd(vfdp, mean));
    denom = _mm256_add_pd(denom, four);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double best = lanes[0];
  for (int l = 1; l < 4; ++l) {
    if (lanes[l] > best) best = lanes[l];
  }
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
const RowKernels kAvx2{any_mean_below_avx2, max_ratio_avx2};
}  // namespace detail

}  // namespace cfdr::kernels
