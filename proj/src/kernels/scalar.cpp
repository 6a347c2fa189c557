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

// Reference implementations. The vector variants must match these bit for
// bit.

#include "cfdr/kernels.hpp"

namespace cfdr::kernels {
namespace {

bool any_mean_below_scalar(const double* outside_prefix, std::size_t n,
                           double inside, double threshold,
                           std::size_t first_size) {
  for (std::size_t j = 0; j < n; ++j) {
    const double mean = (inside + outside_prefix[j]) /
                        static_cast<double>(first_size + j);
    if (threshold > mean) return true;
  }
  return false;
}

double max_ratio_scalar(const double* outside_prefix, std::size_t n,
                        double inside, double fdp, std::size_t first_size) {
  double best = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double mean = (inside + outside_prefix[j]) /
                        static_cast<double>(first_size + j);
    const double ratio = fdp / mean;
    if (ratio > best) best = ratio;
  }
  return best;
}

}  // namespace

namespace detail {
const RowKernels kScalar{any_mean_below_scalar, max_ratio_scalar};
}  // namespace detail

}  // namespace cfdr::kernels
