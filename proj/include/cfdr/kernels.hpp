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

#pragma once

// Row kernels for the worst-case-mean table.
//
// For a top-k candidate and a fixed overlap r, the closed procedures scan
// one row of the table
//
//     mean_j = (inside + outside_prefix[j]) / (first_size + j),  j = 0..n-1
//
// where `inside` is the sum of the r smallest values in the candidate and
// outside_prefix[j] sums the j smallest values outside it. Every variant
// evaluates exactly that expression per cell (one add, one divide, no
// reassociation), so all of them are bit-identical to the scalar reference.

#include <cstddef>
#include <string_view>
#include <vector>

namespace cfdr::kernels {

enum class Isa { scalar, avx2, neon };

struct RowKernels {
  /// True iff threshold > mean_j for some j in [0, n).
  bool (*any_mean_below)(const double* outside_prefix, std::size_t n,
                         double inside, double threshold,
                         std::size_t first_size);
  /// max_j fdp / mean_j (fdp > 0, so a zero mean gives +inf). Returns 0 for
  /// n == 0.
  double (*max_ratio)(const double* outside_prefix, std::size_t n,
                      double inside, double fdp, std::size_t first_size);
};

std::string_view isa_name(Isa isa) noexcept;

/// Compiled in and supported by the running CPU.
bool isa_supported(Isa isa) noexcept;
std::vector<Isa> supported_isas();

/// Throws std::invalid_argument if the ISA is not supported.
const RowKernels& kernels_for(Isa isa);

/// Best supported ISA, chosen once per process. The environment variable
/// CLOSURE_FDR_ISA (scalar|avx2|neon) overrides the choice when supported.
Isa active_isa() noexcept;
const RowKernels& active() noexcept;

namespace detail {
extern const RowKernels kScalar;
#if defined(CFDR_HAVE_AVX2)
extern const RowKernels kAvx2;
#endif
#if defined(CFDR_HAVE_NEON)
extern const RowKernels kNeon;
#endif
}  // namespace detail

}  // namespace cfdr::kernels
