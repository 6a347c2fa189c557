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

// Runtime ISA selection. No intrinsics in this file.

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "cfdr/kernels.hpp"

namespace cfdr::kernels {

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(CFDR_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(CFDR_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (isa_supported(isa)) out.push_back(isa);
  }
  return out;
}

const RowKernels& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("ISA not available: " +
                                std::string(isa_name(isa)));
  }
  switch (isa) {
#if defined(CFDR_HAVE_AVX2)
    case Isa::avx2:
      return detail::kAvx2;
#endif
#if defined(CFDR_HAVE_NEON)
    case Isa::neon:
      return detail::kNeon;
#endif
    default:
      return detail::kScalar;
  }
}

namespace {

Isa choose_isa() noexcept {
  if (const char* env = std::getenv("CLOSURE_FDR_ISA")) {
    const std::string_view want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa) && isa_supported(isa)) return isa;
    }
  }
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

}  // namespace

Isa active_isa() noexcept {
  static const Isa chosen = choose_isa();
  return chosen;
}

const RowKernels& active() noexcept {
  static const RowKernels& k = kernels_for(active_isa());
  return k;
}

}  // namespace cfdr::kernels
