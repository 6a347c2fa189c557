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

// Domain types shared by every procedure: validated value vectors, discovery
// sets, levels, and the error-metric family.
//
// Hypothesis indices are 0-based inside the library. Anything that faces a
// person (CLI output, CSV, JSON) converts to 1-based.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfdr {

/// Bitmask over hypotheses; bit i set means hypothesis i is in the subset.
using Mask = std::uint64_t;

/// Default ceiling on K for paths that materialise all 2^K subsets.
inline constexpr std::size_t kDefaultExplicitKMax = 20;

/// Thrown when an exhaustive path is asked to handle too many hypotheses.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an exact (non-statistical) invariant fails. Always a bug.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Target level alpha in (0, 1].
class Level {
 public:
  explicit Level(double alpha);
  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

/// K >= 1 finite nonnegative e-values.
class EValueVector {
 public:
  explicit EValueVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// K >= 1 p-values in [0, 1].
class PValueVector {
 public:
  explicit PValueVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// Compound e-values. Only nonnegativity is checked; the expected-sum
/// condition is distributional and is the caller's responsibility.
class CompoundEValueVector {
 public:
  explicit CompoundEValueVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// A rejection set R within [K].
class DiscoverySet {
 public:
  DiscoverySet() = default;
  /// `indices` may be unsorted; duplicates and out-of-range entries throw.
  DiscoverySet(std::size_t universe, std::vector<std::size_t> indices,
               std::optional<double> fdr_hat = std::nullopt);

  static DiscoverySet from_mask(std::size_t universe, Mask mask);

  std::size_t universe() const noexcept { return universe_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  std::vector<std::size_t> one_based() const;
  bool contains(std::size_t i) const;
  bool is_subset_of(const DiscoverySet& other) const;
  /// Requires universe() <= 64.
  Mask mask() const;

  std::optional<double> fdr_hat() const noexcept { return fdr_hat_; }
  void set_fdr_hat(double v) { fdr_hat_ = v; }

  /// Compares membership only; the diagnostic is ignored.
  friend bool operator==(const DiscoverySet& a, const DiscoverySet& b) {
    return a.universe_ == b.universe_ && a.indices_ == b.indices_;
  }

 private:
  std::size_t universe_ = 0;
  std::vector<std::size_t> indices_;
  std::optional<double> fdr_hat_;
};

/// The set of true nulls. Simulation and auditing only; procedures never
/// see it.
class TruthAssignment {
 public:
  TruthAssignment(std::size_t universe, std::vector<std::size_t> nulls);

  std::size_t universe() const noexcept { return universe_; }
  const std::vector<std::size_t>& nulls() const noexcept { return nulls_; }
  bool is_null(std::size_t i) const { return is_null_.at(i) != 0; }
  std::size_t num_nonnull() const noexcept { return universe_ - nulls_.size(); }

 private:
  std::size_t universe_;
  std::vector<std::size_t> nulls_;
  std::vector<char> is_null_;
};

/// Error metric F_A(R). Every built-in depends on R and A only through
/// |A ∩ R| and |R|, and is nondecreasing in |A ∩ R|.
class ErrorMetric {
 public:
  enum class Kind { fdp, kfwer, pfer, fdx };

  static ErrorMetric fdp() { return ErrorMetric(Kind::fdp, 0, 0.0); }
  static ErrorMetric kfwer(std::size_t k);
  static ErrorMetric pfer() { return ErrorMetric(Kind::pfer, 0, 0.0); }
  static ErrorMetric fdx(double gamma);

  /// Parses "fdp", "kfwer:K", "pfer", "fdx:G".
  static ErrorMetric parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  std::size_t k() const noexcept { return k_; }
  double gamma() const noexcept { return gamma_; }
  std::string name() const;

  /// F evaluated from the overlap |A ∩ R| and |R|.
  double value(std::size_t overlap, std::size_t rejected) const noexcept;

  /// Throws std::domain_error if the parameters do not fit a universe of
  /// size K (k-FWER needs k <= K).
  void check_universe(std::size_t universe) const;

 private:
  ErrorMetric(Kind kind, std::size_t k, double gamma)
      : kind_(kind), k_(k), gamma_(gamma) {}

  Kind kind_;
  std::size_t k_;
  double gamma_;
};

/// |R ∩ A| / max(|R|, 1) computed from counts. This is the one expression
/// every procedure uses, so fast paths and oracles see identical doubles.
inline double fdp_ratio(std::size_t overlap, std::size_t rejected) noexcept {
  return static_cast<double>(overlap) /
         static_cast<double>(rejected > 0 ? rejected : 1);
}

/// FDP_A(R). Throws std::domain_error on indices outside [K].
double fdp(std::span<const std::size_t> nulls, const DiscoverySet& R);

/// F_A(R) for a built-in metric.
double metric_value(const ErrorMetric& metric,
                    std::span<const std::size_t> nulls, const DiscoverySet& R);

struct FdpTpr {
  double fdp;
  double tpr;
};

/// Realised FDP and true positive rate of R against the truth.
FdpTpr fdp_tpr(const TruthAssignment& truth, const DiscoverySet& R);

/// Number of set bits.
inline std::size_t popcount(Mask m) noexcept {
  return static_cast<std::size_t>(__builtin_popcountll(m));
}

/// Converts an index list to a mask; throws if any index >= universe or
/// universe > 64.
Mask to_mask(std::size_t universe, std::span<const std::size_t> indices);

}  // namespace cfdr
