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

// Monte Carlo harness: Gaussian location-shift data, turned into e-values
// E_i = exp(lambda X_i - lambda^2/2) and p-values P_i = 1 - Phi(X_i), either
// independent or with an alternating-sign Toeplitz covariance.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cfdr/core.hpp"

namespace cfdr {

enum class Dependence { independent, toeplitz };

std::string_view dependence_name(Dependence d) noexcept;
/// Accepts "independent" and "toeplitz". Throws std::invalid_argument.
Dependence parse_dependence(std::string_view text);

enum class Procedure {
  ebh,
  ebhm,
  cebh,
  cebh_boosted,
  cebh_product,
  by,
  ebhm_by,
  cby,
};

std::string_view procedure_name(Procedure p) noexcept;
/// Ids: ebh, ebhm, cebh, cebh-boosted, cebh-product, by, ebhm-by, cby.
Procedure parse_procedure(std::string_view text);

struct SimConfig {
  std::size_t K = 100;
  double pi0 = 0.9;
  double mu = 3.0;
  std::optional<double> lambda;  ///< defaults to mu
  double alpha = 0.1;
  std::size_t trials = 1000;
  Dependence dependence = Dependence::independent;
  std::uint64_t seed = 0;
  /// Empty means the default family for the dependence structure.
  std::vector<Procedure> procedures;
  /// 0: CLOSURE_FDR_THREADS if set, else hardware concurrency.
  std::size_t threads = 0;
  /// Null draws per |A| stratum when estimating boost factors.
  std::size_t boost_samples = 20000;

  double tilt() const noexcept { return lambda.value_or(mu); }
  /// floor(pi0 K); nulls occupy indices 0..num_nulls()-1.
  std::size_t num_nulls() const noexcept;
  std::vector<Procedure> effective_procedures() const;
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct TrialRecord {
  Procedure method = Procedure::ebh;
  std::size_t trial = 0;
  std::size_t k = 0;
  double fdp = 0.0;
  double tpr = 0.0;
};

struct AggregateRow {
  Procedure method = Procedure::ebh;
  double mean_fdr = 0.0;
  double se_fdr = 0.0;
  double mean_tpr = 0.0;
  double se_tpr = 0.0;
  std::size_t n = 0;
};

struct ExperimentResult {
  SimConfig config;
  /// Trial-major, then in effective_procedures() order.
  std::vector<TrialRecord> records;
  std::vector<AggregateRow> aggregates;
};

/// A per-trial set inclusion failed. `dump()` holds the trial's inputs and
/// every procedure's output.
class DominationFailure : public InvariantViolation {
 public:
  DominationFailure(const std::string& what, std::string dump)
      : InvariantViolation(what), dump_(std::move(dump)) {}
  const std::string& dump() const noexcept { return dump_; }

 private:
  std::string dump_;
};

/// Seed of trial t; a pure function of (cfg.seed, t).
std::uint64_t trial_seed(const SimConfig& cfg, std::size_t trial) noexcept;

/// Nulls at indices 0..floor(pi0 K)-1.
TruthAssignment null_layout(const SimConfig& cfg);

/// Cov(X_i, X_j): 1 on the diagonal, else s exp(-|i-j|/10)/5 with s = +1
/// for even |i-j| and -1 for odd.
double toeplitz_covariance(std::size_t i, std::size_t j) noexcept;

/// Cholesky factor of the K x K Toeplitz covariance, built once.
class ToeplitzSampler {
 public:
  /// Throws std::runtime_error with the smallest eigenvalue if the matrix is
  /// not positive definite.
  explicit ToeplitzSampler(std::size_t K);

  std::size_t size() const noexcept { return static_cast<std::size_t>(l_.rows()); }
  /// L z for a fresh standard normal vector z.
  Eigen::VectorXd draw(std::mt19937_64& rng) const;

 private:
  Eigen::MatrixXd l_;
};

/// 1 - Phi(x), via erfc so the upper tail keeps full relative precision.
double normal_upper_tail(double x) noexcept;

/// Raw statistics X for one trial: nulls N(0,1), alternatives N(mu,1).
std::vector<double> draw_statistics(const SimConfig& cfg, std::uint64_t seed,
                                    const ToeplitzSampler* toeplitz = nullptr);

std::pair<EValueVector, TruthAssignment> gen_independent(
    const SimConfig& cfg, std::uint64_t trial_seed);
std::pair<PValueVector, TruthAssignment> gen_toeplitz(
    const SimConfig& cfg, std::uint64_t trial_seed);

/// Runs every trial (in parallel) and aggregates. Throws DominationFailure
/// if an exact inclusion fails.
ExperimentResult run_experiment(const SimConfig& cfg);

/// Mean and standard error per method, in `methods` order.
std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records,
                                    const std::vector<Procedure>& methods);

/// Worker count for a request (0 = automatic), capped by
/// CLOSURE_FDR_THREADS and never below 1.
std::size_t resolve_threads(std::size_t requested);

}  // namespace cfdr
