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

#include "cfdr/sim.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cfdr/by.hpp"
#include "cfdr/ebh.hpp"
#include "cfdr/enhance.hpp"
#include "cfdr/rng.hpp"

namespace cfdr {

namespace {

constexpr std::array<std::pair<Procedure, std::string_view>, 8> kProcedureNames{{
    {Procedure::ebh, "ebh"},
    {Procedure::ebhm, "ebhm"},
    {Procedure::cebh, "cebh"},
    {Procedure::cebh_boosted, "cebh-boosted"},
    {Procedure::cebh_product, "cebh-product"},
    {Procedure::by, "by"},
    {Procedure::ebhm_by, "ebhm-by"},
    {Procedure::cby, "cby"},
}};

// Stream index reserved for boost-factor estimation.
constexpr std::uint64_t kBoostStream = ~std::uint64_t{0};

std::string join_one_based(const DiscoverySet& s) {
  std::string out = "[";
  bool first = true;
  for (const std::size_t i : s.one_based()) {
    if (!first) out += ',';
    out += std::to_string(i);
    first = false;
  }
  return out + "]";
}

template <typename Seq>
std::string join_values(const Seq& values) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  bool first = true;
  for (const double v : values) {
    if (!first) os << ',';
    os << v;
    first = false;
  }
  os << ']';
  return os.str();
}

struct Inclusion {
  Procedure inner, outer;
};

constexpr std::array<Inclusion, 7> kInclusions{{
    {Procedure::ebh, Procedure::ebhm},
    {Procedure::ebhm, Procedure::cebh},
    {Procedure::ebh, Procedure::cebh},
    {Procedure::cebh, Procedure::cebh_boosted},
    {Procedure::by, Procedure::ebhm_by},
    {Procedure::by, Procedure::cby},
    {Procedure::ebhm_by, Procedure::cby},
}};

}  // namespace

std::string_view dependence_name(Dependence d) noexcept {
  return d == Dependence::independent ? "independent" : "toeplitz";
}

Dependence parse_dependence(std::string_view text) {
  if (text == "independent") return Dependence::independent;
  if (text == "toeplitz") return Dependence::toeplitz;
  throw std::invalid_argument("unknown dependence '" + std::string(text) +
                              "' (expected independent or toeplitz)");
}

std::string_view procedure_name(Procedure p) noexcept {
  for (const auto& [proc, name] : kProcedureNames) {
    if (proc == p) return name;
  }
  return "?";
}

Procedure parse_procedure(std::string_view text) {
  for (const auto& [proc, name] : kProcedureNames) {
    if (name == text) return proc;
  }
  throw std::invalid_argument("unknown procedure '" + std::string(text) + "'");
}

std::size_t SimConfig::num_nulls() const noexcept {
  // The slack keeps products like 0.7 * 100 from landing just below 70.
  return static_cast<std::size_t>(
      std::floor(pi0 * static_cast<double>(K) + 1e-9));
}

std::vector<Procedure> SimConfig::effective_procedures() const {
  if (!procedures.empty()) return procedures;
  if (dependence == Dependence::independent) {
    return {Procedure::ebh, Procedure::ebhm, Procedure::cebh};
  }
  return {Procedure::by, Procedure::ebhm_by, Procedure::cby};
}

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("invalid simulation config: " + msg);
  };
  if (K < 1) fail("K must be >= 1");
  if (!(pi0 >= 0.0 && pi0 <= 1.0)) fail("pi0 must lie in [0, 1]");
  if (!std::isfinite(mu)) fail("mu must be finite");
  if (!std::isfinite(tilt())) fail("lambda must be finite");
  if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha must lie in (0, 1]");
  if (trials < 1) fail("trials must be >= 1");
  if (boost_samples < 1) fail("boost_samples must be >= 1");
  const auto procs = effective_procedures();
  for (std::size_t i = 0; i < procs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (procs[i] == procs[j]) {
        fail("procedure '" + std::string(procedure_name(procs[i])) +
             "' listed twice");
      }
    }
    if (dependence == Dependence::toeplitz &&
        (procs[i] == Procedure::cebh_boosted ||
         procs[i] == Procedure::cebh_product)) {
      fail("'" + std::string(procedure_name(procs[i])) +
           "' needs independent nulls");
    }
  }
}

std::uint64_t trial_seed(const SimConfig& cfg, std::size_t trial) noexcept {
  return derive_seed(cfg.seed, trial);
}

TruthAssignment null_layout(const SimConfig& cfg) {
  std::vector<std::size_t> nulls(cfg.num_nulls());
  for (std::size_t i = 0; i < nulls.size(); ++i) nulls[i] = i;
  return TruthAssignment(cfg.K, std::move(nulls));
}

double toeplitz_covariance(std::size_t i, std::size_t j) noexcept {
  if (i == j) return 1.0;
  const std::size_t d = i > j ? i - j : j - i;
  const double mag = std::exp(-static_cast<double>(d) / 10.0) / 5.0;
  return d % 2 == 0 ? mag : -mag;
}

ToeplitzSampler::ToeplitzSampler(std::size_t K) {
  const auto n = static_cast<Eigen::Index>(K);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cov(i, j) = toeplitz_covariance(static_cast<std::size_t>(i),
                                      static_cast<std::size_t>(j));
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        cov, Eigen::EigenvaluesOnly);
    std::ostringstream os;
    os << "Toeplitz covariance is not positive definite (K=" << K
       << ", smallest eigenvalue " << eig.eigenvalues().minCoeff() << ")";
    throw std::runtime_error(os.str());
  }
  l_ = llt.matrixL();
}

Eigen::VectorXd ToeplitzSampler::draw(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(l_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return l_.triangularView<Eigen::Lower>() * z;
}

double normal_upper_tail(double x) noexcept {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

std::vector<double> draw_statistics(const SimConfig& cfg, std::uint64_t seed,
                                    const ToeplitzSampler* toeplitz) {
  std::mt19937_64 rng(seed);
  std::vector<double> x(cfg.K);
  if (cfg.dependence == Dependence::toeplitz) {
    std::optional<ToeplitzSampler> local;
    if (toeplitz == nullptr) toeplitz = &local.emplace(cfg.K);
    if (toeplitz->size() != cfg.K) {
      throw std::invalid_argument("Toeplitz sampler built for another K");
    }
    const Eigen::VectorXd v = toeplitz->draw(rng);
    for (std::size_t i = 0; i < cfg.K; ++i) x[i] = v(static_cast<Eigen::Index>(i));
  } else {
    std::normal_distribution<double> normal;
    for (auto& xi : x) xi = normal(rng);
  }
  for (std::size_t i = cfg.num_nulls(); i < cfg.K; ++i) x[i] += cfg.mu;
  return x;
}

std::pair<EValueVector, TruthAssignment> gen_independent(
    const SimConfig& cfg, std::uint64_t seed) {
  if (cfg.dependence != Dependence::independent) {
    throw std::invalid_argument("gen_independent needs independent dependence");
  }
  const double lam = cfg.tilt();
  std::vector<double> e = draw_statistics(cfg, seed);
  for (auto& v : e) v = std::exp(lam * v - 0.5 * lam * lam);
  return {EValueVector(std::move(e)), null_layout(cfg)};
}

std::pair<PValueVector, TruthAssignment> gen_toeplitz(const SimConfig& cfg,
                                                      std::uint64_t seed) {
  if (cfg.dependence != Dependence::toeplitz) {
    throw std::invalid_argument("gen_toeplitz needs toeplitz dependence");
  }
  std::vector<double> p = draw_statistics(cfg, seed);
  for (auto& v : p) v = normal_upper_tail(v);
  return {PValueVector(std::move(p)), null_layout(cfg)};
}

std::size_t resolve_threads(std::size_t requested) {
  std::size_t n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CLOSURE_FDR_THREADS")) {
    char* end = nullptr;
    const unsigned long long cap = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) {
      n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    }
  }
  return std::max<std::size_t>(n, 1);
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records,
                                    const std::vector<Procedure>& methods) {
  std::vector<AggregateRow> rows;
  for (const Procedure m : methods) {
    long double s_f = 0, s_f2 = 0, s_t = 0, s_t2 = 0;
    std::size_t n = 0;
    for (const auto& r : records) {
      if (r.method != m) continue;
      s_f += r.fdp;
      s_f2 += static_cast<long double>(r.fdp) * r.fdp;
      s_t += r.tpr;
      s_t2 += static_cast<long double>(r.tpr) * r.tpr;
      ++n;
    }
    AggregateRow row;
    row.method = m;
    row.n = n;
    if (n > 0) {
      const long double nn = static_cast<long double>(n);
      auto se = [&](long double s, long double s2) {
        if (n < 2) return 0.0;
        const long double mean = s / nn;
        const long double var = std::max(0.0L, (s2 - nn * mean * mean) / (nn - 1));
        return static_cast<double>(std::sqrt(var / nn));
      };
      row.mean_fdr = static_cast<double>(s_f / nn);
      row.mean_tpr = static_cast<double>(s_t / nn);
      row.se_fdr = se(s_f, s_f2);
      row.se_tpr = se(s_t, s_t2);
    }
    rows.push_back(row);
  }
  return rows;
}

ExperimentResult run_experiment(const SimConfig& cfg) {
  cfg.validate();
  const auto methods = cfg.effective_procedures();
  const Level alpha(cfg.alpha);
  const double lam = cfg.tilt();
  const TruthAssignment truth = null_layout(cfg);

  std::optional<ToeplitzSampler> toeplitz;
  if (cfg.dependence == Dependence::toeplitz) toeplitz.emplace(cfg.K);

  std::vector<double> boost;
  if (std::find(methods.begin(), methods.end(), Procedure::cebh_boosted) !=
      methods.end()) {
    boost = iid_boost_factors(gaussian_null_sampler(lam), cfg.K, alpha,
                              cfg.boost_samples,
                              derive_seed(cfg.seed, kBoostStream));
  }

  auto run_trial = [&](std::size_t t) {
    const std::uint64_t seed = trial_seed(cfg, t);
    const std::vector<double> x =
        draw_statistics(cfg, seed, toeplitz ? &*toeplitz : nullptr);
    std::vector<double> ev(cfg.K), pv(cfg.K);
    for (std::size_t i = 0; i < cfg.K; ++i) {
      ev[i] = std::exp(lam * x[i] - 0.5 * lam * lam);
      pv[i] = normal_upper_tail(x[i]);
    }
    const EValueVector e(ev);
    const PValueVector p(pv);

    std::map<Procedure, DiscoverySet> sets;
    for (const Procedure m : methods) {
      switch (m) {
        case Procedure::ebh: sets[m] = ebh(e, alpha).discoveries; break;
        case Procedure::ebhm:
          sets[m] = ebh_minimally_adaptive(e, alpha).discoveries;
          break;
        case Procedure::cebh: sets[m] = closed_ebh(e, alpha).discoveries; break;
        case Procedure::cebh_boosted:
          sets[m] = boosted_closed_ebh(e, alpha, boost).discoveries;
          break;
        case Procedure::cebh_product:
          sets[m] = closed_ebh_product(e, alpha).discoveries;
          break;
        case Procedure::by: sets[m] = by_procedure(p, alpha); break;
        case Procedure::ebhm_by: sets[m] = ebhm_by(p, alpha); break;
        case Procedure::cby: sets[m] = closed_by(p, alpha); break;
      }
    }

    for (const auto& inc : kInclusions) {
      const auto in = sets.find(inc.inner), out = sets.find(inc.outer);
      if (in == sets.end() || out == sets.end()) continue;
      if (in->second.is_subset_of(out->second)) continue;
      std::ostringstream dump;
      dump << "trial=" << t << "\nseed=" << seed << "\nK=" << cfg.K
           << "\npi0=" << cfg.pi0 << "\nmu=" << cfg.mu << "\nlambda=" << lam
           << "\nalpha=" << cfg.alpha
           << "\ndependence=" << dependence_name(cfg.dependence)
           << "\nx=" << join_values(x) << "\ne=" << join_values(ev)
           << "\np=" << join_values(pv) << '\n';
      for (const auto& [m, s] : sets) {
        dump << procedure_name(m) << '=' << join_one_based(s) << '\n';
      }
      throw DominationFailure(
          "trial " + std::to_string(t) + ": " +
              std::string(procedure_name(inc.inner)) + " is not contained in " +
              std::string(procedure_name(inc.outer)),
          dump.str());
    }

    std::vector<TrialRecord> recs;
    for (const Procedure m : methods) {
      const auto& s = sets.at(m);
      const FdpTpr ft = fdp_tpr(truth, s);
      recs.push_back({m, t, s.size(), ft.fdp, ft.tpr});
    }
    return recs;
  };

  std::vector<std::vector<TrialRecord>> per_trial(cfg.trials);
  std::vector<std::exception_ptr> errors(cfg.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < cfg.trials;) {
      try {
        per_trial[t] = run_trial(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(resolve_threads(cfg.threads), cfg.trials);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  ExperimentResult res;
  res.config = cfg;
  res.records.reserve(cfg.trials * methods.size());
  for (auto& recs : per_trial) {
    res.records.insert(res.records.end(), recs.begin(), recs.end());
  }
  res.aggregates = aggregate(res.records, methods);
  return res;
}

}  // namespace cfdr
