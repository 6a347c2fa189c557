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

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfdr/by.hpp"
#include "cfdr/closure.hpp"
#include "cfdr/ebh.hpp"
#include "cfdr/enhance.hpp"
#include "cfdr/io.hpp"
#include "cfdr/sim.hpp"

namespace cfdr::cli {

namespace {

using Json = nlohmann::ordered_json;

struct RunArgs {
  std::string file;
  std::string procedure;
  double alpha = 0.0;
  std::string metric = "fdp";
  std::string merge = "mean";
  std::string kind;
  std::optional<std::uint64_t> seed;
  std::size_t explicit_k_max = kDefaultExplicitKMax;
};

struct SimArgs {
  std::string config;
  std::string out = ".";
  // Flag name -> value, applied in the order listed in kSimKeys.
  std::map<std::string, std::string> settings;
};

constexpr const char* kSimKeys[] = {"K",     "pi0",    "mu",         "lambda",
                                    "alpha", "trials", "dependence", "seed",
                                    "procedures", "threads", "boost_samples"};

std::vector<std::size_t> to_one_based(const DiscoverySet& s) {
  return s.one_based();
}

std::string flag_for(const std::string& key) {
  std::string flag = "--" + key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  return flag;
}

io::ValueKind default_kind(const std::string& procedure) {
  if (procedure == "by" || procedure == "cby" || procedure == "ebhm-by") {
    return io::ValueKind::pvalues;
  }
  if (procedure == "cebh-compound") return io::ValueKind::compound;
  return io::ValueKind::evalues;
}

std::string kind_name(io::ValueKind k) {
  switch (k) {
    case io::ValueKind::evalues: return "evalues";
    case io::ValueKind::pvalues: return "pvalues";
    case io::ValueKind::compound: return "compound";
  }
  return "?";
}

void check_compatible(const std::string& procedure, io::ValueKind kind) {
  const io::ValueKind want = default_kind(procedure);
  const bool ok =
      kind == want ||
      (procedure == "cebh-compound" && kind == io::ValueKind::evalues) ||
      (procedure == "closed" && kind == io::ValueKind::compound);
  if (!ok) {
    throw io::InputError("procedure '" + procedure + "' cannot run on " +
                         kind_name(kind));
  }
}

io::ParsedValues load(const std::string& path, io::ValueKind kind) {
  io::ParsedValues parsed = io::parse_values(io::read_file(path));
  io::check_values(parsed, kind);
  return parsed;
}

ECollection make_collection(const std::string& merge,
                            const io::ParsedValues& v) {
  if (merge == "mean") return ECollection::arithmetic_mean(EValueVector(v.values));
  if (merge == "product") return ECollection::product(EValueVector(v.values));
  if (merge == "compound") {
    return ECollection::compound(CompoundEValueVector(v.values));
  }
  throw io::InputError("unknown merge rule '" + merge +
                       "' (expected mean, product or compound)");
}

ErrorMetric parse_metric(const std::string& text) {
  try {
    return ErrorMetric::parse(text);
  } catch (const std::exception& e) {
    throw io::InputError(e.what());
  }
}

int cmd_run(const RunArgs& a, std::ostream& out) {
  const io::ValueKind kind =
      a.kind.empty() ? default_kind(a.procedure) : io::parse_value_kind(a.kind);
  check_compatible(a.procedure, kind);
  const io::ParsedValues v = load(a.file, kind);
  const Level alpha(a.alpha);

  Json j;
  j["procedure"] = a.procedure;
  j["alpha"] = a.alpha;
  DiscoverySet R;
  bool randomized = false;
  const std::string& p = a.procedure;
  if (p == "ebh") {
    R = ebh(EValueVector(v.values), alpha).discoveries;
  } else if (p == "ebhm") {
    R = ebh_minimally_adaptive(EValueVector(v.values), alpha).discoveries;
  } else if (p == "cebh") {
    R = closed_ebh(EValueVector(v.values), alpha).discoveries;
  } else if (p == "cebh-randomized") {
    if (!a.seed) throw io::InputError("cebh-randomized needs --seed");
    R = randomized_closed_ebh(EValueVector(v.values), alpha, *a.seed)
            .discoveries;
    randomized = true;
  } else if (p == "cebh-product") {
    R = closed_ebh_product(EValueVector(v.values), alpha).discoveries;
  } else if (p == "cebh-compound") {
    R = closed_ebh_compound(CompoundEValueVector(v.values), alpha).discoveries;
  } else if (p == "by") {
    R = by_procedure(PValueVector(v.values), alpha);
  } else if (p == "ebhm-by") {
    R = ebhm_by(PValueVector(v.values), alpha);
  } else if (p == "cby") {
    R = closed_by(PValueVector(v.values), alpha);
  } else if (p == "eholm") {
    R = closed_fwer(EValueVector(v.values), alpha);
  } else if (p == "closed") {
    const ErrorMetric metric = parse_metric(a.metric);
    const std::string merge =
        kind == io::ValueKind::compound ? "compound" : a.merge;
    j["metric"] = metric.name();
    j["merge"] = merge;
    R = closed_general(ClosureProblem(make_collection(merge, v), metric, alpha),
                       a.explicit_k_max);
  } else {
    throw io::InputError("unknown procedure '" + p + "'");
  }
  j["k"] = R.size();
  j["rejected"] = to_one_based(R);
  if (R.fdr_hat()) j["fdr_hat"] = *R.fdr_hat();
  if (randomized) j["seed"] = *a.seed;
  out << j.dump(2) << '\n';
  return kOk;
}

int cmd_verify(const RunArgs& a, std::ostream& out) {
  const io::ValueKind kind =
      a.merge == "compound" ? io::ValueKind::compound : io::ValueKind::evalues;
  const io::ParsedValues v = load(a.file, kind);
  const Level alpha(a.alpha);
  const ErrorMetric metric = parse_metric(a.metric);
  const ECollection coll = make_collection(a.merge, v);
  if (coll.size() > a.explicit_k_max) {
    throw CapacityError("verify enumerates all subsets and needs K <= " +
                        std::to_string(a.explicit_k_max) + " (got K=" +
                        std::to_string(coll.size()) + ")");
  }

  const std::vector<DiscoverySet> family =
      closed_ebh_oracle(coll, metric, alpha, a.explicit_k_max);
  DiscoverySet fast = closed_general(ClosureProblem(coll, metric, alpha),
                                     a.explicit_k_max);
#ifdef CFDR_INJECT_VERIFY_FAULT
  {
    auto idx = fast.indices();
    if (idx.empty()) {
      idx.push_back(0);
    } else {
      idx.pop_back();
    }
    fast = DiscoverySet(fast.universe(), std::move(idx));
  }
#endif

  std::size_t best = 0;
  for (const auto& c : family) best = std::max(best, c.size());
  const bool member =
      std::find(family.begin(), family.end(), fast) != family.end();
  const bool match = member && fast.size() == best;

  Json j;
  j["alpha"] = a.alpha;
  j["metric"] = metric.name();
  j["merge"] = a.merge;
  j["K"] = coll.size();
  j["fast"] = {{"k", fast.size()}, {"rejected", to_one_based(fast)}};
  Json maximal = Json::array();
  for (const auto& c : family) {
    if (c.size() == best) maximal.push_back(to_one_based(c));
  }
  j["oracle"] = {{"k", best},
                 {"candidates", family.size()},
                 {"maximal", maximal}};
  j["status"] = match ? "MATCH" : "MISMATCH";
  out << j.dump(2) << '\n';
  return match ? kOk : kMismatch;
}

int cmd_calibrate(const RunArgs& a, std::ostream& out) {
  const io::ParsedValues v = load(a.file, io::ValueKind::pvalues);
  const EValueVector e =
      by_calibrate(PValueVector(v.values), Level(a.alpha));
  for (const double x : e.values()) out << io::format_double(x) << '\n';
  return kOk;
}

int cmd_simulate(const SimArgs& a, std::ostream& out, std::ostream& err) {
  io::SimPlan plan;
  if (const auto it = a.settings.find("preset"); it != a.settings.end()) {
    plan = io::preset(it->second);
  }
  if (!a.config.empty()) {
    plan = io::parse_sim_config(io::read_file(a.config), std::move(plan));
  }
  for (const char* key : kSimKeys) {
    if (const auto it = a.settings.find(key); it != a.settings.end()) {
      io::apply_setting(plan, key, it->second);
    }
  }
  const std::vector<SimConfig> configs = plan.expand();
  for (const auto& c : configs) c.validate();

  namespace fs = std::filesystem;
  const fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io::InputError("cannot create output directory '" + a.out + "'");

  std::vector<ExperimentResult> results;
  for (const auto& c : configs) {
    try {
      results.push_back(run_experiment(c));
    } catch (const DominationFailure& f) {
      const fs::path dump = dir / "domination_failure.txt";
      std::ofstream(dump) << f.what() << '\n' << f.dump();
      err << "invariant violation: " << f.what() << "\ntrial dump: "
          << dump.string() << '\n';
      return kInvariant;
    }
  }

  std::ofstream trials(dir / "trials.csv", std::ios::binary);
  std::ofstream agg(dir / "aggregate.csv", std::ios::binary);
  if (!trials || !agg) throw io::InputError("cannot write CSV files in '" + a.out + "'");
  trials << io::kTrialCsvHeader << '\n';
  agg << io::kAggregateCsvHeader << '\n';
  out << io::kAggregateCsvHeader << '\n';
  for (const auto& r : results) {
    io::write_trial_rows(trials, r);
    io::write_aggregate_rows(agg, r);
    io::write_aggregate_rows(out, r);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app("E-value multiple testing: eBH, closed eBH, BY and simulations",
               "closure-fdr");
  app.require_subcommand(1);

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "Run a procedure on a value file");
  run_cmd->add_option("file", ra.file, "CSV (one value per line) or JSON array")
      ->required();
  run_cmd
      ->add_option("--procedure", ra.procedure,
                   "ebh|ebhm|cebh|cebh-randomized|cebh-product|cebh-compound|"
                   "by|ebhm-by|cby|eholm|closed")
      ->required();
  run_cmd->add_option("--alpha", ra.alpha, "Target level in (0, 1]")->required();
  run_cmd->add_option("--metric", ra.metric, "fdp|kfwer:k|pfer|fdx:g (closed only)");
  run_cmd->add_option("--merge", ra.merge, "mean|product|compound (closed only)");
  run_cmd->add_option("--kind", ra.kind, "evalues|pvalues|compound");
  run_cmd->add_option("--seed", ra.seed, "Seed for randomized procedures");
  run_cmd->add_option("--explicit-k-max", ra.explicit_k_max,
                      "Largest K for subset enumeration");

  RunArgs va;
  auto* verify_cmd =
      app.add_subcommand("verify", "Compare the fast path with enumeration");
  verify_cmd->add_option("file", va.file)->required();
  verify_cmd->add_option("--alpha", va.alpha)->required();
  verify_cmd->add_option("--metric", va.metric, "fdp|kfwer:k|pfer|fdx:g");
  verify_cmd->add_option("--merge", va.merge, "mean|product|compound");
  verify_cmd->add_option("--explicit-k-max", va.explicit_k_max);

  RunArgs ca;
  auto* cal_cmd =
      app.add_subcommand("calibrate", "BY p-to-e calibration, one value per line");
  cal_cmd->add_option("file", ca.file)->required();
  cal_cmd->add_option("--alpha", ca.alpha)->required();

  SimArgs sa;
  std::map<std::string, std::string> raw;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo FDR/TPR study");
  sim_cmd->add_option("--config", sa.config, "key = value file or JSON object");
  sim_cmd->add_option("--out", sa.out, "Directory for trials.csv and aggregate.csv");
  sim_cmd->add_option("--preset", raw["preset"], "paper-fig1|paper-fig2|smoke");
  for (const char* key : kSimKeys) sim_cmd->add_option(flag_for(key), raw[key]);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*run_cmd) return cmd_run(ra, out);
    if (*verify_cmd) return cmd_verify(va, out);
    if (*cal_cmd) return cmd_calibrate(ca, out);
    if (*sim_cmd) {
      for (const auto& [key, value] : raw) {
        if (sim_cmd->count(flag_for(key)) > 0) sa.settings[key] = value;
      }
      return cmd_simulate(sa, out, err);
    }
  } catch (const CapacityError& e) {
    err << "capacity: " << e.what() << '\n';
    return kCapacity;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kInputError;
}

}  // namespace cfdr::cli
