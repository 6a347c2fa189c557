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

// Value files, simulation config files, and CSV output.

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cfdr/sim.hpp"

namespace cfdr::io {

/// Bad user input. `line()` is 1-based, or 0 when no line applies.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class ValueKind { evalues, pvalues, compound };

ValueKind parse_value_kind(std::string_view text);

struct ParsedValues {
  std::vector<double> values;
  std::vector<std::size_t> lines;  ///< source line of each value
};

/// A JSON array of numbers, or CSV with one value per line and an optional
/// non-numeric header line. Blank lines and '#' comments are skipped.
/// Throws InputError ("no values parsed" for empty input).
ParsedValues parse_values(std::string_view text);

/// Checks each value against the kind (finite, >= 0, <= 1 for p-values),
/// reporting the offending line.
void check_values(const ParsedValues& parsed, ValueKind kind);

/// Whole file as a string. Throws InputError if it cannot be read.
std::string read_file(const std::string& path);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// A config may sweep pi0; every other field is a single value.
struct SimPlan {
  SimConfig base;
  std::vector<double> pi0_grid;  ///< empty means {base.pi0}

  std::vector<SimConfig> expand() const;
};

/// Named starting points: paper-fig1, paper-fig2, smoke.
SimPlan preset(std::string_view name);

/// Sets one key from its textual value. Keys: preset, K, pi0 (number or
/// comma list), mu, lambda, alpha, trials, dependence, seed, procedures
/// (comma list), threads, boost_samples. Throws InputError.
void apply_setting(SimPlan& plan, std::string_view key, std::string_view value,
                   std::size_t line = 0);

/// Flat `key = value` lines (TOML-like: '#' comments, optional quotes,
/// bracketed lists) or a JSON object with the same keys. A `preset` key is
/// applied before the others regardless of position and replaces `start`.
SimPlan parse_sim_config(std::string_view text, SimPlan start = {});

inline constexpr std::string_view kTrialCsvHeader =
    "method,pi0,mu,alpha,dependence,trial,k,fdp,tpr";
inline constexpr std::string_view kAggregateCsvHeader =
    "method,pi0,mu,alpha,dependence,mean_fdr,se_fdr,mean_tpr,se_tpr,n";

/// Rows only; callers write the header once. Trial indices are 1-based.
void write_trial_rows(std::ostream& os, const ExperimentResult& res);
void write_aggregate_rows(std::ostream& os, const ExperimentResult& res);

}  // namespace cfdr::io
