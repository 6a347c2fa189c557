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

#include "cfdr/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace cfdr::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

template <typename Int>
Int parse_integer(std::string_view key, std::string_view s, std::size_t line) {
  s = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("'" + std::string(key) + "' expects a nonnegative integer, got '" +
                         std::string(s) + "'",
                     line);
  }
  return v;
}

double parse_real(std::string_view key, std::string_view s, std::size_t line) {
  double v = 0.0;
  if (!parse_double(s, v)) {
    throw InputError("'" + std::string(key) + "' expects a number, got '" +
                         std::string(trim(s)) + "'",
                     line);
  }
  return v;
}

std::string_view unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') &&
      s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

// "a, b" or "[a, b]" or "['a', 'b']" -> {"a", "b"}.
std::vector<std::string> split_list(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') {
    s = s.substr(1, s.size() - 2);
  }
  std::vector<std::string> out;
  while (!trim(s).empty()) {
    const auto comma = s.find(',');
    out.emplace_back(unquote(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::string location(std::size_t line) {
  return line > 0 ? "line " + std::to_string(line) + ": " : std::string();
}

}  // namespace

InputError::InputError(const std::string& what, std::size_t line)
    : std::invalid_argument(location(line) + what), line_(line) {}

ValueKind parse_value_kind(std::string_view text) {
  if (text == "evalues") return ValueKind::evalues;
  if (text == "pvalues") return ValueKind::pvalues;
  if (text == "compound") return ValueKind::compound;
  throw InputError("unknown value kind '" + std::string(text) +
                   "' (expected evalues, pvalues or compound)");
}

ParsedValues parse_values(std::string_view text) {
  ParsedValues out;
  const std::string_view body = trim(text);
  if (!body.empty() && body.front() == '[') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& err) {
      const auto lead = static_cast<std::size_t>(body.data() - text.data());
      const std::size_t end =
          lead + std::min<std::size_t>(err.byte, body.size());
      const std::size_t line =
          1 + static_cast<std::size_t>(
                  std::count(text.begin(), text.begin() + end, '\n'));
      throw InputError("malformed JSON array", line);
    } catch (const nlohmann::json::exception&) {
      throw InputError("JSON number out of range");
    }
    if (!j.is_array()) throw InputError("JSON input must be an array");
    std::size_t i = 0;
    for (const auto& v : j) {
      ++i;
      if (!v.is_number()) {
        throw InputError("JSON entry " + std::to_string(i) + " is not a number");
      }
      out.values.push_back(v.get<double>());
      out.lines.push_back(0);
    }
  } else {
    std::size_t line = 0;
    bool seen_content = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      const auto raw = text.substr(
          pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++line;
      const std::string_view s = trim(raw);
      if (s.empty() || s.front() == '#') continue;
      double v = 0.0;
      if (parse_double(s, v)) {
        out.values.push_back(v);
        out.lines.push_back(line);
      } else if (!seen_content) {
        // header
      } else if (s.find(',') != std::string_view::npos) {
        throw InputError("expected one value per line, got '" + std::string(s) + "'",
                         line);
      } else {
        throw InputError("cannot parse '" + std::string(s) + "' as a number", line);
      }
      seen_content = true;
    }
  }
  if (out.values.empty()) throw InputError("no values parsed");
  return out;
}

void check_values(const ParsedValues& parsed, ValueKind kind) {
  for (std::size_t i = 0; i < parsed.values.size(); ++i) {
    const double v = parsed.values[i];
    const std::size_t line = parsed.lines[i];
    const std::string where =
        line > 0 ? std::string() : "entry " + std::to_string(i + 1) + ": ";
    if (!std::isfinite(v)) throw InputError(where + "value is not finite", line);
    if (v < 0.0) throw InputError(where + "value is negative", line);
    if (kind == ValueKind::pvalues && v > 1.0) {
      throw InputError(where + "p-value exceeds 1", line);
    }
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

std::vector<SimConfig> SimPlan::expand() const {
  if (pi0_grid.empty()) return {base};
  std::vector<SimConfig> out;
  for (const double p : pi0_grid) {
    out.push_back(base);
    out.back().pi0 = p;
  }
  return out;
}

SimPlan preset(std::string_view name) {
  SimPlan plan;
  if (name == "paper-fig1" || name == "paper-fig2") {
    plan.base.K = 100;
    plan.base.mu = 3.0;
    plan.base.alpha = 0.1;
    plan.base.trials = 1000;
    plan.base.dependence = name == "paper-fig1" ? Dependence::independent
                                                : Dependence::toeplitz;
    plan.pi0_grid = {0.5, 0.7, 0.9};
  } else if (name == "smoke") {
    plan.base.K = 20;
    plan.base.trials = 1;
  } else {
    throw InputError("unknown preset '" + std::string(name) +
                     "' (expected paper-fig1, paper-fig2 or smoke)");
  }
  return plan;
}

void apply_setting(SimPlan& plan, std::string_view key, std::string_view value,
                   std::size_t line) {
  key = trim(key);
  SimConfig& c = plan.base;
  if (key == "preset") {
    plan = preset(unquote(value));
  } else if (key == "K") {
    c.K = parse_integer<std::size_t>(key, value, line);
  } else if (key == "pi0") {
    const auto items = split_list(value);
    if (items.empty()) throw InputError("'pi0' is empty", line);
    plan.pi0_grid.clear();
    for (const auto& it : items) plan.pi0_grid.push_back(parse_real(key, it, line));
    c.pi0 = plan.pi0_grid.front();
    if (plan.pi0_grid.size() == 1) plan.pi0_grid.clear();
  } else if (key == "mu") {
    c.mu = parse_real(key, value, line);
  } else if (key == "lambda") {
    c.lambda = parse_real(key, value, line);
  } else if (key == "alpha") {
    c.alpha = parse_real(key, value, line);
  } else if (key == "trials" || key == "n") {
    c.trials = parse_integer<std::size_t>(key, value, line);
  } else if (key == "dependence") {
    try {
      c.dependence = parse_dependence(unquote(value));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what(), line);
    }
  } else if (key == "seed") {
    c.seed = parse_integer<std::uint64_t>(key, value, line);
  } else if (key == "procedures") {
    c.procedures.clear();
    for (const auto& it : split_list(value)) {
      try {
        c.procedures.push_back(parse_procedure(it));
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what(), line);
      }
    }
  } else if (key == "threads") {
    c.threads = parse_integer<std::size_t>(key, value, line);
  } else if (key == "boost_samples") {
    c.boost_samples = parse_integer<std::size_t>(key, value, line);
  } else {
    throw InputError("unknown config key '" + std::string(key) + "'", line);
  }
}

SimPlan parse_sim_config(std::string_view text, SimPlan start) {
  struct Entry {
    std::string key, value;
    std::size_t line;
  };
  std::vector<Entry> entries;
  const std::string_view body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& err) {
      throw InputError(std::string("malformed JSON config: ") + err.what());
    }
    for (const auto& [k, v] : j.items()) {
      std::string value;
      if (v.is_string()) {
        value = v.get<std::string>();
      } else if (v.is_array()) {
        for (const auto& item : v) {
          if (!value.empty()) value += ',';
          value += item.is_string() ? item.get<std::string>() : item.dump();
        }
      } else {
        value = v.dump();
      }
      entries.push_back({k, value, 0});
    }
  } else {
    std::size_t line = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
      ++line;
      std::string_view s = raw;
      if (const auto hash = s.find('#'); hash != std::string_view::npos) {
        s = s.substr(0, hash);
      }
      s = trim(s);
      if (s.empty()) continue;
      const auto eq = s.find('=');
      if (eq == std::string_view::npos) {
        throw InputError("expected 'key = value', got '" + std::string(s) + "'",
                         line);
      }
      entries.push_back({std::string(trim(s.substr(0, eq))),
                         std::string(trim(s.substr(eq + 1))), line});
    }
  }
  SimPlan plan = std::move(start);
  for (const auto& e : entries) {
    if (e.key == "preset") apply_setting(plan, e.key, e.value, e.line);
  }
  for (const auto& e : entries) {
    if (e.key != "preset") apply_setting(plan, e.key, e.value, e.line);
  }
  return plan;
}

void write_trial_rows(std::ostream& os, const ExperimentResult& res) {
  const SimConfig& c = res.config;
  const std::string prefix_tail = format_double(c.pi0) + ',' +
                                  format_double(c.mu) + ',' +
                                  format_double(c.alpha) + ',' +
                                  std::string(dependence_name(c.dependence));
  for (const auto& r : res.records) {
    os << procedure_name(r.method) << ',' << prefix_tail << ',' << r.trial + 1
       << ',' << r.k << ',' << format_double(r.fdp) << ','
       << format_double(r.tpr) << '\n';
  }
}

void write_aggregate_rows(std::ostream& os, const ExperimentResult& res) {
  const SimConfig& c = res.config;
  for (const auto& a : res.aggregates) {
    os << procedure_name(a.method) << ',' << format_double(c.pi0) << ','
       << format_double(c.mu) << ',' << format_double(c.alpha) << ','
       << dependence_name(c.dependence) << ',' << format_double(a.mean_fdr)
       << ',' << format_double(a.se_fdr) << ',' << format_double(a.mean_tpr)
       << ',' << format_double(a.se_tpr) << ',' << a.n << '\n';
  }
}

}  // namespace cfdr::io
