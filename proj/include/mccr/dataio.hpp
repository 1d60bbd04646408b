#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mccr/dataset.hpp"
#include "mccr/synth.hpp"
#include "mccr/theory.hpp"

namespace mccr {

// ---------------------------------------------------------------------------
// Numeric rendering
// ---------------------------------------------------------------------------

// 17 significant digits: enough for exact double round-trips.
inline std::string render_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline double parse_double_cell(const std::string& cell, int row,
                                const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw std::runtime_error("row " + std::to_string(row) + ", column '" +
                             column + "': non-numeric cell '" + cell + "'");
  }
  return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dataset CSV
// ---------------------------------------------------------------------------

// Reads a headered CSV whose last column is the response and all preceding
// columns are covariates. Row numbers in error messages count the header as
// row 1.
inline Dataset read_xy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ": missing header row");
  }
  const auto header = detail::split_csv_line(detail::strip_cr(line));
  if (header.size() < 2) {
    throw std::runtime_error(path + ": header must name at least one covariate and one response column");
  }
  const std::size_t ncols = header.size();
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = detail::strip_cr(line);
    if (stripped.empty() && in.peek() == std::char_traits<char>::eof()) break;
    const auto fields = detail::split_csv_line(stripped);
    if (fields.size() != ncols) {
      throw std::runtime_error("row " + std::to_string(lineno) + " has " +
                               std::to_string(fields.size()) +
                               " fields, expected " + std::to_string(ncols));
    }
    std::vector<double> values(ncols);
    for (std::size_t c = 0; c < ncols; ++c) {
      values[c] = detail::parse_double_cell(fields[c], lineno, header[c]);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw std::runtime_error(path + ": empty body, no data rows");

  Dataset data;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(ncols - 1);
  data.xs.resize(n, d);
  data.ys.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      data.xs(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    data.ys[i] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
  }
  return data;
}

// Writes "x1,...,xd,y" with 17-significant-digit values, LF newlines.
inline void write_dataset_csv(const Dataset& data, const std::string& path) {
  validate(data);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  for (Eigen::Index j = 0; j < data.dim(); ++j) {
    out << "x" << (j + 1) << ",";
  }
  out << "y\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
      out << render_double(data.xs(i, j)) << ",";
    }
    out << render_double(data.ys[i]) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Generic results tables
// ---------------------------------------------------------------------------

using Cell = std::variant<double, std::string>;

struct ResultsTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
      throw std::invalid_argument("results row width mismatch");
    }
    rows.push_back(std::move(row));
  }
};

inline void write_results(const ResultsTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "");
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (std::holds_alternative<double>(row[c])) {
        out << render_double(std::get<double>(row[c]));
      } else {
        const std::string& s = std::get<std::string>(row[c]);
        if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos) {
          throw std::invalid_argument("string cell may not contain ',' or newline: " + s);
        }
        out << s;
      }
      out << (c + 1 < row.size() ? "," : "");
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

enum class Task { kSimulate, kConvergence, kTheory, kFitCsv };

struct SimulateConfig {
  ExampleId example = ExampleId::kEx1;
  int n = 200;
  int replications = 100;
  int folds = 5;
  std::optional<std::vector<double>> loss_scales;  // defaults from data scale
  std::optional<std::vector<double>> bandwidths;
  std::optional<std::vector<double>> lambdas;
  int max_iters = 100;
  double tol = 1e-6;
};

struct ConvergenceConfig {
  ExampleId example = ExampleId::kEx1;
  double theta = -0.2;
  std::vector<int> n_list = {100, 200, 300, 400, 500, 600};
  int replications = 100;
  double s_report = 1.0;
  HyperPolicy policy;  // kFixed unless a cv policy is configured
};

struct TheoryTaskConfig {
  bool certified = true;  // run the bundled certified suite
  int deltas_per_sigma = 100;
  // custom single check:
  double sigma = 0.5;
  double M = 1.0;
  NoiseMixture mixture;
  std::vector<double> c0_list;  // empty -> certified defaults
  std::vector<double> C0_list;
  NoiseQuadratureSpec quadrature;
  double x_lo = 0.0;
  double x_hi = 1.0;
  // delta = f - f*: either zero or amplitude * sin(2 pi freq x), with f* = 0
  double delta_amplitude = 0.0;
  double delta_frequency = 1.0;
};

struct FitCsvConfig {
  std::string input;
  int folds = 5;
  std::optional<std::vector<double>> loss_scales;
  std::optional<std::vector<double>> bandwidths;
  std::optional<std::vector<double>> lambdas;
  int max_iters = 100;
  double tol = 1e-6;
};

struct ExperimentConfig {
  Task task = Task::kSimulate;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  std::optional<SimulateConfig> simulate;
  std::optional<ConvergenceConfig> convergence;
  std::optional<TheoryTaskConfig> theory;
  std::optional<FitCsvConfig> fit_csv;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::string suggest_key(const std::string& key,
                               const std::vector<std::string>& valid) {
  std::string best;
  std::size_t best_dist = 4;  // suggest only close matches
  for (const auto& v : valid) {
    const std::size_t d = edit_distance(key, v);
    if (d < best_dist) {
      best_dist = d;
      best = v;
    }
  }
  return best;
}

struct RawSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;
};

struct RawConfig {
  std::vector<std::pair<std::string, std::string>> top;
  std::vector<RawSection> sections;
};

inline RawConfig parse_raw_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  RawConfig raw;
  RawSection* current = nullptr;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(strip_cr(line));
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": malformed section header");
      }
      raw.sections.push_back({trim(s.substr(1, s.size() - 2)), {}});
      current = &raw.sections.back();
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": empty key");
    }
    if (current) {
      current->entries.emplace_back(key, value);
    } else {
      raw.top.emplace_back(key, value);
    }
  }
  return raw;
}

// Typed accessors over one section with strict unknown-key detection.
class SectionReader {
 public:
  SectionReader(std::string context,
                const std::vector<std::pair<std::string, std::string>>& entries,
                std::vector<std::string> valid_keys)
      : context_(std::move(context)), valid_keys_(std::move(valid_keys)) {
    for (const auto& [k, v] : entries) {
      if (std::find(valid_keys_.begin(), valid_keys_.end(), k) ==
          valid_keys_.end()) {
        std::string msg = context_ + ": unknown key '" + k + "'";
        const std::string hint = suggest_key(k, valid_keys_);
        if (!hint.empty()) msg += "; did you mean '" + hint + "'?";
        throw std::runtime_error(msg);
      }
      if (!map_.emplace(k, v).second) {
        throw std::runtime_error(context_ + ": duplicate key '" + k + "'");
      }
    }
  }

  std::optional<std::string> get(const std::string& key) const {
    const auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto v = get(key);
    return v ? parse_scalar(key, *v) : fallback;
  }

  int get_int(const std::string& key, int fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    const double d = parse_scalar(key, *v);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d) {
      throw std::runtime_error(context_ + "." + key + ": expected an integer");
    }
    return i;
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    std::uint64_t value = 0;
    const char* begin = v->data();
    const char* end = begin + v->size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
      throw std::runtime_error(context_ + "." + key +
                               ": expected an unsigned integer");
    }
    return value;
  }

  std::optional<std::vector<double>> get_list(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    std::vector<double> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      out.push_back(parse_scalar(key, trim(item)));
    }
    if (out.empty()) {
      throw std::runtime_error(context_ + "." + key + ": empty list");
    }
    return out;
  }

  const std::string& context() const { return context_; }

 private:
  double parse_scalar(const std::string& key, const std::string& text) const {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
      throw std::runtime_error(context_ + "." + key + ": expected a number, got '" +
                               text + "'");
    }
    return value;
  }

  std::string context_;
  std::vector<std::string> valid_keys_;
  std::map<std::string, std::string> map_;
};

inline ExampleId parse_example(const std::string& context, const std::string& v) {
  if (v == "ex1") return ExampleId::kEx1;
  if (v == "ex2") return ExampleId::kEx2;
  if (v == "ex3") return ExampleId::kEx3;
  throw std::runtime_error(context + ".example: expected ex1|ex2|ex3, got '" + v + "'");
}

inline NoiseMixture parse_components(const std::string& context,
                                     const std::string& text) {
  NoiseMixture mixture;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string spec = trim(item);
    const auto p1 = spec.find(':');
    const auto p2 = spec.find(':', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos) {
      throw std::runtime_error(context +
                               ".components: expected family:param:weight, got '" +
                               spec + "'");
    }
    const std::string family = trim(spec.substr(0, p1));
    NoiseComponent component;
    if (family == "gaussian") {
      component.family = NoiseFamily::kGaussian;
    } else if (family == "cauchy") {
      component.family = NoiseFamily::kCauchy;
    } else if (family == "laplace") {
      component.family = NoiseFamily::kLaplace;
    } else {
      throw std::runtime_error(context + ".components: unknown family '" + family + "'");
    }
    try {
      component.parameter = std::stod(spec.substr(p1 + 1, p2 - p1 - 1));
      mixture.weights.push_back(std::stod(spec.substr(p2 + 1)));
    } catch (const std::exception&) {
      throw std::runtime_error(context + ".components: malformed entry '" + spec + "'");
    }
    mixture.components.push_back(component);
  }
  validate(mixture);
  return mixture;
}

}  // namespace detail

// Parses and fully validates the key = value configuration file. Exactly one
// task section must be present and it must match the `task` key; unknown keys
// are rejected with a nearest-key suggestion.
inline ExperimentConfig load_config(const std::string& path) {
  const detail::RawConfig raw = detail::parse_raw_config(path);

  const detail::SectionReader top("config", raw.top,
                                  {"task", "seed", "output_dir"});
  const auto task_name = top.get("task");
  if (!task_name) throw std::runtime_error("config: missing required key 'task'");

  ExperimentConfig config;
  std::string canonical;
  if (*task_name == "simulate") {
    config.task = Task::kSimulate;
    canonical = "simulate";
  } else if (*task_name == "convergence") {
    config.task = Task::kConvergence;
    canonical = "convergence";
  } else if (*task_name == "theory" || *task_name == "theory_check") {
    config.task = Task::kTheory;
    canonical = "theory";
  } else if (*task_name == "fit_csv" || *task_name == "fit-csv" ||
             *task_name == "cv_fit") {
    config.task = Task::kFitCsv;
    canonical = "fit_csv";
  } else {
    throw std::runtime_error(
        "config.task: expected simulate|convergence|theory|fit_csv, got '" +
        *task_name + "'");
  }
  config.seed = top.get_u64("seed", 0);
  config.output_dir = top.get("output_dir").value_or(".");

  if (raw.sections.size() != 1) {
    throw std::runtime_error("config: exactly one task block required, found " +
                             std::to_string(raw.sections.size()));
  }
  const detail::RawSection& section = raw.sections.front();
  const std::string alias_ok =
      (canonical == "theory" && section.name == "theory_check") ||
      (canonical == "fit_csv" && (section.name == "cv_fit" || section.name == "fit-csv"))
          ? canonical
          : section.name;
  if (alias_ok != canonical) {
    throw std::runtime_error("config: task is '" + canonical +
                             "' but the block is [" + section.name + "]");
  }
  const std::string ctx = "[" + canonical + "]";

  switch (config.task) {
    case Task::kSimulate: {
      const detail::SectionReader r(ctx, section.entries,
                                    {"example", "n", "replications", "folds",
                                     "loss_scales", "bandwidths", "lambdas",
                                     "max_iters", "tol"});
      SimulateConfig sc;
      const auto example = r.get("example");
      if (!example) throw std::runtime_error(ctx + ": missing required key 'example'");
      sc.example = detail::parse_example(ctx, *example);
      sc.n = r.get_int("n", sc.n);
      sc.replications = r.get_int("replications", sc.replications);
      sc.folds = r.get_int("folds", sc.folds);
      sc.loss_scales = r.get_list("loss_scales");
      sc.bandwidths = r.get_list("bandwidths");
      sc.lambdas = r.get_list("lambdas");
      sc.max_iters = r.get_int("max_iters", sc.max_iters);
      sc.tol = r.get_double("tol", sc.tol);
      if (sc.n < 1) throw std::runtime_error(ctx + ".n: must be >= 1");
      if (sc.replications < 1) throw std::runtime_error(ctx + ".replications: must be >= 1");
      if (sc.folds < 2) throw std::runtime_error(ctx + ".folds: must be >= 2");
      if (sc.folds > sc.n) throw std::runtime_error(ctx + ".folds: must not exceed n");
      config.simulate = std::move(sc);
      break;
    }
    case Task::kConvergence: {
      const detail::SectionReader r(
          ctx, section.entries,
          {"example", "theta", "n_list", "replications", "s_report", "policy",
           "bandwidths", "lambdas", "folds", "fixed_bandwidth", "fixed_lambda"});
      ConvergenceConfig cc;
      const auto example = r.get("example");
      if (!example) throw std::runtime_error(ctx + ": missing required key 'example'");
      cc.example = detail::parse_example(ctx, *example);
      cc.theta = r.get_double("theta", cc.theta);
      if (!(cc.theta > -0.25 && cc.theta < 0.0)) {
        throw std::runtime_error(ctx + ".theta: theta out of (-1/4, 0)");
      }
      if (const auto list = r.get_list("n_list")) {
        cc.n_list.clear();
        for (double v : *list) {
          if (v != static_cast<int>(v) || v < 2) {
            throw std::runtime_error(ctx + ".n_list: entries must be integers >= 2");
          }
          cc.n_list.push_back(static_cast<int>(v));
        }
      }
      cc.replications = r.get_int("replications", cc.replications);
      cc.s_report = r.get_double("s_report", cc.s_report);
      if (!(cc.s_report > 0.0 && cc.s_report < 2.0)) {
        throw std::runtime_error(ctx + ".s_report: out of (0, 2)");
      }
      const std::string policy = r.get("policy").value_or("fixed");
      if (policy == "cv") {
        cc.policy.kind = HyperPolicy::Kind::kCv;
        const auto bw = r.get_list("bandwidths");
        const auto la = r.get_list("lambdas");
        if (!bw || !la) {
          throw std::runtime_error(ctx + ": cv policy requires bandwidths and lambdas");
        }
        cc.policy.bandwidths = *bw;
        cc.policy.lambdas = *la;
        cc.policy.folds = r.get_int("folds", cc.policy.folds);
      } else if (policy == "fixed") {
        cc.policy.kind = HyperPolicy::Kind::kFixed;
        cc.policy.fixed_bandwidth = r.get_double("fixed_bandwidth", 0.0);
        cc.policy.fixed_lambda = r.get_double("fixed_lambda", 0.0);
        if (!(cc.policy.fixed_bandwidth > 0.0) || !(cc.policy.fixed_lambda > 0.0)) {
          throw std::runtime_error(
              ctx + ": fixed policy requires positive fixed_bandwidth and fixed_lambda");
        }
      } else {
        throw std::runtime_error(ctx + ".policy: expected cv|fixed, got '" + policy + "'");
      }
      config.convergence = std::move(cc);
      break;
    }
    case Task::kTheory: {
      const detail::SectionReader r(
          ctx, section.entries,
          {"suite", "deltas_per_sigma", "sigma", "M", "components", "c0_list",
           "C0_list", "covariate_nodes", "noise_panels", "cauchy_truncation",
           "delta_amplitude", "delta_frequency", "x_lo", "x_hi"});
      TheoryTaskConfig tc;
      const std::string suite = r.get("suite").value_or("certified");
      if (suite == "certified") {
        tc.certified = true;
        tc.deltas_per_sigma = r.get_int("deltas_per_sigma", tc.deltas_per_sigma);
        if (tc.deltas_per_sigma < 1) {
          throw std::runtime_error(ctx + ".deltas_per_sigma: must be >= 1");
        }
      } else if (suite == "custom") {
        tc.certified = false;
        tc.sigma = r.get_double("sigma", tc.sigma);
        tc.M = r.get_double("M", tc.M);
        if (!(tc.sigma > 0.0)) throw std::runtime_error(ctx + ".sigma: must be positive");
        if (!(tc.M > 0.0)) throw std::runtime_error(ctx + ".M: must be positive");
        const auto components = r.get("components");
        if (!components) {
          throw std::runtime_error(ctx + ": custom suite requires 'components'");
        }
        tc.mixture = detail::parse_components(ctx, *components);
        if (const auto c0s = r.get_list("c0_list")) tc.c0_list = *c0s;
        if (const auto C0s = r.get_list("C0_list")) tc.C0_list = *C0s;
        if (tc.c0_list.size() != tc.C0_list.size()) {
          throw std::runtime_error(ctx + ": c0_list and C0_list lengths differ");
        }
        tc.quadrature.covariate_nodes =
            r.get_int("covariate_nodes", tc.quadrature.covariate_nodes);
        tc.quadrature.noise_panels =
            r.get_int("noise_panels", tc.quadrature.noise_panels);
        tc.quadrature.cauchy_truncation =
            r.get_double("cauchy_truncation", tc.quadrature.cauchy_truncation);
        tc.delta_amplitude = r.get_double("delta_amplitude", tc.delta_amplitude);
        tc.delta_frequency = r.get_double("delta_frequency", tc.delta_frequency);
        tc.x_lo = r.get_double("x_lo", tc.x_lo);
        tc.x_hi = r.get_double("x_hi", tc.x_hi);
        if (!(tc.x_hi > tc.x_lo)) throw std::runtime_error(ctx + ": x_hi must exceed x_lo");
      } else {
        throw std::runtime_error(ctx + ".suite: expected certified|custom, got '" +
                                 suite + "'");
      }
      config.theory = std::move(tc);
      break;
    }
    case Task::kFitCsv: {
      const detail::SectionReader r(ctx, section.entries,
                                    {"input", "folds", "loss_scales",
                                     "bandwidths", "lambdas", "max_iters", "tol"});
      FitCsvConfig fc;
      const auto input = r.get("input");
      if (!input) throw std::runtime_error(ctx + ": missing required key 'input'");
      fc.input = *input;
      fc.folds = r.get_int("folds", fc.folds);
      if (fc.folds < 2) throw std::runtime_error(ctx + ".folds: must be >= 2");
      fc.loss_scales = r.get_list("loss_scales");
      fc.bandwidths = r.get_list("bandwidths");
      fc.lambdas = r.get_list("lambdas");
      fc.max_iters = r.get_int("max_iters", fc.max_iters);
      fc.tol = r.get_double("tol", fc.tol);
      config.fit_csv = std::move(fc);
      break;
    }
  }
  return config;
}

}  // namespace mccr
