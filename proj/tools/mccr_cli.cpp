// Command-line experiment runner: synthetic benchmarks, convergence-rate
// studies, sandwich verification and CSV fitting. Numeric outputs go to CSV
// first; plots are rendered from the already-written CSV files, never from
// live state, so disabling plots cannot change any number.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mccr/benchmark.hpp"
#include "mccr/dataio.hpp"
#include "mccr/svg.hpp"
#include "mccr/theory.hpp"
#include "mccr/version.hpp"

namespace {

using json = nlohmann::json;

struct RunContext {
  mccr::ExperimentConfig config;
  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool plot = true;
  std::vector<std::string> outputs;  // files written, relative to out_dir
  std::map<std::string, double> timings;
};

std::string out_path(const RunContext& ctx, const std::string& name) {
  return (std::filesystem::path(ctx.out_dir) / name).string();
}

class PhaseTimer {
 public:
  PhaseTimer(RunContext& ctx, std::string name)
      : ctx_(ctx), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~PhaseTimer() {
    ctx_.timings[name_] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
  }

 private:
  RunContext& ctx_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

std::string example_name(mccr::ExampleId example) {
  switch (example) {
    case mccr::ExampleId::kEx1: return "ex1";
    case mccr::ExampleId::kEx2: return "ex2";
    case mccr::ExampleId::kEx3: return "ex3";
  }
  return "?";
}

// Paper palette: MCCR red, Huber blue, LS green.
const std::map<std::string, std::string> kMethodColors = {
    {"mccr", "#d62728"}, {"huber", "#1f77b4"}, {"ls", "#2ca02c"}};

void write_manifest(RunContext& ctx) {
  json manifest;
  manifest["version"] = mccr::kVersion;
  manifest["seed"] = ctx.seed;
  manifest["jobs"] = ctx.jobs;
  manifest["outputs"] = ctx.outputs;
  manifest["timings_seconds"] = ctx.timings;
  json resolved;
  resolved["output_dir"] = ctx.out_dir;
  switch (ctx.config.task) {
    case mccr::Task::kSimulate: {
      resolved["task"] = "simulate";
      const auto& sc = *ctx.config.simulate;
      resolved["example"] = example_name(sc.example);
      resolved["n"] = sc.n;
      resolved["replications"] = sc.replications;
      resolved["folds"] = sc.folds;
      if (sc.loss_scales) resolved["loss_scales"] = *sc.loss_scales;
      if (sc.bandwidths) resolved["bandwidths"] = *sc.bandwidths;
      if (sc.lambdas) resolved["lambdas"] = *sc.lambdas;
      resolved["max_iters"] = sc.max_iters;
      resolved["tol"] = sc.tol;
      break;
    }
    case mccr::Task::kConvergence: {
      resolved["task"] = "convergence";
      const auto& cc = *ctx.config.convergence;
      resolved["example"] = example_name(cc.example);
      resolved["theta"] = cc.theta;
      resolved["n_list"] = cc.n_list;
      resolved["replications"] = cc.replications;
      resolved["s_report"] = cc.s_report;
      if (cc.policy.kind == mccr::HyperPolicy::Kind::kFixed) {
        resolved["policy"] = "fixed";
        resolved["fixed_bandwidth"] = cc.policy.fixed_bandwidth;
        resolved["fixed_lambda"] = cc.policy.fixed_lambda;
      } else {
        resolved["policy"] = "cv";
        resolved["bandwidths"] = cc.policy.bandwidths;
        resolved["lambdas"] = cc.policy.lambdas;
        resolved["folds"] = cc.policy.folds;
      }
      break;
    }
    case mccr::Task::kTheory: {
      resolved["task"] = "theory";
      const auto& tc = *ctx.config.theory;
      resolved["suite"] = tc.certified ? "certified" : "custom";
      if (tc.certified) {
        resolved["deltas_per_sigma"] = tc.deltas_per_sigma;
      } else {
        resolved["sigma"] = tc.sigma;
        resolved["M"] = tc.M;
        resolved["covariate_nodes"] = tc.quadrature.covariate_nodes;
        resolved["noise_panels"] = tc.quadrature.noise_panels;
      }
      break;
    }
    case mccr::Task::kFitCsv: {
      resolved["task"] = "fit_csv";
      const auto& fc = *ctx.config.fit_csv;
      resolved["input"] = fc.input;
      resolved["folds"] = fc.folds;
      break;
    }
  }
  manifest["config"] = resolved;
  std::ofstream out(out_path(ctx, "manifest.json"), std::ios::binary);
  out << manifest.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: manifest.json");
  for (const auto& name : ctx.outputs) {
    if (!std::filesystem::exists(out_path(ctx, name))) {
      throw std::runtime_error("declared output missing: " + name);
    }
  }
}

// Reads a CSV written by this run back into column vectors for plotting.
std::map<std::string, std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  const auto header = mccr::detail::split_csv_line(mccr::detail::strip_cr(line));
  std::map<std::string, std::vector<double>> cols;
  std::vector<std::string> names = header;
  while (std::getline(in, line)) {
    const auto fields = mccr::detail::split_csv_line(mccr::detail::strip_cr(line));
    for (std::size_t c = 0; c < fields.size() && c < names.size(); ++c) {
      try {
        cols[names[c]].push_back(std::stod(fields[c]));
      } catch (const std::exception&) {
        cols[names[c]].push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
  }
  return cols;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

void cmd_simulate(RunContext& ctx) {
  const mccr::SimulateConfig& sc = *ctx.config.simulate;
  mccr::SimulationOptions options;
  options.example = sc.example;
  options.n = sc.n;
  options.replications = sc.replications;
  options.folds = sc.folds;
  options.loss_scales = sc.loss_scales;
  options.bandwidths = sc.bandwidths;
  options.lambdas = sc.lambdas;
  options.defaults = {sc.max_iters, sc.tol};
  options.seed = ctx.seed;
  options.jobs = ctx.jobs;
  options.keep_first_models = true;

  std::vector<mccr::MethodSimulation> sims;
  {
    PhaseTimer timer(ctx, "simulate");
    sims = mccr::run_simulation(options);
  }

  const std::string ex = example_name(sc.example);
  {
    PhaseTimer timer(ctx, "write_csv");
    mccr::ResultsTable summary;
    summary.columns = {"method", "example", "mse_mean", "mse_sd"};
    for (const auto& sim : sims) {
      std::vector<double> mses;
      for (const auto& rep : sim.replications) mses.push_back(rep.mse);
      if (mses.size() >= 2) {
        const auto [mean, sd] = mccr::summarize_replications(mses);
        summary.add_row({sim.method, ex, mean, sd});
      } else {
        summary.add_row({sim.method, ex, mses.front(), std::string{}});
      }
    }
    mccr::write_results(summary, out_path(ctx, "simulate_summary.csv"));
    ctx.outputs.push_back("simulate_summary.csv");

    mccr::ResultsTable reps;
    reps.columns = {"method",    "replication", "mse",     "loss_scale",
                    "bandwidth", "lambda",      "cv_error"};
    for (const auto& sim : sims) {
      for (std::size_t r = 0; r < sim.replications.size(); ++r) {
        const auto& rep = sim.replications[r];
        reps.add_row({sim.method, static_cast<double>(r), rep.mse,
                      rep.best.loss_scale, rep.best.bandwidth, rep.best.lambda,
                      rep.cv_error});
      }
    }
    mccr::write_results(reps, out_path(ctx, "simulate_replications.csv"));
    ctx.outputs.push_back("simulate_replications.csv");

    // Fitted curves of replication 0 on the standard 1001-point domain grid.
    const auto [lo, hi] = mccr::covariate_domain(sc.example);
    mccr::ResultsTable curves;
    curves.columns = {"x", "truth", "mccr", "huber", "ls"};
    Eigen::VectorXd probe(1);
    for (int j = 0; j < 1001; ++j) {
      const double x = lo + (hi - lo) * j / 1000.0;
      probe[0] = x;
      std::vector<mccr::Cell> row = {x, mccr::true_function(sc.example, x)};
      for (const auto& sim : sims) row.push_back(mccr::predict(*sim.first_model, probe));
      curves.add_row(std::move(row));
    }
    mccr::write_results(curves, out_path(ctx, "simulate_curves.csv"));
    ctx.outputs.push_back("simulate_curves.csv");

    // Replication-0 sample, marked by generating mixture component.
    const mccr::LabeledDataset labeled = mccr::generate_example_labeled(
        {sc.example, sc.n, mccr::replication_seed(ctx.seed, 0)});
    mccr::ResultsTable points;
    points.columns = {"x", "y", "component"};
    for (Eigen::Index i = 0; i < labeled.data.size(); ++i) {
      points.add_row({labeled.data.xs(i, 0), labeled.data.ys[i],
                      static_cast<double>(labeled.noise_component[static_cast<std::size_t>(i)])});
    }
    mccr::write_results(points, out_path(ctx, "simulate_points.csv"));
    ctx.outputs.push_back("simulate_points.csv");
  }

  if (ctx.plot) {
    PhaseTimer timer(ctx, "plot");
    const auto curves = read_numeric_csv(out_path(ctx, "simulate_curves.csv"));
    const auto points = read_numeric_csv(out_path(ctx, "simulate_points.csv"));
    mccr::SvgPlot plot("Example " + ex.substr(2) + ": truth, sample and estimates",
                       "x", "y");
    std::vector<std::pair<double, double>> background, outliers;
    for (std::size_t i = 0; i < points.at("x").size(); ++i) {
      const auto p = std::make_pair(points.at("x")[i], points.at("y")[i]);
      (points.at("component")[i] == 0.0 ? background : outliers).push_back(p);
    }
    plot.add_scatter(background, "#909090", "background noise");
    plot.add_scatter(outliers, "#d62728", "outlier component", /*cross=*/true);
    auto line_of = [&](const std::string& col) {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t i = 0; i < curves.at("x").size(); ++i) {
        pts.emplace_back(curves.at("x")[i], curves.at(col)[i]);
      }
      return pts;
    };
    plot.add_line(line_of("truth"), "#000000", "truth");
    plot.add_line(line_of("mccr"), kMethodColors.at("mccr"), "MCCR");
    plot.add_line(line_of("huber"), kMethodColors.at("huber"), "Huber");
    plot.add_line(line_of("ls"), kMethodColors.at("ls"), "LS");
    plot.write(out_path(ctx, "simulate.svg"));
    ctx.outputs.push_back("simulate.svg");
  }
}

// ---------------------------------------------------------------------------
// convergence
// ---------------------------------------------------------------------------

void cmd_convergence(RunContext& ctx) {
  const mccr::ConvergenceConfig& cc = *ctx.config.convergence;
  mccr::ConvergenceStudyConfig study_config;
  study_config.example = cc.example;
  study_config.theta = cc.theta;
  study_config.n_list = cc.n_list;
  study_config.replications = cc.replications;
  study_config.s_report = cc.s_report;
  study_config.seed = ctx.seed;

  mccr::ConvergenceStudy study;
  {
    PhaseTimer timer(ctx, "convergence");
    study = mccr::convergence_study(study_config, cc.policy, ctx.jobs);
  }

  const std::string ex = example_name(cc.example);
  {
    PhaseTimer timer(ctx, "write_csv");
    mccr::ResultsTable table;
    table.columns = {"example", "n", "sigma", "mse_mean", "mse_sd", "failures"};
    for (const auto& row : study.rows) {
      table.add_row({ex, static_cast<double>(row.n), row.sigma, row.mse_mean,
                     row.mse_sd, static_cast<double>(row.failures)});
    }
    mccr::write_results(table, out_path(ctx, "convergence.csv"));
    ctx.outputs.push_back("convergence.csv");

    mccr::ResultsTable slope;
    slope.columns = {"example", "slope_empirical", "theoretical_exponent", "s_report"};
    slope.add_row({ex,
                   study.fitted_slope ? mccr::Cell{*study.fitted_slope}
                                      : mccr::Cell{std::string{}},
                   study.theoretical_exponent, cc.s_report});
    mccr::write_results(slope, out_path(ctx, "convergence_slope.csv"));
    ctx.outputs.push_back("convergence_slope.csv");
  }

  if (ctx.plot) {
    PhaseTimer timer(ctx, "plot");
    const auto table = read_numeric_csv(out_path(ctx, "convergence.csv"));
    mccr::SvgPlot plot("MSE of MCCR against sample size (" + ex + ")", "n", "MSE");
    plot.set_log_log(true);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < table.at("n").size(); ++i) {
      pts.emplace_back(table.at("n")[i], table.at("mse_mean")[i]);
    }
    plot.add_line(pts, kMethodColors.at("mccr"), "mean MSE");
    plot.add_scatter(pts, kMethodColors.at("mccr"), "");
    plot.write(out_path(ctx, "convergence.svg"));
    ctx.outputs.push_back("convergence.svg");
  }
}

// ---------------------------------------------------------------------------
// theory
// ---------------------------------------------------------------------------

void cmd_theory(RunContext& ctx) {
  const mccr::TheoryTaskConfig& tc = *ctx.config.theory;
  mccr::ResultsTable table;
  table.columns = {"case",  "sigma", "M",     "c_sigma", "d2",
                   "gap",   "lower", "upper", "sandwich_holds", "tail_note"};

  PhaseTimer timer(ctx, "theory");
  if (tc.certified) {
    const auto suite = mccr::certified_suite(ctx.seed, tc.deltas_per_sigma);
    std::vector<mccr::TheoryReport> reports(suite.size());
    mccr::parallel_for_index(suite.size(), ctx.jobs, [&](std::size_t i) {
      reports[i] = mccr::verify_sandwich(suite[i].config, suite[i].f, suite[i].f_star);
    });
    for (std::size_t i = 0; i < suite.size(); ++i) {
      const auto& r = reports[i];
      table.add_row({suite[i].label, suite[i].config.sigma, suite[i].config.M,
                     r.c_sigma, r.d2, r.gap, r.lower, r.upper,
                     std::string(r.sandwich_holds ? "true" : "false"),
                     r.tail_note.empty() ? std::string("-") : r.tail_note});
    }
  } else {
    mccr::TheoryConfig config;
    config.sigma = tc.sigma;
    config.M = tc.M;
    config.mixture = tc.mixture;
    config.quadrature = tc.quadrature;
    config.x_domain = {tc.x_lo, tc.x_hi};
    if (tc.c0_list.empty()) {
      config.bounds = mccr::certified_bounds(tc.mixture, tc.M);
    } else {
      for (std::size_t i = 0; i < tc.c0_list.size(); ++i) {
        config.bounds.push_back({tc.c0_list[i], tc.C0_list[i]});
      }
    }
    const double amplitude = tc.delta_amplitude;
    const double freq = tc.delta_frequency;
    const auto f = [amplitude, freq](double x) {
      return amplitude * std::sin(2.0 * 3.14159265358979323846 * freq * x);
    };
    const auto f_star = [](double) { return 0.0; };
    const mccr::TheoryReport r = mccr::verify_sandwich(config, f, f_star);
    table.add_row({std::string("custom"), config.sigma, config.M, r.c_sigma,
                   r.d2, r.gap, r.lower, r.upper,
                   std::string(r.sandwich_holds ? "true" : "false"),
                   r.tail_note.empty() ? std::string("-") : r.tail_note});
  }
  mccr::write_results(table, out_path(ctx, "theory.csv"));
  ctx.outputs.push_back("theory.csv");
}

// ---------------------------------------------------------------------------
// fit-csv
// ---------------------------------------------------------------------------

void cmd_fit_csv(RunContext& ctx) {
  const mccr::FitCsvConfig& fc = *ctx.config.fit_csv;
  const mccr::Dataset data = mccr::read_xy_csv(fc.input);
  mccr::validate(data);
  const std::uint64_t fold_seed = mccr::derive_seed(ctx.seed, 1);

  struct MethodFit {
    std::string method;
    mccr::CVCell best;
    double cv_error = 0.0;
    mccr::FittedModel model;
  };
  std::vector<MethodFit> fits;
  {
    PhaseTimer timer(ctx, "fit");
    for (const auto& [name, family] : mccr::benchmark_methods()) {
      mccr::CVGrid grid = mccr::default_grid(data, family, fold_seed, fc.folds);
      grid.score = mccr::CVScore::kBoundedSquared;
      if (fc.loss_scales && family != mccr::LossFamily::kSquared) {
        grid.loss_scales = *fc.loss_scales;
      }
      if (fc.bandwidths) grid.bandwidths = *fc.bandwidths;
      if (fc.lambdas) grid.lambdas = *fc.lambdas;
      const mccr::CVResult cv = mccr::grid_search_cv(
          data, family, grid, {fc.max_iters, fc.tol}, ctx.jobs);
      mccr::FitConfig config;
      config.loss = {family, cv.best.loss_scale};
      config.kernel = {cv.best.bandwidth};
      config.lambda = cv.best.lambda;
      config.max_iters = fc.max_iters;
      config.tol = fc.tol;
      fits.push_back({name, cv.best, cv.best_error, mccr::fit(data, config)});
    }
  }

  {
    PhaseTimer timer(ctx, "write_csv");
    mccr::ResultsTable hyper;
    hyper.columns = {"method", "loss_scale", "bandwidth", "lambda", "cv_error"};
    for (const auto& f : fits) {
      hyper.add_row({f.method, f.best.loss_scale, f.best.bandwidth,
                     f.best.lambda, f.cv_error});
    }
    mccr::write_results(hyper, out_path(ctx, "fit_hyperparams.csv"));
    ctx.outputs.push_back("fit_hyperparams.csv");

    mccr::ResultsTable preds;
    if (data.dim() == 1) {
      // Predictions on a 1001-point grid spanning the observed x range.
      preds.columns = {"x", "mccr", "huber", "ls"};
      const double lo = data.xs.col(0).minCoeff();
      const double hi = data.xs.col(0).maxCoeff();
      Eigen::VectorXd probe(1);
      for (int j = 0; j < 1001; ++j) {
        probe[0] = lo + (hi - lo) * j / 1000.0;
        std::vector<mccr::Cell> row = {probe[0]};
        for (const auto& f : fits) row.push_back(mccr::predict(f.model, probe));
        preds.add_row(std::move(row));
      }
    } else {
      // Higher-dimensional covariates: predictions at the training rows.
      for (Eigen::Index j = 0; j < data.dim(); ++j) {
        preds.columns.push_back("x" + std::to_string(j + 1));
      }
      preds.columns.insert(preds.columns.end(), {"mccr", "huber", "ls"});
      for (Eigen::Index i = 0; i < data.size(); ++i) {
        std::vector<mccr::Cell> row;
        for (Eigen::Index j = 0; j < data.dim(); ++j) row.push_back(data.xs(i, j));
        for (const auto& f : fits) {
          row.push_back(mccr::predict(f.model, Eigen::VectorXd(data.xs.row(i).transpose())));
        }
        preds.add_row(std::move(row));
      }
    }
    mccr::write_results(preds, out_path(ctx, "fit_predictions.csv"));
    ctx.outputs.push_back("fit_predictions.csv");
  }

  if (ctx.plot && data.dim() == 1) {
    PhaseTimer timer(ctx, "plot");
    const auto preds = read_numeric_csv(out_path(ctx, "fit_predictions.csv"));
    mccr::SvgPlot plot("Fitted curves", "x", "y");
    std::vector<std::pair<double, double>> sample;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      sample.emplace_back(data.xs(i, 0), data.ys[i]);
    }
    plot.add_scatter(sample, "#909090", "data");
    for (const auto& name : {"mccr", "huber", "ls"}) {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t i = 0; i < preds.at("x").size(); ++i) {
        pts.emplace_back(preds.at("x")[i], preds.at(name)[i]);
      }
      std::string label = name;
      for (auto& c : label) c = static_cast<char>(std::toupper(c));
      if (label == "MCCR") label = "MCCR";
      plot.add_line(pts, kMethodColors.at(name), label);
    }
    plot.write(out_path(ctx, "fit.svg"));
    ctx.outputs.push_back("fit.svg");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel regression benchmarks: correntropy, Huber and least squares"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::string> out_flag;
  int jobs = mccr::default_jobs();
  bool no_plot = false;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment configuration file")
        ->required();
    cmd->add_option("--seed", seed_flag, "override the master seed");
    cmd->add_option("--out", out_flag, "override the output directory");
    cmd->add_option("--jobs", jobs, "worker thread count (default: cores)");
    cmd->add_flag("--no-plot", no_plot, "skip SVG output");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "synthetic benchmark with CV-tuned fits");
  CLI::App* convergence = app.add_subcommand("convergence", "MSE against sample size with sigma = n^theta");
  CLI::App* theory = app.add_subcommand("theory", "sandwich-bound verification report");
  CLI::App* fit_csv = app.add_subcommand("fit-csv", "fit the three methods to a CSV dataset");
  for (CLI::App* cmd : {simulate, convergence, theory, fit_csv}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    RunContext ctx;
    ctx.config = mccr::load_config(config_path);
    ctx.seed = seed_flag.value_or(ctx.config.seed);
    ctx.out_dir = out_flag.value_or(ctx.config.output_dir);
    ctx.jobs = jobs < 1 ? 1 : jobs;
    ctx.plot = !no_plot;
    std::filesystem::create_directories(ctx.out_dir);

    const auto expect_task = [&](mccr::Task task, const std::string& name) {
      if (ctx.config.task != task) {
        throw std::runtime_error("config task does not match subcommand '" + name + "'");
      }
    };
    if (simulate->parsed()) {
      expect_task(mccr::Task::kSimulate, "simulate");
      cmd_simulate(ctx);
    } else if (convergence->parsed()) {
      expect_task(mccr::Task::kConvergence, "convergence");
      cmd_convergence(ctx);
    } else if (theory->parsed()) {
      expect_task(mccr::Task::kTheory, "theory");
      cmd_theory(ctx);
    } else if (fit_csv->parsed()) {
      expect_task(mccr::Task::kFitCsv, "fit-csv");
      cmd_fit_csv(ctx);
    }
    write_manifest(ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
