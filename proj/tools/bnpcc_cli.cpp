// bnpcc: simulate data, fit the conditional-copula mixture, summarize and
// sample from a stored posterior.
//
//   bnpcc simulate --family gaussian --n 500 --seed 7 --out data.csv
//   bnpcc fit --data data.csv --out-dir run --calibration quadratic
//   bnpcc summarize --trace run/trace.csv
//   bnpcc predict --trace run/trace.csv --manifest run/manifest.json --data data.csv --out pred.csv
//
// Every verb also takes --config FILE, an INI file whose [simulate], [fit],
// [summarize] and [predict] sections hold `key = value` lines named after the
// long options (e.g. `iters = 4000` under [fit]). Command-line options win;
// unknown keys are rejected.
//
// Exit codes: 0 success, 2 invalid input or configuration, 3 runtime failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "bnpcc/bnpcc.hpp"
#include "json.hpp"

#ifndef BNPCC_VERSION
#define BNPCC_VERSION "dev"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

// Seed offset for the predictive stream so it never shares draws with the chain.
constexpr std::uint64_t kPredictiveSeedOffset = 0x5bd1e995;

struct SimulateOptions {
  std::string family = "gaussian";
  std::string calibration = "quadratic";
  std::vector<double> beta;
  std::size_t n = 500;
  std::uint64_t seed = 1;
  double xmin = -2.0;
  double xmax = 2.0;
  std::string out;
};

struct FitOptions {
  std::string data;
  std::string out_dir = "bnpcc_out";
  std::string calibration = "quadratic";
  bnpcc::PriorConfig prior;
  bnpcc::MCMCConfig mcmc;
  bool no_adapt = false;
  std::string standardize = "auto";
  std::size_t grid_points = 21;
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  std::size_t chains = 1;
};

struct SummarizeOptions {
  std::string trace;
  std::string out;
  double xmin = -2.0;
  double xmax = 2.0;
  std::size_t points = 21;
};

struct PredictOptions {
  std::string trace;
  std::string out;
  std::string data;
  std::string reference;
  std::string manifest;
  std::uint64_t seed = 1;
  std::size_t grid_points = 0;
  double xmin = -2.0;
  double xmax = 2.0;
};

json scaling_json(const std::optional<bnpcc::CovariateScaling>& s) {
  if (!s) return {{"enabled", false}};
  return {{"enabled", true},
          {"source_min", s->source_min},
          {"source_max", s->source_max},
          {"target_min", s->target_min},
          {"target_max", s->target_max}};
}

std::optional<bnpcc::CovariateScaling> scaling_from_json(const json& j) {
  if (!j.value("enabled", false)) return std::nullopt;
  return bnpcc::CovariateScaling{j.at("source_min").get<double>(), j.at("source_max").get<double>(),
                                 j.at("target_min").get<double>(), j.at("target_max").get<double>()};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

void print_stats_row(const char* label, const bnpcc::SummaryStats& s) {
  std::printf("%-10s %8.3f %8.3f %8.3f %8.3f %8.3f %8.3f\n", label, s.min, s.q1, s.median, s.mean, s.q3, s.max);
}

void print_summary(const bnpcc::ChainTrace& trace, std::span<const double> x_values) {
  const auto comp = bnpcc::component_summary(trace);
  std::printf("kept iterations: %zu\n\n", trace.size());
  std::printf("%-10s %8s %8s %8s %8s %8s %8s\n", "", "min", "q1", "median", "mean", "q3", "max");
  print_stats_row("D*", comp.stats);
  print_stats_row("w(1)", bnpcc::summarize_values(comp.top_weight));
  print_stats_row("w(2)", bnpcc::summarize_values(comp.second_weight));
  std::printf("\ncomponents ranked by occupancy:\n");
  std::printf("%-6s %12s %10s %12s\n", "rank", "mean weight", "mean rho", "iterations");
  for (const auto& rc : bnpcc::ranked_components(trace, trace.spec, x_values))
    std::printf("%-6zu %12.4f %10.4f %12zu\n", rc.rank, rc.mean_weight, rc.mean_rho, rc.iterations_present);
}

// ---------------------------------------------------------------- simulate

int run_simulate(const SimulateOptions& o) {
  bnpcc::SimulationPlan plan;
  plan.family = bnpcc::copula_family_from_name(o.family);
  plan.truth_spec = bnpcc::CalibrationSpec::from_name(o.calibration);
  plan.truth_beta = o.beta.empty() ? bnpcc::default_truth_beta(plan.truth_spec) : bnpcc::BetaVector(o.beta);
  plan.n = o.n;
  plan.seed = o.seed;
  plan.covariate_min = o.xmin;
  plan.covariate_max = o.xmax;
  const auto data = bnpcc::simulate_dataset(plan);
  bnpcc::write_pseudo_csv(o.out, data);

  const json meta = {{"tool", "bnpcc"},
                     {"version", BNPCC_VERSION},
                     {"command", "simulate"},
                     {"family", bnpcc::copula_family_name(plan.family)},
                     {"calibration", plan.truth_spec.name()},
                     {"beta", std::vector<double>(plan.truth_beta.begin(), plan.truth_beta.end())},
                     {"n", plan.n},
                     {"seed", plan.seed},
                     {"xmin", plan.covariate_min},
                     {"xmax", plan.covariate_max}};
  write_json(o.out + ".meta.json", meta);
  std::printf("wrote %zu rows to %s\n", data.size(), o.out.c_str());
  return 0;
}

// --------------------------------------------------------------------- fit

struct ChainResult {
  bnpcc::ChainTrace trace;
  std::exception_ptr error;
};

void write_chain_outputs(const fs::path& dir, const bnpcc::ChainTrace& trace, const bnpcc::PseudoDataset& fitted,
                         std::span<const double> x_original, std::span<const double> grid_original,
                         const std::optional<bnpcc::CovariateScaling>& scaling, const bnpcc::InputData& input,
                         std::uint64_t seed) {
  fs::create_directories(dir);
  bnpcc::write_trace_csv((dir / "trace.csv").string(), trace);

  std::vector<double> grid_fitted(grid_original.begin(), grid_original.end());
  if (scaling) bnpcc::apply_scaling(*scaling, grid_fitted);
  auto curve = bnpcc::tau_curve(trace, trace.spec, grid_fitted);
  curve.x_grid.assign(grid_original.begin(), grid_original.end());
  bnpcc::write_tau_curve_csv((dir / "tau_curve.csv").string(), curve);

  const auto comp = bnpcc::component_summary(trace);
  bnpcc::write_components_csv((dir / "components.csv").string(), comp);
  bnpcc::write_summary_csv((dir / "summary.csv").string(), comp.stats);

  bnpcc::Rng rng(seed + kPredictiveSeedOffset);
  auto draws = bnpcc::predictive_sample(trace, trace.spec, fitted.x, rng);
  for (std::size_t i = 0; i < draws.size(); ++i) draws[i].x = x_original[i];
  if (input.is_pseudo) bnpcc::write_predictive_csv((dir / "predictive.csv").string(), draws);
  else bnpcc::write_predictive_csv((dir / "predictive.csv").string(), draws, &input.raw.y1, &input.raw.y2);
}

int run_fit(FitOptions o) {
  if (o.standardize != "auto" && o.standardize != "on" && o.standardize != "off")
    throw bnpcc::ValidationError("--standardize must be auto, on or off");
  if (o.chains == 0) throw bnpcc::ValidationError("--chains must be at least 1");
  if (o.grid_points < 2) throw bnpcc::ValidationError("--grid-points must be at least 2");
  o.mcmc.adapt = !o.no_adapt;
  o.mcmc.validate();
  o.prior.validate();
  const auto spec = bnpcc::CalibrationSpec::from_name(o.calibration);

  const bnpcc::InputData input = bnpcc::load_input(o.data);
  bnpcc::PseudoDataset fitted = input.is_pseudo ? input.pseudo : bnpcc::to_pseudo(input.raw);
  if (fitted.size() < 10) throw bnpcc::ValidationError(o.data + ": need at least 10 observations");
  const std::vector<double> x_original = fitted.x;

  const bool standardize = o.standardize == "on" || (o.standardize == "auto" && !input.is_pseudo);
  std::optional<bnpcc::CovariateScaling> scaling;
  if (standardize) {
    scaling = bnpcc::fit_covariate_scaling(fitted.x);
    bnpcc::apply_scaling(*scaling, fitted.x);
  }
  const auto [xlo, xhi] = std::minmax_element(x_original.begin(), x_original.end());
  const double grid_min = o.grid_min.value_or(*xlo);
  const double grid_max = o.grid_max.value_or(*xhi);
  const auto grid = bnpcc::linear_grid(grid_min, grid_max, o.grid_points);

  std::vector<std::uint64_t> seeds(o.chains);
  for (std::size_t c = 0; c < o.chains; ++c) seeds[c] = o.mcmc.seed + c;

  std::vector<ChainResult> results(o.chains);
  auto work = [&](std::size_t c) {
    try {
      bnpcc::MCMCConfig cfg = o.mcmc;
      cfg.seed = seeds[c];
      results[c].trace = bnpcc::run_chain(fitted, o.prior, spec, cfg);
    } catch (...) {
      results[c].error = std::current_exception();
    }
  };
  if (o.chains == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t c = 0; c < o.chains; ++c) threads.emplace_back(work, c);
    for (auto& t : threads) t.join();
  }
  for (const auto& r : results)
    if (r.error) std::rethrow_exception(r.error);

  const fs::path root(o.out_dir);
  fs::create_directories(root);
  json chains = json::array();
  for (std::size_t c = 0; c < o.chains; ++c) {
    const fs::path dir = o.chains == 1 ? root : root / ("chain_" + std::to_string(c + 1));
    write_chain_outputs(dir, results[c].trace, fitted, x_original, grid, scaling, input, seeds[c]);
    const auto& trace = results[c].trace;
    chains.push_back({{"directory", fs::relative(dir, root).string()},
                      {"seed", seeds[c]},
                      {"predictive_seed", seeds[c] + kPredictiveSeedOffset},
                      {"kept_draws", trace.size()},
                      {"final_rw_step", trace.final_rw_step},
                      {"acceptance_rate", trace.metropolis.rate()}});
  }

  const json manifest = {
      {"tool", "bnpcc"},
      {"version", BNPCC_VERSION},
      {"command", "fit"},
      {"data", o.data},
      {"input_layout", input.is_pseudo ? "pseudo" : "raw"},
      {"n", fitted.size()},
      {"calibration", spec.name()},
      {"prior", {{"lambda", o.prior.total_mass}, {"sigma2", o.prior.base_variance}}},
      {"mcmc",
       {{"iters", o.mcmc.iterations},
        {"burnin", o.mcmc.burn_in},
        {"thin", o.mcmc.thin},
        {"rw_step", o.mcmc.rw_step},
        {"adapt", o.mcmc.adapt},
        {"adapt_window", o.mcmc.adapt_window},
        {"seed", o.mcmc.seed},
        {"check_invariants", o.mcmc.check_invariants}}},
      {"standardize", scaling_json(scaling)},
      {"grid", {{"min", grid_min}, {"max", grid_max}, {"points", o.grid_points}}},
      {"chains", chains},
      {"build", {{"compiler", __VERSION__}, {"cplusplus", __cplusplus}}}};
  write_json(root / "manifest.json", manifest);

  std::vector<double> x_fitted_grid(grid.begin(), grid.end());
  if (scaling) bnpcc::apply_scaling(*scaling, x_fitted_grid);
  for (std::size_t c = 0; c < o.chains; ++c) {
    if (o.chains > 1) std::printf("\n== chain %zu (seed %llu)\n", c + 1, static_cast<unsigned long long>(seeds[c]));
    print_summary(results[c].trace, x_fitted_grid);
  }
  std::printf("\noutputs written to %s\n", root.string().c_str());
  return 0;
}

// --------------------------------------------------------------- summarize

int run_summarize(const SummarizeOptions& o) {
  const auto trace = bnpcc::read_trace_csv(o.trace);
  const auto comp = bnpcc::component_summary(trace);
  const std::string out = o.out.empty() ? (fs::path(o.trace).parent_path() / "summary.csv").string() : o.out;
  bnpcc::write_summary_csv(out, comp.stats);
  print_summary(trace, bnpcc::linear_grid(o.xmin, o.xmax, o.points));
  return 0;
}

// ----------------------------------------------------------------- predict

int run_predict(const PredictOptions& o) {
  const auto trace = bnpcc::read_trace_csv(o.trace);
  std::optional<bnpcc::CovariateScaling> scaling;
  if (!o.manifest.empty()) {
    std::ifstream in(o.manifest);
    if (!in) throw bnpcc::ValidationError("cannot open '" + o.manifest + "'");
    try {
      scaling = scaling_from_json(json::parse(in).at("standardize"));
    } catch (const json::exception& e) {
      throw bnpcc::ValidationError(o.manifest + ": " + e.what());
    }
  }

  std::vector<double> x_original;
  const std::vector<double>* ref_y1 = nullptr;
  const std::vector<double>* ref_y2 = nullptr;
  std::optional<bnpcc::InputData> data;
  std::optional<bnpcc::InputData> reference;
  if (o.grid_points > 0) {
    x_original = bnpcc::linear_grid(o.xmin, o.xmax, o.grid_points);
  } else if (!o.data.empty()) {
    data = bnpcc::load_input(o.data);
    x_original = data->is_pseudo ? data->pseudo.x : data->raw.x;
  } else {
    throw bnpcc::ValidationError("predict needs --data or --grid-points");
  }
  if (!o.reference.empty()) {
    reference = bnpcc::load_input(o.reference);
    if (reference->is_pseudo) throw bnpcc::ValidationError(o.reference + ": reference needs columns y1 and y2");
    ref_y1 = &reference->raw.y1;
    ref_y2 = &reference->raw.y2;
  } else if (data && !data->is_pseudo) {
    ref_y1 = &data->raw.y1;
    ref_y2 = &data->raw.y2;
  }

  std::vector<double> x_fitted = x_original;
  if (scaling) bnpcc::apply_scaling(*scaling, x_fitted);
  bnpcc::Rng rng(o.seed);
  auto draws = bnpcc::predictive_sample(trace, trace.spec, x_fitted, rng);
  for (std::size_t i = 0; i < draws.size(); ++i) draws[i].x = x_original[i];
  bnpcc::write_predictive_csv(o.out, draws, ref_y1, ref_y2);
  std::printf("wrote %zu predictive draws to %s\n", draws.size(), o.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet-process mixtures of conditional Gaussian copulas"};
  app.set_version_flag("--version", BNPCC_VERSION);
  app.require_subcommand(1);
  app.set_config("--config", "", "INI file: [verb] sections of key = value option defaults");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate pseudo-observations from a conditional copula");
  simulate->add_option("--family", sim.family, "Copula family: gaussian or frank")->capture_default_str();
  simulate->add_option("--calibration", sim.calibration, "quadratic or expbump")->capture_default_str();
  simulate->add_option("--beta", sim.beta, "Generating coefficients, comma separated")->delimiter(',');
  simulate->add_option("--n", sim.n, "Number of observations")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--xmin", sim.xmin, "Lower end of the covariate range")->capture_default_str();
  simulate->add_option("--xmax", sim.xmax, "Upper end of the covariate range")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output CSV (u,v,x)")->required();

  FitOptions fit;
  auto* fitcmd = app.add_subcommand("fit", "Run the slice sampler and write trace and summaries");
  fitcmd->add_option("--data", fit.data, "CSV with columns y1,y2,x or u,v,x")->required();
  fitcmd->add_option("--out-dir", fit.out_dir, "Output directory")->capture_default_str();
  fitcmd->add_option("--calibration", fit.calibration, "quadratic or expbump")->capture_default_str();
  fitcmd->add_option("--iters", fit.mcmc.iterations, "Total iterations")->capture_default_str();
  fitcmd->add_option("--burnin", fit.mcmc.burn_in, "Burn-in iterations")->capture_default_str();
  fitcmd->add_option("--thin", fit.mcmc.thin, "Keep every thin-th iteration after burn-in")->capture_default_str();
  fitcmd->add_option("--lambda", fit.prior.total_mass, "Dirichlet-process total mass")->capture_default_str();
  fitcmd->add_option("--sigma2", fit.prior.base_variance, "Base-measure variance")->capture_default_str();
  fitcmd->add_option("--rw-step", fit.mcmc.rw_step, "Initial random-walk scale")->capture_default_str();
  fitcmd->add_option("--adapt-window", fit.mcmc.adapt_window, "Iterations between step adjustments")
      ->capture_default_str();
  fitcmd->add_flag("--no-adapt", fit.no_adapt, "Keep the random-walk scale fixed");
  fitcmd->add_option("--seed", fit.mcmc.seed, "Random seed (chain c uses seed + c - 1)")->capture_default_str();
  fitcmd->add_option("--standardize", fit.standardize, "Map x to [-2,2]: auto, on or off")->capture_default_str();
  fitcmd->add_option("--grid-points", fit.grid_points, "Points in the tau(x) grid")->capture_default_str();
  fitcmd->add_option("--grid-min", fit.grid_min, "Lower end of the tau(x) grid (default: min x)");
  fitcmd->add_option("--grid-max", fit.grid_max, "Upper end of the tau(x) grid (default: max x)");
  fitcmd->add_option("--chains", fit.chains, "Independent chains, run concurrently")->capture_default_str();
  fitcmd->add_flag("--check-invariants", fit.mcmc.check_invariants, "Verify sampler state after every sweep");

  SummarizeOptions sum;
  auto* summarize = app.add_subcommand("summarize", "Print occupied-component statistics for a trace");
  summarize->add_option("--trace", sum.trace, "Trace CSV written by fit")->required();
  summarize->add_option("--out", sum.out, "Summary CSV (default: summary.csv next to the trace)");
  summarize->add_option("--xmin", sum.xmin, "Covariate range for component rho (fitted scale)")
      ->capture_default_str();
  summarize->add_option("--xmax", sum.xmax, "Covariate range for component rho (fitted scale)")
      ->capture_default_str();
  summarize->add_option("--points", sum.points, "Covariate points averaged for component rho")
      ->capture_default_str();

  PredictOptions pred;
  auto* predict = app.add_subcommand("predict", "Draw posterior predictive pairs from a trace");
  predict->add_option("--trace", pred.trace, "Trace CSV written by fit")->required();
  predict->add_option("--out", pred.out, "Output CSV")->required();
  predict->add_option("--data", pred.data, "CSV whose x column gives the covariates");
  predict->add_option("--reference", pred.reference, "CSV with y1,y2 for data-scale columns");
  predict->add_option("--manifest", pred.manifest, "manifest.json of the fit (covariate scaling)");
  predict->add_option("--seed", pred.seed, "Random seed")->capture_default_str();
  predict->add_option("--grid-points", pred.grid_points, "Use an evenly spaced covariate grid instead of --data");
  predict->add_option("--xmin", pred.xmin, "Grid lower end (data scale)")->capture_default_str();
  predict->add_option("--xmax", pred.xmax, "Grid upper end (data scale)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*fitcmd) return run_fit(fit);
    if (*summarize) return run_summarize(sum);
    if (*predict) return run_predict(pred);
  } catch (const bnpcc::ConsistencyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
