#ifndef BNPCC_SAMPLER_HPP
#define BNPCC_SAMPLER_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "bnpcc/calibration.hpp"
#include "bnpcc/copula.hpp"
#include "bnpcc/error.hpp"
#include "bnpcc/normal.hpp"
#include "bnpcc/pseudo.hpp"
#include "bnpcc/random.hpp"

namespace bnpcc {

/// Dirichlet-process prior: total mass lambda and base measure
/// G0 = N(0, sigma^2 I) over calibration coefficients.
struct PriorConfig {
  double total_mass = 1.0;
  double base_variance = 100.0;

  void validate() const {
    if (!(total_mass > 0.0) || !std::isfinite(total_mass)) throw ValidationError("total mass must be positive");
    if (!(base_variance > 0.0) || !std::isfinite(base_variance))
      throw ValidationError("base-measure variance must be positive");
  }
};

struct MCMCConfig {
  std::size_t iterations = 4000;
  std::size_t burn_in = 3500;
  std::size_t thin = 1;
  // Random-walk scale. A component with m members proposes with standard
  // deviation rw_step / sqrt(m) per coordinate.
  double rw_step = 0.25;
  // Tune rw_step during burn-in towards 25-40% acceptance; frozen afterwards.
  bool adapt = true;
  std::size_t adapt_window = 50;
  std::uint64_t seed = 1;
  // Verify MixtureState invariants after every sweep.
  bool check_invariants = false;

  void validate() const {
    if (iterations == 0) throw ValidationError("iterations must be positive");
    if (burn_in >= iterations) throw ValidationError("burn-in must be smaller than the number of iterations");
    if (thin == 0) throw ValidationError("thin must be positive");
    if (!(rw_step > 0.0) || !std::isfinite(rw_step)) throw ValidationError("rw_step must be positive");
    if (adapt_window == 0) throw ValidationError("adapt_window must be positive");
  }
};

/// Full state of the slice sampler. Components are 0-based here; files and
/// reports number them from 1.
struct MixtureState {
  std::vector<double> sticks;             // pi_j
  std::vector<double> weights;            // w_j = pi_j prod_{l<j} (1 - pi_l)
  std::vector<double> slices;             // z_i
  std::vector<std::size_t> allocations;   // d_i
  std::vector<BetaVector> atoms;          // beta_j

  std::size_t instantiated() const { return sticks.size(); }

  std::vector<std::size_t> occupancy() const {
    std::vector<std::size_t> counts(instantiated(), 0);
    for (std::size_t d : allocations) ++counts.at(d);
    return counts;
  }

  std::size_t occupied_count() const {
    const auto counts = occupancy();
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
  }

  // Stick mass not yet assigned to an instantiated component.
  double remaining_mass() const {
    double rem = 1.0;
    for (double p : sticks) rem *= 1.0 - p;
    return rem;
  }
};

inline std::vector<double> stick_weights(std::span<const double> sticks) {
  std::vector<double> w(sticks.size());
  double rem = 1.0;
  for (std::size_t j = 0; j < sticks.size(); ++j) {
    w[j] = sticks[j] * rem;
    rem *= 1.0 - sticks[j];
  }
  return w;
}

/// Smallest m with w_1 + ... + w_m > 1 - z, or 0 when the listed weights do
/// not reach that level and more components must be instantiated.
inline std::size_t slice_truncation_level(std::span<const double> weights, double z) {
  double cumulative = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    cumulative += weights[j];
    if (cumulative > 1.0 - z) return j + 1;
  }
  return 0;
}

/// Throws ConsistencyError unless the state satisfies its invariants:
/// sticks in (0,1), positive weights with positive leftover mass, one atom
/// per component of dimension `dim`, valid allocations and 0 < z_i < w_{d_i}.
inline void check_state(const MixtureState& s, std::size_t dim) {
  const std::size_t k = s.instantiated();
  if (s.weights.size() != k || s.atoms.size() != k)
    throw ConsistencyError("sticks, weights and atoms differ in length");
  if (s.slices.size() != s.allocations.size()) throw ConsistencyError("slices and allocations differ in length");
  for (std::size_t j = 0; j < k; ++j) {
    if (!(s.sticks[j] > 0.0 && s.sticks[j] < 1.0)) throw ConsistencyError("stick outside (0,1)");
    if (!(s.weights[j] > 0.0)) throw ConsistencyError("non-positive weight at component " + std::to_string(j + 1));
    if (s.atoms[j].size() != dim) throw ConsistencyError("atom dimension mismatch");
  }
  if (!(s.remaining_mass() > 0.0)) throw ConsistencyError("weights exhaust the unit stick");
  for (std::size_t i = 0; i < s.allocations.size(); ++i) {
    const std::size_t d = s.allocations[i];
    if (d >= k) throw ConsistencyError("allocation points at a missing component");
    if (!(s.slices[i] > 0.0 && s.slices[i] < s.weights[d]))
      throw ConsistencyError("slice variable outside (0, w_d) for observation " + std::to_string(i + 1));
  }
}

/// One observation in the form the kernels consume: normal scores of (u, v)
/// and the covariate.
struct CopulaObservation {
  double q1;
  double q2;
  double x;
};

/// Scores Phi^-1(u), Phi^-1(v) after clamping u, v to [1/(2n), 1 - 1/(2n)].
inline std::vector<CopulaObservation> to_observations(const PseudoDataset& data) {
  data.validate();
  const double lo = 0.5 / static_cast<double>(data.size());
  const double hi = 1.0 - lo;
  std::vector<CopulaObservation> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = {std_normal_quantile(std::clamp(data.u[i], lo, hi)),
              std_normal_quantile(std::clamp(data.v[i], lo, hi)), data.x[i]};
  }
  return out;
}

template <class K>
concept ObservationKernel = requires(const K& kernel, const CopulaObservation& obs, CalibrationFamily family,
                                     std::span<const double> beta) {
  { kernel.log_density(obs, family, beta) } -> std::convertible_to<double>;
};

/// log c_{rho(x|beta)}(u, v) for a conditional Gaussian copula.
struct GaussianCopulaKernel {
  double log_density(const CopulaObservation& obs, CalibrationFamily family, std::span<const double> beta) const {
    const double rho = clamp_rho(link_rho_value(calibration_value(family, beta, obs.x)));
    return gaussian_copula_log_density_scores(obs.q1, obs.q2, rho);
  }
};

// Likelihood switched off: the sampler then explores the prior alone.
struct FlatKernel {
  double log_density(const CopulaObservation&, CalibrationFamily, std::span<const double>) const { return 0.0; }
};

struct MetropolisCounters {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;

  double rate() const { return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed); }
};

/// One kept iteration.
struct TraceDraw {
  std::size_t iteration = 0;
  std::size_t occupied = 0;             // D*
  std::vector<double> weights;          // instantiated components
  std::vector<std::size_t> occupancy;   // members per component
  std::vector<BetaVector> atoms;
};

struct ChainTrace {
  CalibrationSpec spec;
  std::vector<TraceDraw> draws;
  MetropolisCounters metropolis;
  double final_rw_step = 0.0;

  bool empty() const { return draws.empty(); }
  std::size_t size() const { return draws.size(); }
};

/// Log of the complete-data likelihood
///   prod_i 1(z_i < w_{d_i}) c_{rho(x_i | beta_{d_i})}(u_i, v_i),
/// or -infinity when an indicator fails.
template <ObservationKernel Kernel = GaussianCopulaKernel>
double complete_log_likelihood(const MixtureState& s, std::span<const CopulaObservation> obs,
                               const CalibrationSpec& spec, const Kernel& kernel = {}) {
  double total = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::size_t d = s.allocations[i];
    if (!(s.slices[i] < s.weights[d])) return -std::numeric_limits<double>::infinity();
    total += kernel.log_density(obs[i], spec.family(), s.atoms[d].values());
  }
  return total;
}

/// Slice-sampling Gibbs sampler for a Dirichlet-process mixture of
/// conditional copulas (Walker's slice sampler with a random-walk
/// Metropolis step for the calibration coefficients).
///
/// A sweep updates, in order: sticks, slice variables, the truncation level
/// N*, allocations, and atoms. Everything is driven by one mt19937_64 stream
/// seeded from MCMCConfig::seed, so a run is reproducible bit for bit.
template <ObservationKernel Kernel = GaussianCopulaKernel>
class SliceSampler {
 public:
  SliceSampler(const PseudoDataset& data, PriorConfig prior, CalibrationSpec spec, MCMCConfig config,
               Kernel kernel = {})
      : obs_(to_observations(data)),
        prior_(prior),
        spec_(spec),
        config_(config),
        kernel_(kernel),
        rng_(config.seed),
        rw_step_(config.rw_step) {
    prior_.validate();
    config_.validate();
  }

  std::span<const CopulaObservation> observations() const { return obs_; }
  const CalibrationSpec& spec() const { return spec_; }
  Rng& rng() { return rng_; }
  double rw_step() const { return rw_step_; }
  void set_rw_step(double step) { rw_step_ = step; }
  const MetropolisCounters& counters() const { return counters_; }

  BetaVector draw_from_base(Rng& rng) {
    const double sd = std::sqrt(prior_.base_variance);
    std::vector<double> b(spec_.dim());
    for (double& value : b) value = sd * standard_normal(rng);
    return BetaVector(std::move(b));
  }

  double log_prior(const BetaVector& beta) const {
    double ss = 0.0;
    for (double b : beta) ss += b * b;
    return -0.5 * ss / prior_.base_variance;
  }

  double log_likelihood(const BetaVector& beta, std::span<const std::size_t> members) const {
    double total = 0.0;
    for (std::size_t i : members) total += kernel_.log_density(obs_[i], spec_.family(), beta.values());
    return total;
  }

  /// Log Metropolis ratio for moving a component with the given members
  /// from `current` to `proposal` under a symmetric proposal.
  double log_acceptance_ratio(const BetaVector& current, const BetaVector& proposal,
                              std::span<const std::size_t> members) const {
    return log_prior(proposal) - log_prior(current) + log_likelihood(proposal, members) -
           log_likelihood(current, members);
  }

  /// Single component holding every observation, atom from G0, stick from
  /// Be(1, lambda), slices uniform under its weight.
  MixtureState init_state() {
    MixtureState s;
    s.sticks = {beta_draw(rng_, 1.0, prior_.total_mass)};
    s.weights = stick_weights(s.sticks);
    s.atoms = {draw_from_base(rng_)};
    s.allocations.assign(obs_.size(), 0);
    s.slices.resize(obs_.size());
    for (double& z : s.slices) z = s.weights[0] * uniform_open(rng_);
    return s;
  }

  /// pi_j ~ Be(1 + #{d_i = j}, lambda + #{d_i > j}) for j up to the largest
  /// allocated index. Components past it are dropped; their sticks and atoms
  /// would be fresh prior draws and are re-created by extend_to_nstar.
  void update_sticks(MixtureState& s) {
    const std::size_t keep = 1 + *std::max_element(s.allocations.begin(), s.allocations.end());
    s.sticks.resize(keep);
    s.atoms.resize(keep);
    const auto counts = s.occupancy();
    std::size_t above = obs_.size();
    for (std::size_t j = 0; j < keep; ++j) {
      above -= counts[j];
      s.sticks[j] = beta_draw(rng_, 1.0 + static_cast<double>(counts[j]),
                              prior_.total_mass + static_cast<double>(above));
    }
    s.weights = stick_weights(s.sticks);
  }

  /// z_i ~ U(0, w_{d_i}).
  void update_slices(MixtureState& s) {
    for (std::size_t i = 0; i < s.slices.size(); ++i) s.slices[i] = s.weights[s.allocations[i]] * uniform_open(rng_);
  }

  /// Instantiate components until the unassigned stick mass falls below
  /// min_i z_i, i.e. up to N* = max_i N*_i. Every j with w_j > z_i is then
  /// instantiated for every i.
  void extend_to_nstar(MixtureState& s) {
    const double z_min = *std::min_element(s.slices.begin(), s.slices.end());
    double rem = s.remaining_mass();
    while (rem >= z_min) {
      if (s.sticks.size() >= kMaxComponents) throw ConsistencyError("truncation level exceeded component cap");
      const double pi = beta_draw(rng_, 1.0, prior_.total_mass);
      s.sticks.push_back(pi);
      s.weights.push_back(pi * rem);
      s.atoms.push_back(draw_from_base(rng_));
      rem *= 1.0 - pi;
    }
  }

  /// P(d_i = j) proportional to 1(z_i < w_j) c_{rho(x_i|beta_j)}(u_i, v_i).
  void update_allocations(MixtureState& s) {
    const std::size_t k = s.instantiated();
    std::vector<std::size_t> candidates;
    std::vector<double> logp;
    candidates.reserve(k);
    logp.reserve(k);
    for (std::size_t i = 0; i < obs_.size(); ++i) {
      candidates.clear();
      logp.clear();
      for (std::size_t j = 0; j < k; ++j) {
        if (s.weights[j] > s.slices[i]) {
          candidates.push_back(j);
          logp.push_back(kernel_.log_density(obs_[i], spec_.family(), s.atoms[j].values()));
        }
      }
      if (candidates.empty())
        throw ConsistencyError("empty allocation candidate set for observation " + std::to_string(i + 1));
      s.allocations[i] = candidates[sample_log_categorical(logp)];
    }
  }

  /// One random-walk Metropolis step per occupied component; empty
  /// components are redrawn from G0.
  void update_betas(MixtureState& s) {
    const std::size_t k = s.instantiated();
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < s.allocations.size(); ++i) members[s.allocations[i]].push_back(i);

    for (std::size_t j = 0; j < k; ++j) {
      if (members[j].empty()) {
        s.atoms[j] = draw_from_base(rng_);
        continue;
      }
      const double scale = rw_step_ / std::sqrt(static_cast<double>(members[j].size()));
      std::vector<double> proposal(s.atoms[j].begin(), s.atoms[j].end());
      for (double& b : proposal) b += scale * standard_normal(rng_);
      BetaVector candidate(std::move(proposal));
      const double log_ratio = log_acceptance_ratio(s.atoms[j], candidate, members[j]);
      const bool accept = log_ratio >= 0.0 || std::log(uniform_open(rng_)) < log_ratio;
      ++counters_.proposed;
      window_proposed_ += static_cast<double>(members[j].size());
      if (accept) {
        s.atoms[j] = std::move(candidate);
        ++counters_.accepted;
        window_accepted_ += static_cast<double>(members[j].size());
      }
    }
  }

  void sweep(MixtureState& s) {
    update_sticks(s);
    update_slices(s);
    extend_to_nstar(s);
    update_allocations(s);
    update_betas(s);
  }

  /// Full chain: init, then `iterations` sweeps; sweeps after burn-in are
  /// kept every `thin`-th iteration.
  ChainTrace run() {
    ChainTrace trace{spec_, {}, {}, 0.0};
    trace.draws.reserve((config_.iterations - config_.burn_in) / config_.thin);
    MixtureState s = init_state();
    for (std::size_t t = 1; t <= config_.iterations; ++t) {
      sweep(s);
      if (config_.check_invariants) check_state(s, spec_.dim());
      if (t <= config_.burn_in) {
        if (config_.adapt && t % config_.adapt_window == 0) adapt_step();
        continue;
      }
      if ((t - config_.burn_in) % config_.thin == 0) trace.draws.push_back(snapshot(s, t));
    }
    trace.metropolis = counters_;
    trace.final_rw_step = rw_step_;
    return trace;
  }

  static TraceDraw snapshot(const MixtureState& s, std::size_t iteration) {
    TraceDraw draw;
    draw.iteration = iteration;
    draw.weights = s.weights;
    draw.occupancy = s.occupancy();
    draw.atoms = s.atoms;
    draw.occupied = static_cast<std::size_t>(
        std::count_if(draw.occupancy.begin(), draw.occupancy.end(), [](std::size_t c) { return c > 0; }));
    return draw;
  }

 private:
  static constexpr std::size_t kMaxComponents = 100000;

  std::size_t sample_log_categorical(std::span<const double> logp) {
    if (logp.size() == 1) return 0;
    const double top = *std::max_element(logp.begin(), logp.end());
    double total = 0.0;
    for (double lp : logp) total += std::exp(lp - top);
    double target = uniform_open(rng_) * total;
    for (std::size_t j = 0; j < logp.size(); ++j) {
      target -= std::exp(logp[j] - top);
      if (target <= 0.0) return j;
    }
    return logp.size() - 1;
  }

  // Occupancy-weighted acceptance over the last window, so the scale tracks
  // the components holding most of the data.
  void adapt_step() {
    if (window_proposed_ > 0.0) {
      const double rate = window_accepted_ / window_proposed_;
      if (rate < 0.25) rw_step_ *= 0.8;
      else if (rate > 0.40) rw_step_ *= 1.25;
    }
    window_proposed_ = 0.0;
    window_accepted_ = 0.0;
  }

  std::vector<CopulaObservation> obs_;
  PriorConfig prior_;
  CalibrationSpec spec_;
  MCMCConfig config_;
  Kernel kernel_;
  Rng rng_;
  double rw_step_;
  MetropolisCounters counters_;
  double window_proposed_ = 0.0;
  double window_accepted_ = 0.0;
};

template <ObservationKernel Kernel = GaussianCopulaKernel>
ChainTrace run_chain(const PseudoDataset& data, const PriorConfig& prior, const CalibrationSpec& spec,
                     const MCMCConfig& config, Kernel kernel = {}) {
  SliceSampler<Kernel> sampler(data, prior, spec, config, kernel);
  return sampler.run();
}

}  // namespace bnpcc

#endif  // BNPCC_SAMPLER_HPP
