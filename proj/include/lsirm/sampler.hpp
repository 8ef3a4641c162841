#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "lsirm/error.hpp"
#include "lsirm/model.hpp"
#include "lsirm/random.hpp"

namespace lsirm {

// ---------------------------------------------------------------------------
// Generic Metropolis-Hastings kernels
// ---------------------------------------------------------------------------

template <class T>
struct MhResult {
  T value;
  bool accepted;
};

inline double mh_acceptance_probability(double log_ratio) {
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

// Random-walk update with a Normal(0, step^2) proposal. Draw order on the
// stream: one normal for the proposal, then one uniform for the decision.
// `log_current` must equal log_target(current).
template <class LogTarget>
MhResult<double> mh_update_scalar(double current, double log_current,
                                  LogTarget&& log_target, double step,
                                  Stream& rng) {
  if (!std::isfinite(log_current))
    throw ContractViolation("mh_update_scalar: log target not finite at current value");
  const double proposal = current + step * rng.normal();
  const double u = rng.uniform();
  const double log_proposal = log_target(proposal);
  if (!std::isfinite(log_proposal)) return {current, false};
  if (std::log(u) < log_proposal - log_current) return {proposal, true};
  return {current, false};
}

template <class LogTarget>
MhResult<double> mh_update_scalar(double current, LogTarget&& log_target,
                                  double step, Stream& rng) {
  const double log_current = log_target(current);
  return mh_update_scalar(current, log_current, log_target, step, rng);
}

// Spherical Normal(0, step^2 I) proposal; K normals, then one uniform.
template <class LogTarget>
MhResult<arma::vec> mh_update_vector(const arma::vec& current, double log_current,
                                     LogTarget&& log_target, double step,
                                     Stream& rng) {
  if (!std::isfinite(log_current))
    throw ContractViolation("mh_update_vector: log target not finite at current value");
  arma::vec proposal(current.n_elem);
  for (std::size_t k = 0; k < current.n_elem; ++k)
    proposal[k] = current[k] + step * rng.normal();
  const double u = rng.uniform();
  const double log_proposal = log_target(proposal);
  if (!std::isfinite(log_proposal)) return {current, false};
  if (std::log(u) < log_proposal - log_current) return {std::move(proposal), true};
  return {current, false};
}

template <class LogTarget>
MhResult<arma::vec> mh_update_vector(const arma::vec& current,
                                     LogTarget&& log_target, double step,
                                     Stream& rng) {
  const double log_current = log_target(current);
  return mh_update_vector(current, log_current, log_target, step, rng);
}

// Exact draw from the sigma_theta^2 full conditional,
// Inverse-Gamma(N/2 + a, sum(theta^2)/2 + b).
double gibbs_update_sigma_theta(const arma::vec& theta, double a_sigma,
                                double b_sigma, Stream& rng);

// Yea with probability logistic(theta_i + beta_j - gamma ||z_i - w_j||).
Vote impute_missing_cell(const ModelState& state, std::size_t i, std::size_t j,
                         Stream& rng);

// ---------------------------------------------------------------------------
// Configuration and output
// ---------------------------------------------------------------------------

struct StepSizes {
  double theta = 1.0;
  double beta = 0.4;
  double log_gamma = 0.05;
  double z = 0.5;
  double w = 0.5;
};

enum class InitMethod { Random, Pca };

struct SamplerConfig {
  std::size_t n_iterations = 30000;
  std::size_t burn_in = 5000;
  std::size_t thin = 5;
  StepSizes steps;
  std::uint64_t seed = 0;
  bool adapt_during_burnin = true;
  std::size_t n_chains = 1;

  std::size_t adapt_interval = 50;
  double target_accept_scalar = 0.44;
  double target_accept_vector = 0.234;
  bool update_sigma_theta = true;
  InitMethod init = InitMethod::Random;
  // Threads used inside a sweep. Output does not depend on this value.
  std::size_t workers = 1;

  void validate() const;  // throws ConfigError
  std::size_t n_stored() const { return (n_iterations - burn_in) / thin; }
};

struct BlockCounts {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  double rate() const {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / proposed;
  }
};

struct AcceptanceCounts {
  BlockCounts theta, beta, log_gamma, z, w;
};

struct AcceptanceRates {
  double theta = 0, beta = 0, log_gamma = 0, z = 0, w = 0;
};

AcceptanceRates rates(const AcceptanceCounts& c);

struct ChainDraws {
  std::vector<ModelState> draws;
  AcceptanceRates acceptance_rates;  // post burn-in
  AcceptanceCounts counts;           // post burn-in
  std::uint64_t seed = 0;
  std::uint32_t chain = 0;
  SamplerConfig config;
  StepSizes final_steps;  // after burn-in adaptation
  double wall_clock_seconds = 0.0;
};

// ---------------------------------------------------------------------------
// Gibbs sweep
// ---------------------------------------------------------------------------

enum class TargetMode {
  // Each MH decision uses only the cells touching the updated parameter.
  Conditional,
  // Each MH decision evaluates the full log posterior (slow; for checking).
  FullPosterior,
};

struct SweepSettings {
  StepSizes steps;
  std::uint64_t seed = 0;
  std::uint32_t chain = 0;
  std::uint32_t iteration = 0;
  std::size_t workers = 1;
  bool update_sigma_theta = true;
  TargetMode mode = TargetMode::Conditional;
};

// Holds the completed (observed + imputed) data and the N x P distance
// cache used by the conditional targets.
class Sweeper {
 public:
  Sweeper(const VoteMatrix& data, const Hyperparams& hyper);

  // Steps (1)-(7): impute, theta, beta, log gamma, z, w, sigma_theta^2.
  void sweep(ModelState& state, const SweepSettings& settings,
             AcceptanceCounts& counts);

  // Conditional log densities up to constants, evaluated against the
  // completed data and the distance cache for `state`.
  void refresh_distances(const ModelState& state);
  double theta_conditional(const ModelState& state, std::size_t i,
                           double value) const;
  double beta_conditional(const ModelState& state, std::size_t j,
                          double value) const;
  double log_gamma_conditional(const ModelState& state, double log_gamma) const;
  double z_conditional(const ModelState& state, std::size_t i,
                       const arma::vec& position) const;
  double w_conditional(const ModelState& state, std::size_t j,
                       const arma::vec& position) const;

  void impute(const ModelState& state, const SweepSettings& settings);
  VoteMatrix completed() const;
  const VoteMatrix& data() const { return data_; }

 private:
  double cell(std::size_t i, std::size_t j, double eta) const {
    return yea_[i * p_ + j] ? -softplus(-eta) : -softplus(eta);
  }
  double full_target(ModelState& state) const;

  const VoteMatrix& data_;
  Hyperparams hyper_;
  std::size_t n_, p_;
  std::vector<std::uint8_t> yea_;    // completed data, row-major
  std::vector<std::size_t> missing_;  // linear indices of Missing cells
  std::vector<double> dist_;          // row-major N x P
  // Per-cell log-likelihood at the current state, and scratch space for
  // proposals (each index of a block writes only its own row or column).
  std::vector<double> ll_, ll_next_, dist_next_;
};

ModelState gibbs_sweep(const ModelState& state, const VoteMatrix& data,
                       const Hyperparams& hyper, const SweepSettings& settings,
                       AcceptanceCounts* counts = nullptr);

// theta = beta = 0, gamma = exp(mu_gamma), sigma_theta^2 = 1; z and w from
// 0.1 * N(0, 1), or from the leading singular vectors of the double-centred
// +/-1 vote matrix.
ModelState initial_state(const VoteMatrix& data, const Hyperparams& hyper,
                         InitMethod method, std::uint64_t seed,
                         std::uint32_t chain = 0);

ChainDraws run_chain(const VoteMatrix& data, const Hyperparams& hyper,
                     const SamplerConfig& config, std::uint32_t chain = 0,
                     std::optional<ModelState> init = std::nullopt);

// config.n_chains independent chains, run concurrently.
std::vector<ChainDraws> run_chains(const VoteMatrix& data,
                                   const Hyperparams& hyper,
                                   const SamplerConfig& config);

// Robbins-Monro update of a log step size toward a target acceptance rate.
double adapt_step(double step, double acceptance, double target,
                  std::size_t round);

}  // namespace lsirm
