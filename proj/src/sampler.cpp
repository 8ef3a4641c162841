#include "lsirm/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "lsirm/parallel.hpp"

namespace lsirm {

double gibbs_update_sigma_theta(const arma::vec& theta, double a_sigma,
                                double b_sigma, Stream& rng) {
  require(a_sigma > 0.0 && b_sigma > 0.0,
          "gibbs_update_sigma_theta: a_sigma and b_sigma must be positive");
  double ss = 0.0;
  for (double t : theta) ss += t * t;
  const double shape = 0.5 * static_cast<double>(theta.n_elem) + a_sigma;
  const double scale = 0.5 * ss + b_sigma;
  return rng.inverse_gamma(shape, scale);
}

Vote impute_missing_cell(const ModelState& state, std::size_t i, std::size_t j,
                         Stream& rng) {
  const double p = logistic(linear_predictor(state, i, j));
  return rng.uniform() < p ? Vote::Yea : Vote::Nay;
}

void SamplerConfig::validate() const {
  if (n_iterations == 0) throw ConfigError("n_iterations must be positive");
  if (burn_in >= n_iterations) throw ConfigError("burn_in must be < n_iterations");
  if (thin == 0) throw ConfigError("thin must be >= 1");
  if (n_chains == 0) throw ConfigError("n_chains must be >= 1");
  if (adapt_interval == 0) throw ConfigError("adapt_interval must be >= 1");
  if (n_iterations > 0xffffffffull) throw ConfigError("n_iterations too large");
  for (double s : {steps.theta, steps.beta, steps.log_gamma, steps.z, steps.w})
    if (!(s >= 0.0) || !std::isfinite(s))
      throw ConfigError("step sizes must be finite and non-negative");
  if (!(target_accept_scalar > 0 && target_accept_scalar < 1) ||
      !(target_accept_vector > 0 && target_accept_vector < 1))
    throw ConfigError("target acceptance rates must lie in (0, 1)");
}

AcceptanceRates rates(const AcceptanceCounts& c) {
  return {c.theta.rate(), c.beta.rate(), c.log_gamma.rate(), c.z.rate(),
          c.w.rate()};
}

namespace {

void tally(BlockCounts& block, const std::vector<std::uint8_t>& accepted) {
  block.proposed += accepted.size();
  for (auto a : accepted) block.accepted += a;
}

}  // namespace

// ---------------------------------------------------------------------------

Sweeper::Sweeper(const VoteMatrix& data, const Hyperparams& hyper)
    : data_(data),
      hyper_(hyper),
      n_(data.n_legislators()),
      p_(data.n_bills()),
      yea_(n_ * p_, 0),
      dist_(n_ * p_, 0.0) {
  hyper_.validate();
  for (std::size_t c = 0; c < n_ * p_; ++c) {
    const Vote v = data.cells()[c];
    if (v == Vote::Missing)
      missing_.push_back(c);
    else
      yea_[c] = v == Vote::Yea;
  }
}

void Sweeper::refresh_distances(const ModelState& state) {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < p_; ++j)
      dist_[i * p_ + j] = latent_distance(state.z, i, state.w, j);
}

double Sweeper::theta_conditional(const ModelState& s, std::size_t i,
                                  double value) const {
  double total = -0.5 * value * value / s.sigma_theta_sq;
  const double* d = &dist_[i * p_];
  for (std::size_t j = 0; j < p_; ++j)
    total += cell(i, j, value + s.beta[j] - s.gamma * d[j]);
  return total;
}

double Sweeper::beta_conditional(const ModelState& s, std::size_t j,
                                 double value) const {
  double total = -0.5 * value * value / hyper_.sigma_beta_sq;
  for (std::size_t i = 0; i < n_; ++i)
    total += cell(i, j, s.theta[i] + value - s.gamma * dist_[i * p_ + j]);
  return total;
}

double Sweeper::log_gamma_conditional(const ModelState& s,
                                      double log_gamma) const {
  const double diff = log_gamma - hyper_.mu_gamma;
  double total = -0.5 * diff * diff / hyper_.sigma_gamma_sq;
  const double gamma = std::exp(log_gamma);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* d = &dist_[i * p_];
    const double t = s.theta[i];
    for (std::size_t j = 0; j < p_; ++j)
      total += cell(i, j, t + s.beta[j] - gamma * d[j]);
  }
  return total;
}

double Sweeper::z_conditional(const ModelState& s, std::size_t i,
                              const arma::vec& position) const {
  const std::size_t k = s.dims();
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) total -= 0.5 * position[c] * position[c];
  for (std::size_t j = 0; j < p_; ++j) {
    double ss = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double diff = position[c] - s.w.at(j, c);
      ss += diff * diff;
    }
    total += cell(i, j, s.theta[i] + s.beta[j] - s.gamma * std::sqrt(ss));
  }
  return total;
}

double Sweeper::w_conditional(const ModelState& s, std::size_t j,
                              const arma::vec& position) const {
  const std::size_t k = s.dims();
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) total -= 0.5 * position[c] * position[c];
  for (std::size_t i = 0; i < n_; ++i) {
    double ss = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double diff = s.z.at(i, c) - position[c];
      ss += diff * diff;
    }
    total += cell(i, j, s.theta[i] + s.beta[j] - s.gamma * std::sqrt(ss));
  }
  return total;
}

void Sweeper::impute(const ModelState& state, const SweepSettings& st) {
  parallel_for(missing_.size(), st.workers, [&](std::size_t m) {
    const std::size_t c = missing_[m];
    Stream rng({st.seed, st.chain, st.iteration, Block::Impute,
                static_cast<std::uint32_t>(c)});
    yea_[c] = impute_missing_cell(state, c / p_, c % p_, rng) == Vote::Yea;
  });
}

VoteMatrix Sweeper::completed() const {
  VoteMatrix out = data_;
  for (std::size_t c = 0; c < n_ * p_; ++c)
    out(c / p_, c % p_) = yea_[c] ? Vote::Yea : Vote::Nay;
  return out;
}

double Sweeper::full_target(ModelState& state) const {
  return log_posterior(state, completed(), hyper_);
}

void Sweeper::sweep(ModelState& s, const SweepSettings& st,
                    AcceptanceCounts& counts) {
  s.validate();
  require(s.n_legislators() == n_ && s.n_bills() == p_ && s.dims() == hyper_.k,
          "gibbs_sweep: state does not match data / hyperparameters");
  const bool full = st.mode == TargetMode::FullPosterior;
  const std::size_t workers = full ? 1 : st.workers;
  const std::size_t k = s.dims();
  auto stream = [&](Block b, std::size_t index) {
    return Stream({st.seed, st.chain, st.iteration, b,
                   static_cast<std::uint32_t>(index)});
  };

  // (1) imputation, "at the start of each Gibbs sampler step"
  impute(s, st);
  refresh_distances(s);
  VoteMatrix completed_data;
  if (full) completed_data = completed();
  auto full_lp = [&](ModelState& m) {
    return log_posterior(m, completed_data, hyper_);
  };
  ll_.resize(n_ * p_);
  ll_next_.resize(n_ * p_);
  dist_next_.resize(n_ * p_);
  if (!full)
    parallel_for(n_, workers, [&](std::size_t i) {
      for (std::size_t j = 0; j < p_; ++j) {
        const std::size_t c = i * p_ + j;
        ll_[c] = cell(i, j, s.theta[i] + s.beta[j] - s.gamma * dist_[c]);
      }
    });
  auto row_sum = [&](const std::vector<double>& v, std::size_t i) {
    double t = 0.0;
    for (std::size_t j = 0; j < p_; ++j) t += v[i * p_ + j];
    return t;
  };
  auto col_sum = [&](const std::vector<double>& v, std::size_t j) {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += v[i * p_ + j];
    return t;
  };

  // (2) theta_i; conditionals over disjoint rows, so the block is parallel.
  {
    std::vector<std::uint8_t> acc(n_, 0);
    std::vector<double> next(n_);
    parallel_for(n_, workers, [&](std::size_t i) {
      Stream rng = stream(Block::Theta, i);
      MhResult<double> r{};
      if (full) {
        const double keep = s.theta[i];
        r = mh_update_scalar(
            keep,
            [&](double v) {
              s.theta[i] = v;
              return full_lp(s);
            },
            st.steps.theta, rng);
        s.theta[i] = keep;
      } else {
        const double prior = -0.5 / s.sigma_theta_sq;
        const double cur = prior * s.theta[i] * s.theta[i] + row_sum(ll_, i);
        r = mh_update_scalar(
            s.theta[i], cur,
            [&](double v) {
              for (std::size_t j = 0; j < p_; ++j) {
                const std::size_t c = i * p_ + j;
                ll_next_[c] = cell(i, j, v + s.beta[j] - s.gamma * dist_[c]);
              }
              return prior * v * v + row_sum(ll_next_, i);
            },
            st.steps.theta, rng);
        if (r.accepted)
          std::copy_n(&ll_next_[i * p_], p_, &ll_[i * p_]);
      }
      next[i] = r.value;
      acc[i] = r.accepted;
    });
    for (std::size_t i = 0; i < n_; ++i) s.theta[i] = next[i];
    tally(counts.theta, acc);
  }

  // (3) beta_j
  {
    std::vector<std::uint8_t> acc(p_, 0);
    std::vector<double> next(p_);
    parallel_for(p_, workers, [&](std::size_t j) {
      Stream rng = stream(Block::Beta, j);
      MhResult<double> r{};
      if (full) {
        const double keep = s.beta[j];
        r = mh_update_scalar(
            keep,
            [&](double v) {
              s.beta[j] = v;
              return full_lp(s);
            },
            st.steps.beta, rng);
        s.beta[j] = keep;
      } else {
        const double prior = -0.5 / hyper_.sigma_beta_sq;
        const double cur = prior * s.beta[j] * s.beta[j] + col_sum(ll_, j);
        r = mh_update_scalar(
            s.beta[j], cur,
            [&](double v) {
              for (std::size_t i = 0; i < n_; ++i) {
                const std::size_t c = i * p_ + j;
                ll_next_[c] = cell(i, j, s.theta[i] + v - s.gamma * dist_[c]);
              }
              return prior * v * v + col_sum(ll_next_, j);
            },
            st.steps.beta, rng);
        if (r.accepted)
          for (std::size_t i = 0; i < n_; ++i) ll_[i * p_ + j] = ll_next_[i * p_ + j];
      }
      next[j] = r.value;
      acc[j] = r.accepted;
    });
    for (std::size_t j = 0; j < p_; ++j) s.beta[j] = next[j];
    tally(counts.beta, acc);
  }

  // (4) log gamma. The walk runs on the log scale, so the target is the
  // density of log(gamma): the full posterior plus log(gamma).
  {
    Stream rng = stream(Block::LogGamma, 0);
    MhResult<double> r{};
    if (full) {
      const double keep = s.gamma;
      r = mh_update_scalar(
          std::log(keep),
          [&](double lg) {
            s.gamma = std::exp(lg);
            return full_lp(s) + lg;
          },
          st.steps.log_gamma, rng);
      s.gamma = keep;
    } else {
      auto prior = [&](double lg) {
        const double diff = lg - hyper_.mu_gamma;
        return -0.5 * diff * diff / hyper_.sigma_gamma_sq;
      };
      double cur = 0.0;
      for (std::size_t i = 0; i < n_; ++i) cur += row_sum(ll_, i);
      const double lg0 = std::log(s.gamma);
      r = mh_update_scalar(
          lg0, cur + prior(lg0),
          [&](double lg) {
            const double gamma = std::exp(lg);
            parallel_for(n_, workers, [&](std::size_t i) {
              for (std::size_t j = 0; j < p_; ++j) {
                const std::size_t c = i * p_ + j;
                ll_next_[c] = cell(i, j, s.theta[i] + s.beta[j] - gamma * dist_[c]);
              }
            });
            double total = 0.0;
            for (std::size_t i = 0; i < n_; ++i) total += row_sum(ll_next_, i);
            return total + prior(lg);
          },
          st.steps.log_gamma, rng);
      if (r.accepted) ll_.swap(ll_next_);
    }
    if (r.accepted) s.gamma = std::exp(r.value);
    counts.log_gamma.proposed += 1;
    counts.log_gamma.accepted += r.accepted;
  }

  // (5) z_i
  {
    std::vector<std::uint8_t> acc(n_, 0);
    arma::mat next = s.z;
    parallel_for(n_, workers, [&](std::size_t i) {
      Stream rng = stream(Block::Z, i);
      const arma::vec current = s.z.row(i).t();
      MhResult<arma::vec> r;
      if (full) {
        r = mh_update_vector(
            current,
            [&](const arma::vec& v) {
              s.z.row(i) = v.t();
              return full_lp(s);
            },
            st.steps.z, rng);
        s.z.row(i) = current.t();
      } else {
        const double cur = -0.5 * arma::dot(current, current) + row_sum(ll_, i);
        r = mh_update_vector(
            current, cur,
            [&](const arma::vec& v) {
              for (std::size_t j = 0; j < p_; ++j) {
                double ss = 0.0;
                for (std::size_t c = 0; c < k; ++c) {
                  const double diff = v[c] - s.w.at(j, c);
                  ss += diff * diff;
                }
                const std::size_t c = i * p_ + j;
                dist_next_[c] = std::sqrt(ss);
                ll_next_[c] = cell(i, j, s.theta[i] + s.beta[j] - s.gamma * dist_next_[c]);
              }
              return -0.5 * arma::dot(v, v) + row_sum(ll_next_, i);
            },
            st.steps.z, rng);
        if (r.accepted) {
          std::copy_n(&ll_next_[i * p_], p_, &ll_[i * p_]);
          std::copy_n(&dist_next_[i * p_], p_, &dist_[i * p_]);
        }
      }
      if (r.accepted) {
        for (std::size_t c = 0; c < k; ++c) next.at(i, c) = r.value[c];
        acc[i] = 1;
      }
    });
    s.z = std::move(next);
    tally(counts.z, acc);
  }

  // (6) w_j
  {
    std::vector<std::uint8_t> acc(p_, 0);
    arma::mat next = s.w;
    parallel_for(p_, workers, [&](std::size_t j) {
      Stream rng = stream(Block::W, j);
      const arma::vec current = s.w.row(j).t();
      MhResult<arma::vec> r;
      if (full) {
        r = mh_update_vector(
            current,
            [&](const arma::vec& v) {
              s.w.row(j) = v.t();
              return full_lp(s);
            },
            st.steps.w, rng);
        s.w.row(j) = current.t();
      } else {
        const double cur = -0.5 * arma::dot(current, current) + col_sum(ll_, j);
        r = mh_update_vector(
            current, cur,
            [&](const arma::vec& v) {
              for (std::size_t i = 0; i < n_; ++i) {
                double ss = 0.0;
                for (std::size_t c = 0; c < k; ++c) {
                  const double diff = s.z.at(i, c) - v[c];
                  ss += diff * diff;
                }
                const std::size_t c = i * p_ + j;
                dist_next_[c] = std::sqrt(ss);
                ll_next_[c] = cell(i, j, s.theta[i] + s.beta[j] - s.gamma * dist_next_[c]);
              }
              return -0.5 * arma::dot(v, v) + col_sum(ll_next_, j);
            },
            st.steps.w, rng);
        if (r.accepted)
          for (std::size_t i = 0; i < n_; ++i) {
            ll_[i * p_ + j] = ll_next_[i * p_ + j];
            dist_[i * p_ + j] = dist_next_[i * p_ + j];
          }
      }
      if (r.accepted) {
        for (std::size_t c = 0; c < k; ++c) next.at(j, c) = r.value[c];
        acc[j] = 1;
      }
    });
    s.w = std::move(next);
    tally(counts.w, acc);
  }

  // (7) sigma_theta^2, conjugate
  if (st.update_sigma_theta) {
    Stream rng = stream(Block::SigmaTheta, 0);
    s.sigma_theta_sq =
        gibbs_update_sigma_theta(s.theta, hyper_.a_sigma, hyper_.b_sigma, rng);
  }
}

ModelState gibbs_sweep(const ModelState& state, const VoteMatrix& data,
                       const Hyperparams& hyper, const SweepSettings& settings,
                       AcceptanceCounts* counts) {
  Sweeper sweeper(data, hyper);
  ModelState next = state;
  AcceptanceCounts local;
  sweeper.sweep(next, settings, counts ? *counts : local);
  return next;
}

// ---------------------------------------------------------------------------

ModelState initial_state(const VoteMatrix& data, const Hyperparams& hyper,
                         InitMethod method, std::uint64_t seed,
                         std::uint32_t chain) {
  const std::size_t n = data.n_legislators(), p = data.n_bills(), k = hyper.k;
  ModelState s = ModelState::zeros(n, p, k);
  s.gamma = std::exp(hyper.mu_gamma);
  s.sigma_theta_sq = 1.0;
  Stream rng({seed, chain, 0, Block::Init, 0});
  for (auto& v : s.z) v = 0.1 * rng.normal();
  for (auto& v : s.w) v = 0.1 * rng.normal();
  if (method == InitMethod::Random) return s;

  arma::mat x(n, p, arma::fill::zeros);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      const Vote v = data(i, j);
      if (v != Vote::Missing) x(i, j) = v == Vote::Yea ? 1.0 : -1.0;
    }
  const arma::rowvec col_means = arma::mean(x, 0);
  const arma::vec row_means = arma::mean(x, 1);
  const double grand = arma::mean(row_means);
  x.each_row() -= col_means;
  x.each_col() -= row_means;
  x += grand;

  arma::mat u, v;
  arma::vec sv;
  if (!arma::svd_econ(u, sv, v, x) || sv.n_elem == 0 || sv[0] <= 0.0) return s;
  const std::size_t use = std::min<std::size_t>(k, sv.n_elem);
  for (std::size_t c = 0; c < use; ++c) {
    const double rel = sv[c] / sv[0];
    s.z.col(c) = u.col(c) * (std::sqrt(static_cast<double>(n)) * rel);
    s.w.col(c) = v.col(c) * (std::sqrt(static_cast<double>(p)) * rel);
  }
  return s;
}

double adapt_step(double step, double acceptance, double target,
                  std::size_t round) {
  if (step <= 0.0) return step;
  const double gain = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(1, round)));
  const double next = std::exp(std::log(step) + gain * (acceptance - target));
  return std::clamp(next, 1e-4, 10.0);
}

ChainDraws run_chain(const VoteMatrix& data, const Hyperparams& hyper,
                     const SamplerConfig& config, std::uint32_t chain,
                     std::optional<ModelState> init) {
  config.validate();
  hyper.validate();
  if (data.n_legislators() == 0 || data.n_bills() == 0)
    throw DataError("run_chain: empty vote matrix");
  const auto start = std::chrono::steady_clock::now();

  ModelState state = init ? std::move(*init)
                          : initial_state(data, hyper, config.init, config.seed, chain);
  require(state.n_legislators() == data.n_legislators() &&
              state.n_bills() == data.n_bills() && state.dims() == hyper.k,
          "run_chain: initial state does not match data");

  ChainDraws out;
  out.seed = config.seed;
  out.chain = chain;
  out.config = config;
  out.draws.reserve(config.n_stored());

  Sweeper sweeper(data, hyper);
  SweepSettings st;
  st.steps = config.steps;
  st.seed = config.seed;
  st.chain = chain;
  st.workers = config.workers;
  st.update_sigma_theta = config.update_sigma_theta;

  AcceptanceCounts window, kept;
  std::size_t round = 0;
  for (std::size_t t = 0; t < config.n_iterations; ++t) {
    st.iteration = static_cast<std::uint32_t>(t);
    const bool burning = t < config.burn_in;
    sweeper.sweep(state, st, burning ? window : kept);

    if (burning && config.adapt_during_burnin &&
        (t + 1) % config.adapt_interval == 0) {
      ++round;
      const double ts = config.target_accept_scalar;
      const double tv = config.target_accept_vector;
      st.steps.theta = adapt_step(st.steps.theta, window.theta.rate(), ts, round);
      st.steps.beta = adapt_step(st.steps.beta, window.beta.rate(), ts, round);
      st.steps.log_gamma =
          adapt_step(st.steps.log_gamma, window.log_gamma.rate(), ts, round);
      st.steps.z = adapt_step(st.steps.z, window.z.rate(), tv, round);
      st.steps.w = adapt_step(st.steps.w, window.w.rate(), tv, round);
      window = {};
    }
    if (!burning && (t - config.burn_in + 1) % config.thin == 0)
      out.draws.push_back(state);
  }
  out.counts = kept;
  out.acceptance_rates = rates(kept);
  out.final_steps = st.steps;
  out.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<ChainDraws> run_chains(const VoteMatrix& data,
                                   const Hyperparams& hyper,
                                   const SamplerConfig& config) {
  config.validate();
  std::vector<ChainDraws> out(config.n_chains);
  const std::size_t workers =
      std::max<std::size_t>(1, std::thread::hardware_concurrency());
  parallel_for(config.n_chains, workers, [&](std::size_t c) {
    out[c] = run_chain(data, hyper, config, static_cast<std::uint32_t>(c));
  });
  return out;
}

}  // namespace lsirm
