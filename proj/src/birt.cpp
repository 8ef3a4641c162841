#include "lsirm/birt.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "lsirm/parallel.hpp"

namespace lsirm {

void BirtState::validate() const {
  require(discrimination.n_cols == x.n_cols, "birt: dimension mismatch");
  require(difficulty.n_elem == discrimination.n_rows, "birt: difficulty length mismatch");
  require(x.is_finite() && discrimination.is_finite() && difficulty.is_finite(),
          "birt: non-finite parameters");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_normal_cdf(double x) {
  if (x > -30.0) return std::log(normal_cdf(x));
  // Asymptotic series for the lower tail: Phi(x) ~ phi(x)/|x| (1 - 1/x^2 + 3/x^4).
  const double x2 = x * x;
  return -0.5 * x2 - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

double birt_linear_predictor(const BirtState& s, std::size_t i, std::size_t j) {
  double eta = -s.difficulty[j];
  for (std::size_t d = 0; d < s.x.n_cols; ++d)
    eta += s.discrimination.at(j, d) * s.x.at(i, d);
  return eta;
}

double birt_log_likelihood(const BirtState& s, const VoteMatrix& data) {
  s.validate();
  require(s.n_legislators() == data.n_legislators() && s.n_bills() == data.n_bills(),
          "birt: state does not match the vote matrix");
  double total = 0.0;
  for (std::size_t i = 0; i < data.n_legislators(); ++i)
    for (std::size_t j = 0; j < data.n_bills(); ++j) {
      const Vote v = data(i, j);
      if (v == Vote::Missing) continue;
      const double eta = birt_linear_predictor(s, i, j);
      total += log_normal_cdf(v == Vote::Yea ? eta : -eta);
    }
  return total;
}

double birt_log_prior(const BirtState& s, double prior_sd) {
  require(prior_sd > 0.0, "birt: prior_sd must be positive");
  const double var = prior_sd * prior_sd;
  double total = 0.0;
  for (double v : s.x) total += log_normal_density(v, 0.0, var);
  for (double v : s.discrimination) total += log_normal_density(v, 0.0, var);
  for (double v : s.difficulty) total += log_normal_density(v, 0.0, var);
  return total;
}

double birt_log_posterior(const BirtState& s, const VoteMatrix& data,
                          double prior_sd) {
  return birt_log_likelihood(s, data) + birt_log_prior(s, prior_sd);
}

arma::mat birt_probabilities(const BirtState& s) {
  arma::mat prob(s.n_legislators(), s.n_bills());
  for (std::size_t i = 0; i < s.n_legislators(); ++i)
    for (std::size_t j = 0; j < s.n_bills(); ++j)
      prob(i, j) = normal_cdf(birt_linear_predictor(s, i, j));
  return prob;
}

BirtState transform_birt(const BirtState& s, const RigidTransform& t) {
  BirtState out;
  out.x = t.apply(s.x);
  out.discrimination = s.discrimination * t.rotation;
  out.difficulty = s.difficulty + out.discrimination * t.translation.t();
  return out;
}

BirtState identify_birt(const BirtState& s) {
  const std::size_t d = s.dims();
  const arma::rowvec centroid = arma::mean(s.x, 0);
  RigidTransform shift = RigidTransform::identity(d);
  shift.translation = -centroid;
  const BirtState centred = transform_birt(s, shift);
  const AxesAlignment axes = principal_axes({centred.x, arma::mat(0, d)});
  return transform_birt(centred, axes.transform);
}

namespace {

class BirtSweeper {
 public:
  BirtSweeper(const VoteMatrix& data, double prior_sd)
      : data_(data),
        n_(data.n_legislators()),
        p_(data.n_bills()),
        var_(prior_sd * prior_sd),
        yea_(n_ * p_, 0) {
    for (std::size_t c = 0; c < n_ * p_; ++c) {
      const Vote v = data.cells()[c];
      if (v == Vote::Missing)
        missing_.push_back(c);
      else
        yea_[c] = v == Vote::Yea;
    }
  }

  double cell(std::size_t c, double eta) const {
    return log_normal_cdf(yea_[c] ? eta : -eta);
  }

  double x_target(const BirtState& s, std::size_t i, const arma::vec& xi) const {
    double total = -0.5 * arma::dot(xi, xi) / var_;
    for (std::size_t j = 0; j < p_; ++j) {
      double eta = -s.difficulty[j];
      for (std::size_t d = 0; d < xi.n_elem; ++d) eta += s.discrimination.at(j, d) * xi[d];
      total += cell(i * p_ + j, eta);
    }
    return total;
  }

  double disc_target(const BirtState& s, std::size_t j, const arma::vec& bj) const {
    double total = -0.5 * arma::dot(bj, bj) / var_;
    for (std::size_t i = 0; i < n_; ++i) {
      double eta = -s.difficulty[j];
      for (std::size_t d = 0; d < bj.n_elem; ++d) eta += bj[d] * s.x.at(i, d);
      total += cell(i * p_ + j, eta);
    }
    return total;
  }

  double difficulty_target(const BirtState& s, std::size_t j, double aj) const {
    double total = -0.5 * aj * aj / var_;
    for (std::size_t i = 0; i < n_; ++i) {
      double eta = -aj;
      for (std::size_t d = 0; d < s.x.n_cols; ++d)
        eta += s.discrimination.at(j, d) * s.x.at(i, d);
      total += cell(i * p_ + j, eta);
    }
    return total;
  }

  struct Accepts {
    std::uint64_t x = 0, disc = 0, diff = 0;
  };

  Accepts sweep(BirtState& s, const BirtSteps& steps, std::uint64_t seed,
                std::uint32_t iteration, std::size_t workers) {
    auto stream = [&](Block b, std::size_t index) {
      return Stream({seed, 0, iteration, b, static_cast<std::uint32_t>(index)});
    };
    Accepts out;
    parallel_for(missing_.size(), workers, [&](std::size_t m) {
      const std::size_t c = missing_[m];
      Stream rng = stream(Block::Impute, c);
      const double prob = normal_cdf(birt_linear_predictor(s, c / p_, c % p_));
      yea_[c] = rng.uniform() < prob;
    });

    std::vector<std::uint8_t> acc(std::max(n_, p_));
    arma::mat next_x = s.x;
    std::fill(acc.begin(), acc.end(), 0);
    parallel_for(n_, workers, [&](std::size_t i) {
      Stream rng = stream(Block::BirtX, i);
      auto r = mh_update_vector(
          s.x.row(i).t(), [&](const arma::vec& v) { return x_target(s, i, v); },
          steps.x, rng);
      if (r.accepted) {
        next_x.row(i) = r.value.t();
        acc[i] = 1;
      }
    });
    s.x = std::move(next_x);
    for (std::size_t i = 0; i < n_; ++i) out.x += acc[i];

    arma::mat next_b = s.discrimination;
    std::fill(acc.begin(), acc.end(), 0);
    parallel_for(p_, workers, [&](std::size_t j) {
      Stream rng = stream(Block::BirtDiscrimination, j);
      auto r = mh_update_vector(
          s.discrimination.row(j).t(),
          [&](const arma::vec& v) { return disc_target(s, j, v); },
          steps.discrimination, rng);
      if (r.accepted) {
        next_b.row(j) = r.value.t();
        acc[j] = 1;
      }
    });
    s.discrimination = std::move(next_b);
    for (std::size_t j = 0; j < p_; ++j) out.disc += acc[j];

    arma::vec next_a = s.difficulty;
    std::fill(acc.begin(), acc.end(), 0);
    parallel_for(p_, workers, [&](std::size_t j) {
      Stream rng = stream(Block::BirtDifficulty, j);
      auto r = mh_update_scalar(
          s.difficulty[j], [&](double v) { return difficulty_target(s, j, v); },
          steps.difficulty, rng);
      next_a[j] = r.value;
      acc[j] = r.accepted;
    });
    s.difficulty = std::move(next_a);
    for (std::size_t j = 0; j < p_; ++j) out.diff += acc[j];
    return out;
  }

 private:
  const VoteMatrix& data_;
  std::size_t n_, p_;
  double var_;
  std::vector<std::uint8_t> yea_;
  std::vector<std::size_t> missing_;
};

}  // namespace

BirtPosterior align_birt(const std::vector<BirtState>& draws, std::size_t workers) {
  require(!draws.empty(), "align_birt: no draws");
  const std::size_t n = draws[0].n_legislators(), p = draws[0].n_bills(),
                    d = draws[0].dims();
  const BirtState reference = identify_birt(draws.back());
  BirtPosterior post;
  post.aligned.resize(draws.size());
  parallel_for(draws.size(), workers, [&](std::size_t q) {
    const RigidTransform t = procrustes_transform(draws[q].x, reference.x);
    post.aligned[q] = transform_birt(draws[q], t);
  });
  post.mean.x.zeros(n, d);
  post.mean.discrimination.zeros(p, d);
  post.mean.difficulty.zeros(p);
  for (const auto& a : post.aligned) {
    post.mean.x += a.x;
    post.mean.discrimination += a.discrimination;
    post.mean.difficulty += a.difficulty;
  }
  const double m = static_cast<double>(post.aligned.size());
  post.mean.x /= m;
  post.mean.discrimination /= m;
  post.mean.difficulty /= m;
  return post;
}

BirtFit fit_birt(const VoteMatrix& data, const BirtConfig& config) {
  const SamplerConfig& sc = config.sampler;
  sc.validate();
  if (config.dims == 0) throw ConfigError("birt: dims must be positive");
  if (!(config.prior_sd > 0.0)) throw ConfigError("birt: prior_sd must be positive");
  if (data.n_legislators() == 0 || data.n_bills() == 0)
    throw DataError("fit_birt: empty vote matrix");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = data.n_legislators(), p = data.n_bills(), d = config.dims;

  BirtState s;
  s.x.set_size(n, d);
  s.discrimination.set_size(p, d);
  s.difficulty.zeros(p);
  Stream init({sc.seed, 0, 0, Block::Init, 1});
  for (auto& v : s.x) v = 0.1 * init.normal();
  for (auto& v : s.discrimination) v = 0.1 * init.normal();
  if (sc.init == InitMethod::Pca) {
    Hyperparams h;
    h.k = d;
    const ModelState pca = initial_state(data, h, InitMethod::Pca, sc.seed);
    s.x = pca.z;
    s.x /= std::max(1e-12, arma::stddev(arma::vectorise(s.x)));
  }

  BirtFit fit;
  fit.seed = sc.seed;
  fit.config = config;
  fit.draws.reserve(sc.n_stored());
  BirtSweeper sweeper(data, config.prior_sd);
  BirtSteps steps = config.steps;
  std::uint64_t wx = 0, wb = 0, wa = 0, kx = 0, kb = 0, ka = 0, kept_iters = 0;
  std::size_t window = 0, round = 0;
  for (std::size_t t = 0; t < sc.n_iterations; ++t) {
    const auto acc = sweeper.sweep(s, steps, sc.seed, static_cast<std::uint32_t>(t),
                                   sc.workers);
    const bool burning = t < sc.burn_in;
    if (burning) {
      wx += acc.x;
      wb += acc.disc;
      wa += acc.diff;
      ++window;
      if (sc.adapt_during_burnin && window == sc.adapt_interval) {
        ++round;
        const double wn = static_cast<double>(window);
        steps.x = adapt_step(steps.x, wx / (wn * n), sc.target_accept_vector, round);
        steps.discrimination =
            adapt_step(steps.discrimination, wb / (wn * p), sc.target_accept_vector, round);
        steps.difficulty =
            adapt_step(steps.difficulty, wa / (wn * p), sc.target_accept_scalar, round);
        wx = wb = wa = 0;
        window = 0;
      }
    } else {
      kx += acc.x;
      kb += acc.disc;
      ka += acc.diff;
      ++kept_iters;
      if ((t - sc.burn_in + 1) % sc.thin == 0) fit.draws.push_back(s);
    }
  }
  if (kept_iters > 0) {
    const double kn = static_cast<double>(kept_iters);
    fit.accept_x = kx / (kn * n);
    fit.accept_discrimination = kb / (kn * p);
    fit.accept_difficulty = ka / (kn * p);
  }

  if (!fit.draws.empty()) {
    BirtPosterior post = align_birt(fit.draws, sc.workers);
    fit.aligned = std::move(post.aligned);
    fit.mean = std::move(post.mean);
  }
  fit.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return fit;
}

}  // namespace lsirm
