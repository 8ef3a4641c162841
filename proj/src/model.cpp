#include "lsirm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lsirm/error.hpp"

namespace lsirm {

namespace {
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
}

void ModelState::validate() const {
  require(gamma > 0.0, "gamma must be positive");
  require(sigma_theta_sq > 0.0, "sigma_theta_sq must be positive");
  require(z.n_cols == w.n_cols, "z and w must share the latent dimension");
  require(z.n_rows == theta.n_elem, "z rows must match theta length");
  require(w.n_rows == beta.n_elem, "w rows must match beta length");
}

ModelState ModelState::zeros(std::size_t n, std::size_t p, std::size_t k) {
  ModelState s;
  s.theta.zeros(n);
  s.beta.zeros(p);
  s.z.zeros(n, k);
  s.w.zeros(p, k);
  return s;
}

bool identical(const ModelState& a, const ModelState& b) {
  auto same = [](const auto& x, const auto& y) {
    return x.n_rows == y.n_rows && x.n_cols == y.n_cols &&
           std::equal(x.begin(), x.end(), y.begin());
  };
  return a.gamma == b.gamma && a.sigma_theta_sq == b.sigma_theta_sq &&
         same(a.theta, b.theta) && same(a.beta, b.beta) && same(a.z, b.z) &&
         same(a.w, b.w);
}

void Hyperparams::validate() const {
  if (k < 1) throw ConfigError("latent dimension must be positive");
  if (!(sigma_beta_sq > 0.0)) throw ConfigError("sigma_beta_sq must be positive");
  if (!(a_sigma > 0.0 && b_sigma > 0.0))
    throw ConfigError("a_sigma and b_sigma must be positive");
  if (!(sigma_gamma_sq > 0.0)) throw ConfigError("sigma_gamma_sq must be positive");
  if (!std::isfinite(mu_gamma)) throw ConfigError("mu_gamma must be finite");
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size() && !a.empty(),
          "euclidean_distance: vectors must have equal non-zero length");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

double latent_distance(const arma::mat& z, std::size_t i, const arma::mat& w,
                       std::size_t j) {
  double s = 0.0;
  for (std::size_t k = 0; k < z.n_cols; ++k) {
    const double d = z.at(i, k) - w.at(j, k);
    s += d * d;
  }
  return std::sqrt(s);
}

double log_bernoulli_logit(double eta, Vote y) {
  switch (y) {
    case Vote::Yea:
      return -softplus(-eta);
    case Vote::Nay:
      return -softplus(eta);
    case Vote::Missing:
      break;
  }
  throw ContractViolation("log-likelihood of a Missing cell is undefined");
}

double linear_predictor(const ModelState& s, std::size_t i, std::size_t j) {
  return s.theta[i] + s.beta[j] - s.gamma * latent_distance(s.z, i, s.w, j);
}

double log_likelihood_cell(const ModelState& s, std::size_t i, std::size_t j,
                           Vote y) {
  require(i < s.n_legislators() && j < s.n_bills(), "cell index out of range");
  return log_bernoulli_logit(linear_predictor(s, i, j), y);
}

double log_likelihood(const ModelState& s, const VoteMatrix& data) {
  require(s.n_legislators() == data.n_legislators() &&
              s.n_bills() == data.n_bills(),
          "state dimensions do not match the vote matrix");
  double total = 0.0;
  for (std::size_t i = 0; i < data.n_legislators(); ++i)
    for (std::size_t j = 0; j < data.n_bills(); ++j) {
      const Vote y = data(i, j);
      if (y != Vote::Missing) total += log_bernoulli_logit(linear_predictor(s, i, j), y);
    }
  return total;
}

double log_normal_density(double x, double mean, double var) {
  const double d = x - mean;
  return -kLogSqrt2Pi - 0.5 * std::log(var) - 0.5 * d * d / var;
}

double log_inverse_gamma_density(double x, double shape, double scale) {
  return shape * std::log(scale) - std::lgamma(shape) -
         (shape + 1.0) * std::log(x) - scale / x;
}

double log_prior(const ModelState& s, const Hyperparams& hyper) {
  require(s.gamma > 0.0, "log_prior: gamma must be positive");
  require(s.sigma_theta_sq > 0.0, "log_prior: sigma_theta_sq must be positive");
  require(s.z.n_cols == hyper.k && s.w.n_cols == hyper.k,
          "log_prior: latent dimension does not match hyperparameters");
  double total = 0.0;
  for (double t : s.theta) total += log_normal_density(t, 0.0, s.sigma_theta_sq);
  for (double b : s.beta) total += log_normal_density(b, 0.0, hyper.sigma_beta_sq);
  for (double v : s.z) total += log_normal_density(v, 0.0, 1.0);
  for (double v : s.w) total += log_normal_density(v, 0.0, 1.0);
  // Prior is stated on log(gamma); -log(gamma) is the change-of-variables term.
  const double log_gamma = std::log(s.gamma);
  total += log_normal_density(log_gamma, hyper.mu_gamma, hyper.sigma_gamma_sq) -
           log_gamma;
  total += log_inverse_gamma_density(s.sigma_theta_sq, hyper.a_sigma, hyper.b_sigma);
  return total;
}

double log_posterior(const ModelState& s, const VoteMatrix& data,
                     const Hyperparams& hyper) {
  s.validate();
  return log_likelihood(s, data) + log_prior(s, hyper);
}

}  // namespace lsirm
