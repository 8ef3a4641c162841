#pragma once

#include <armadillo>
#include <span>

#include "lsirm/vote_matrix.hpp"

namespace lsirm {

// One configuration of the latent space item response model:
//   logit P(y_ij = Yea) = theta_i + beta_j - gamma * ||z_i - w_j||.
struct ModelState {
  arma::vec theta;  // N
  arma::vec beta;   // P
  double gamma = 1.0;
  arma::mat z;  // N x K
  arma::mat w;  // P x K
  double sigma_theta_sq = 1.0;

  std::size_t n_legislators() const { return theta.n_elem; }
  std::size_t n_bills() const { return beta.n_elem; }
  std::size_t dims() const { return z.n_cols; }

  void validate() const;
  static ModelState zeros(std::size_t n, std::size_t p, std::size_t k);
};

bool identical(const ModelState& a, const ModelState& b);

// Fixed prior constants. Defaults follow the lsirm12pl package conventions.
struct Hyperparams {
  std::size_t k = 2;
  double sigma_beta_sq = 1.0;
  double a_sigma = 0.001;
  double b_sigma = 0.001;
  double mu_gamma = 0.5;
  double sigma_gamma_sq = 1.0;

  void validate() const;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);

// Distance between row i of z and row j of w.
double latent_distance(const arma::mat& z, std::size_t i, const arma::mat& w,
                       std::size_t j);

// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// log P(y | eta) under the logistic link; y must be Yea or Nay.
double log_bernoulli_logit(double eta, Vote y);

inline double logistic(double eta) {
  return eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta))
                    : std::exp(eta) / (1.0 + std::exp(eta));
}

double linear_predictor(const ModelState& s, std::size_t i, std::size_t j);

double log_likelihood_cell(const ModelState& s, std::size_t i, std::size_t j,
                           Vote y);
double log_likelihood(const ModelState& s, const VoteMatrix& data);
double log_prior(const ModelState& s, const Hyperparams& hyper);
double log_posterior(const ModelState& s, const VoteMatrix& data,
                     const Hyperparams& hyper);

// Log density helpers shared with the samplers and the comparator model.
double log_normal_density(double x, double mean, double var);
double log_inverse_gamma_density(double x, double shape, double scale);

}  // namespace lsirm
