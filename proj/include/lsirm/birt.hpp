#pragma once

// Bayesian IRT comparator: P(y_ij = Yea) = Phi(discrimination_j . x_i - difficulty_j).

#include <vector>

#include "lsirm/identify.hpp"
#include "lsirm/sampler.hpp"

namespace lsirm {

struct BirtState {
  arma::mat x;               // N x D ideal points
  arma::mat discrimination;  // P x D
  arma::vec difficulty;      // P

  std::size_t n_legislators() const { return x.n_rows; }
  std::size_t n_bills() const { return discrimination.n_rows; }
  std::size_t dims() const { return x.n_cols; }
  void validate() const;
};

// log Phi(x), accurate far into the lower tail.
double log_normal_cdf(double x);
double normal_cdf(double x);

double birt_linear_predictor(const BirtState& s, std::size_t i, std::size_t j);
double birt_log_likelihood(const BirtState& s, const VoteMatrix& data);
double birt_log_prior(const BirtState& s, double prior_sd);
double birt_log_posterior(const BirtState& s, const VoteMatrix& data,
                          double prior_sd = 1.0);

struct BirtSteps {
  double x = 0.5;
  double discrimination = 0.3;
  double difficulty = 0.3;
};

struct BirtConfig {
  SamplerConfig sampler;  // iterations, burn-in, thinning, seed, adaptation
  BirtSteps steps;
  std::size_t dims = 2;
  double prior_sd = 1.0;
};

struct BirtFit {
  std::vector<BirtState> draws;       // raw, post burn-in and thinned
  std::vector<BirtState> aligned;     // centred / rotated / Procrustes-matched
  BirtState mean;                     // mean of aligned draws
  double accept_x = 0, accept_discrimination = 0, accept_difficulty = 0;
  std::uint64_t seed = 0;
  BirtConfig config;
  double wall_clock_seconds = 0.0;
};

// Translation and orthogonal rotation of ideal points, with the bill
// parameters transformed so that every linear predictor is unchanged.
BirtState transform_birt(const BirtState& s, const RigidTransform& t);

// Centre the ideal points, rotate to their principal axes and fix the
// reflection by non-negative skewness (same conventions as identify).
BirtState identify_birt(const BirtState& s);

struct BirtPosterior {
  std::vector<BirtState> aligned;
  BirtState mean;
};

// Procrustes-match every draw's ideal points to the identified last draw.
BirtPosterior align_birt(const std::vector<BirtState>& draws, std::size_t workers = 1);

BirtFit fit_birt(const VoteMatrix& data, const BirtConfig& config);

arma::mat birt_probabilities(const BirtState& s);

}  // namespace lsirm
