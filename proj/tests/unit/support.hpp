#pragma once

#include <armadillo>

#include "lsirm/model.hpp"
#include "lsirm/random.hpp"

namespace lsirm::test {

inline arma::mat random_orthogonal(std::size_t k, Stream& rng) {
  arma::mat g(k, k);
  for (auto& v : g) v = rng.normal();
  arma::mat q, r;
  arma::qr(q, r, g);
  // Random reflections too, so both components of O(k) are exercised.
  if (rng.uniform() < 0.5) q.col(0) *= -1.0;
  return q;
}

inline arma::mat random_matrix(std::size_t n, std::size_t k, Stream& rng,
                               double sd = 1.0) {
  arma::mat m(n, k);
  for (auto& v : m) v = sd * rng.normal();
  return m;
}

inline ModelState random_state(std::size_t n, std::size_t p, std::size_t k,
                               Stream& rng) {
  ModelState s = ModelState::zeros(n, p, k);
  for (auto& v : s.theta) v = rng.normal();
  for (auto& v : s.beta) v = rng.normal();
  s.gamma = 0.5 + rng.uniform() * 2.0;
  s.z = random_matrix(n, k, rng);
  s.w = random_matrix(p, k, rng);
  s.sigma_theta_sq = 0.5 + rng.uniform();
  return s;
}

inline VoteMatrix random_votes(std::size_t n, std::size_t p, Stream& rng,
                               double missing = 0.0) {
  VoteMatrix m(n, p, Vote::Nay);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      const double u = rng.uniform();
      m(i, j) = u < missing ? Vote::Missing : (rng.uniform() < 0.5 ? Vote::Yea : Vote::Nay);
    }
  return m;
}

inline double all_pairs_max_change(const arma::mat& a, const arma::mat& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.n_rows; ++i)
    for (std::size_t j = 0; j < a.n_rows; ++j)
      worst = std::max(worst, std::abs(arma::norm(a.row(i) - a.row(j)) -
                                       arma::norm(b.row(i) - b.row(j))));
  return worst;
}

}  // namespace lsirm::test
