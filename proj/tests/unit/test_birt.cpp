#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "lsirm/birt.hpp"
#include "lsirm/error.hpp"
#include "lsirm/metrics.hpp"
#include "lsirm/simgen.hpp"
#include "support.hpp"

using namespace lsirm;
using doctest::Approx;

namespace {

BirtState random_birt(std::size_t n, std::size_t p, std::size_t d, Stream& rng) {
  return {test::random_matrix(n, d, rng), test::random_matrix(p, d, rng),
          arma::vec(test::random_matrix(p, 1, rng))};
}

}  // namespace

TEST_SUITE("birt") {

TEST_CASE("normal cdf against boost") {
  const boost::math::normal_distribution<double> ref;
  for (double x = -8.0; x <= 8.0; x += 0.37) {
    CHECK(normal_cdf(x) == Approx(boost::math::cdf(ref, x)).epsilon(1e-13));
    CHECK(log_normal_cdf(x) == Approx(std::log(boost::math::cdf(ref, x))).epsilon(1e-12));
  }
  for (double x : {-29.0, -31.0, -35.0, -38.0}) {
    const double want = std::log(boost::math::cdf(ref, x));
    CHECK(log_normal_cdf(x) == Approx(want).epsilon(1e-8));
  }
  CHECK(std::isfinite(log_normal_cdf(-200.0)));
  CHECK(log_normal_cdf(-200.0) < -19000.0);
  CHECK(log_normal_cdf(40.0) == 0.0);
}

TEST_CASE("likelihood examples") {
  BirtState s{arma::mat(4, 2, arma::fill::zeros), arma::mat(3, 2, arma::fill::zeros),
              arma::vec(3, arma::fill::zeros)};
  Stream rng(61, Block::Test);
  VoteMatrix m = test::random_votes(4, 3, rng, 0.25);
  CHECK(birt_log_likelihood(s, m) == Approx(m.n_observed() * std::log(0.5)));

  // saturated: eta = +-8 on the observed side
  s.x.col(0).fill(1.0);
  s.discrimination.col(0).fill(8.0);
  VoteMatrix all_yea(4, 3, Vote::Yea);
  CHECK(birt_log_likelihood(s, all_yea) > -12 * 1e-14);
  CHECK(birt_log_likelihood(s, all_yea) <= 0.0);
  VoteMatrix all_nay(4, 3, Vote::Nay);
  const boost::math::normal_distribution<double> ref;
  CHECK(birt_log_likelihood(s, all_nay) ==
        Approx(12 * std::log(boost::math::cdf(ref, -8.0))).epsilon(1e-10));
}

TEST_CASE("2 x 2 enumeration with independent oracle") {
  const boost::math::normal_distribution<double> ref;
  Stream rng(62, Block::Test);
  for (int t = 0; t < 20; ++t) {
    const BirtState s = random_birt(2, 2, 2, rng);
    const VoteMatrix m = test::random_votes(2, 2, rng, 0.2);
    double want = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        if (m(i, j) == Vote::Missing) continue;
        const double eta = s.x(i, 0) * s.discrimination(j, 0) +
                           s.x(i, 1) * s.discrimination(j, 1) - s.difficulty[j];
        want += std::log(m(i, j) == Vote::Yea ? boost::math::cdf(ref, eta)
                                              : boost::math::cdf(complement(ref, eta)));
      }
    CHECK(birt_log_likelihood(s, m) == Approx(want).epsilon(1e-10));
    double prior = 0.0;
    const boost::math::normal_distribution<double> sd2(0.0, 2.0);
    for (double v : s.x) prior += std::log(boost::math::pdf(sd2, v));
    for (double v : s.discrimination) prior += std::log(boost::math::pdf(sd2, v));
    for (double v : s.difficulty) prior += std::log(boost::math::pdf(sd2, v));
    CHECK(birt_log_prior(s, 2.0) == Approx(prior).epsilon(1e-12));
  }
}

TEST_CASE("rotation and sign flips leave the likelihood unchanged") {
  Stream rng(63, Block::Test);
  const BirtState s = random_birt(8, 6, 2, rng);
  const VoteMatrix m = test::random_votes(8, 6, rng, 0.1);
  BirtState f = s;
  f.x.col(1) *= -1.0;
  f.discrimination.col(1) *= -1.0;
  CHECK(birt_log_likelihood(f, m) == Approx(birt_log_likelihood(s, m)).epsilon(1e-12));

  RigidTransform t;
  t.translation = arma::rowvec{0.4, -1.2};
  t.rotation = test::random_orthogonal(2, rng);
  const BirtState g = transform_birt(s, t);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(birt_linear_predictor(g, i, j) ==
            Approx(birt_linear_predictor(s, i, j)).epsilon(1e-10));

  const BirtState id = identify_birt(s);
  CHECK(arma::abs(arma::mean(id.x, 0)).max() < 1e-12);
  const arma::mat c = arma::cov(id.x);
  CHECK(std::abs(c(0, 1)) < 1e-10);
  CHECK(c(0, 0) >= c(1, 1));
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(birt_linear_predictor(id, i, j) ==
            Approx(birt_linear_predictor(s, i, j)).epsilon(1e-10));
}

TEST_CASE("fit is deterministic and separates a polarized chamber") {
  ClusterRecoveryParams cp;
  cp.k = 2;
  cp.cluster_size = 10;
  cp.bills_per_cluster = 15;
  cp.p = 0.95;
  cp.q = 0.05;
  const VoteMatrix m = gen_cluster_recovery(cp, 64);
  BirtConfig cfg;
  cfg.sampler.n_iterations = 1500;
  cfg.sampler.burn_in = 500;
  cfg.sampler.thin = 5;
  cfg.sampler.seed = 9;
  const BirtFit a = fit_birt(m, cfg);
  const BirtFit b = fit_birt(m, cfg);
  REQUIRE(a.draws.size() == 200);
  CHECK(arma::approx_equal(a.mean.x, b.mean.x, "absdiff", 0.0));
  CHECK(a.accept_x > 0.0);
  CHECK(a.accept_x < 1.0);

  const auto& lab = m.labels.legislator.at("cluster");
  CHECK(silhouette(a.mean.x, lab).mean > 0.5);
  CHECK(classification_accuracy(birt_probabilities(a.mean), m) > 0.85);
}

TEST_CASE("worker count does not change the chain") {
  ClusterRecoveryParams cp;
  cp.k = 3;
  cp.cluster_size = 8;
  cp.bills_per_cluster = 10;
  const VoteMatrix m = gen_cluster_recovery(cp, 7);
  BirtConfig cfg;
  cfg.sampler.n_iterations = 600;
  cfg.sampler.burn_in = 200;
  cfg.sampler.thin = 4;
  cfg.sampler.seed = 12;
  const BirtFit a = fit_birt(m, cfg);
  cfg.sampler.workers = 3;
  const BirtFit b = fit_birt(m, cfg);
  REQUIRE(a.draws.size() == b.draws.size());
  for (std::size_t t = 0; t < a.draws.size(); ++t) {
    CHECK(arma::approx_equal(a.draws[t].x, b.draws[t].x, "absdiff", 0.0));
    CHECK(arma::approx_equal(a.draws[t].discrimination, b.draws[t].discrimination, "absdiff", 0.0));
    CHECK(arma::approx_equal(a.draws[t].difficulty, b.draws[t].difficulty, "absdiff", 0.0));
  }
}

TEST_CASE("saturated data are classified almost perfectly") {
  ClusterRecoveryParams cp;
  cp.k = 2;
  cp.cluster_size = 10;
  cp.bills_per_cluster = 10;
  cp.p = 1.0;
  cp.q = 0.0;
  const VoteMatrix m = gen_cluster_recovery(cp, 65);
  BirtConfig cfg;
  cfg.sampler.n_iterations = 2000;
  cfg.sampler.burn_in = 1000;
  cfg.sampler.thin = 5;
  cfg.sampler.seed = 3;
  const BirtFit fit = fit_birt(m, cfg);
  CHECK(classification_accuracy(birt_probabilities(fit.mean), m) >= 0.99);
}

TEST_CASE("validation") {
  BirtState s{arma::mat(3, 2), arma::mat(2, 1), arma::vec(2)};
  CHECK_THROWS_AS(s.validate(), ContractViolation);
  BirtConfig cfg;
  cfg.prior_sd = 0.0;
  CHECK_THROWS(fit_birt(VoteMatrix(2, 2, Vote::Yea), cfg));
}

}
