#include <doctest.h>

#include "lsirm/error.hpp"
#include "lsirm/metrics.hpp"
#include "support.hpp"

using namespace lsirm;
using doctest::Approx;

TEST_SUITE("metrics") {

TEST_CASE("silhouette hand example") {
  const arma::mat pts = arma::vec{0.0, 1.0, 10.0, 11.0};
  const auto s = silhouette(pts, {"a", "a", "b", "b"});
  // a(0) = 1, b(0) = 10.5 -> 9.5 / 10.5; a(1) = 1, b(1) = 9.5 -> 8.5 / 9.5
  CHECK(s.per_point[0] == Approx(9.5 / 10.5).epsilon(1e-12));
  CHECK(s.per_point[1] == Approx(8.5 / 9.5).epsilon(1e-12));
  CHECK(s.per_point[2] == Approx(8.5 / 9.5).epsilon(1e-12));
  CHECK(s.per_point[3] == Approx(9.5 / 10.5).epsilon(1e-12));
  CHECK(s.per_point[0] == Approx(0.90476).epsilon(1e-5));
  CHECK(s.per_point[1] == Approx(0.89474).epsilon(1e-5));
  CHECK(s.mean == Approx(0.89975).epsilon(1e-5));
}

TEST_CASE("silhouette degenerate cases") {
  const arma::mat same{{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}};
  CHECK(silhouette(same, {"a", "a", "b", "b"}).mean == 0.0);
  const arma::mat pts = arma::vec{0.0, 1.0, 10.0};
  const auto s = silhouette(pts, {"a", "a", "b"});
  CHECK(s.per_point[2] == 0.0);  // singleton
  CHECK_THROWS_AS(silhouette(pts, {"a", "a", "a"}), ContractViolation);
  CHECK_THROWS_AS(silhouette(pts, {"a", "b"}), ContractViolation);
}

TEST_CASE("silhouette invariances") {
  Stream rng(51, Block::Test);
  arma::mat pts = test::random_matrix(40, 2, rng);
  std::vector<std::string> lab(40);
  for (std::size_t i = 0; i < 40; ++i) {
    lab[i] = "c" + std::to_string(i % 4);
    pts(i, 0) += 3.0 * (i % 4);
  }
  const double base = silhouette(pts, lab).mean;

  const arma::mat q = test::random_orthogonal(2, rng);
  arma::mat moved = pts * q;
  moved.each_row() += arma::rowvec{7.0, -3.0};
  CHECK(std::abs(silhouette(moved, lab).mean - base) <= 1e-9);

  std::vector<std::string> renamed(40);
  for (std::size_t i = 0; i < 40; ++i) renamed[i] = "zz" + std::to_string((i % 4) * 7);
  CHECK(std::abs(silhouette(pts, renamed).mean - base) <= 1e-12);

  for (double v : silhouette(pts, lab).per_point) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("accuracy") {
  // saturated data generated from the fitted state
  Stream rng(52, Block::Test);
  ModelState s = test::random_state(6, 7, 2, rng);
  for (auto& v : s.theta) v = 30.0 * (v > 0 ? 1 : -1);
  s.beta.zeros();
  s.gamma = 1e-3;
  VoteMatrix m(6, 7, Vote::Nay);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 7; ++j)
      m(i, j) = linear_predictor(s, i, j) > 0 ? Vote::Yea : Vote::Nay;
  CHECK(classification_accuracy(s, m) == 1.0);

  VoteMatrix sixty(10, 1, Vote::Nay);
  for (std::size_t i = 0; i < 6; ++i) sixty(i, 0) = Vote::Yea;
  CHECK(classification_accuracy(arma::mat(10, 1, arma::fill::ones), sixty) == Approx(0.6));
  // ties predict Yea
  CHECK(classification_accuracy(arma::mat(10, 1, arma::fill::value(0.5)), sixty) == Approx(0.6));

  // 2 x 2 enumeration against a hand-written predictor
  ModelState t = ModelState::zeros(2, 2, 1);
  t.theta = {1.0, -1.0};
  t.beta = {0.5, -0.2};
  t.gamma = 2.0;
  t.z = arma::vec{0.0, 1.0};
  t.w = arma::vec{0.1, 0.9};
  VoteMatrix y(2, 2, Vote::Yea);
  y(1, 0) = Vote::Nay;
  y(1, 1) = Vote::Missing;
  std::size_t correct = 0, seen = 0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      if (y(i, j) == Vote::Missing) continue;
      const double eta = t.theta[i] + t.beta[j] - t.gamma * std::abs(t.z(i, 0) - t.w(j, 0));
      ++seen;
      correct += (eta >= 0) == (y(i, j) == Vote::Yea);
    }
  CHECK(classification_accuracy(t, y) == Approx(double(correct) / seen));
  CHECK_THROWS_AS(classification_accuracy(arma::mat(2, 2), VoteMatrix(2, 2)), DataError);
}

TEST_CASE("APRE") {
  // bill 0: 3 Yea / 2 Nay with one error; bill 1: 4 Yea / 1 Nay, no errors
  VoteMatrix m(5, 2, Vote::Yea);
  m(3, 0) = m(4, 0) = Vote::Nay;
  m(4, 1) = Vote::Nay;
  arma::mat prob(5, 2);
  for (std::size_t i = 0; i < 5; ++i) {
    prob(i, 0) = m(i, 0) == Vote::Yea ? 0.9 : 0.1;
    prob(i, 1) = m(i, 1) == Vote::Yea ? 0.9 : 0.1;
  }
  prob(3, 0) = 0.8;  // the single error
  CHECK(apre(prob, m) == Approx(2.0 / 3.0).epsilon(1e-14));

  prob(3, 0) = 0.2;
  CHECK(apre(prob, m) == 1.0);

  // majority prediction everywhere reproduces the baseline
  arma::mat majority(5, 2, arma::fill::value(0.9));
  CHECK(apre(majority, m) == Approx(0.0).epsilon(1e-14));

  // unanimous bills contribute to neither sum
  VoteMatrix u(5, 3, Vote::Yea);
  for (std::size_t i = 0; i < 5; ++i) u(i, 0) = m(i, 0), u(i, 1) = m(i, 1);
  arma::mat pu = arma::join_rows(prob, arma::mat(5, 1, arma::fill::value(0.1)));
  CHECK(apre(pu, u) == 1.0);

  CHECK_THROWS_AS(apre(arma::mat(2, 2), VoteMatrix(2, 2)), DataError);
  // APRE never exceeds 1
  Stream rng(53, Block::Test);
  for (int t = 0; t < 50; ++t) {
    const VoteMatrix r = test::random_votes(12, 6, rng, 0.1);
    arma::mat p(12, 6);
    for (auto& v : p) v = rng.uniform();
    CHECK(apre(p, r) <= 1.0);
  }
}

TEST_CASE("plug-in and draw-averaged estimators agree when saturated") {
  Stream rng(54, Block::Test);
  ModelState s = test::random_state(5, 4, 2, rng);
  for (auto& v : s.theta) v = v > 0 ? 40 : -40;
  std::vector<ModelState> draws(6, s);
  for (auto& d : draws) d.beta += 0.1 * rng.normal();
  VoteMatrix m = test::random_votes(5, 4, rng);
  CHECK(classification_accuracy(posterior_mean_probabilities(draws), m) ==
        classification_accuracy(plugin_probabilities(s), m));
}

TEST_CASE("metric audit") {
  CHECK(violates_triangle(DistanceForm::GaussianUtility, 3, 3, 1));
  CHECK(audit_distance(DistanceForm::GaussianUtility, 3, 3) == -1.0);
  CHECK(audit_distance(DistanceForm::GaussianUtility, 3, 1) == Approx(-std::exp(-2.0)));
  CHECK(violates_triangle(DistanceForm::Quadratic, 0, 1, 2));
  CHECK_FALSE(violates_triangle(DistanceForm::Euclidean, 0, 1, 2));

  const AuditResult e = metric_audit(DistanceForm::Euclidean, 100000, 1);
  CHECK(e.total() == 0);
  for (auto f : {DistanceForm::Quadratic, DistanceForm::GaussianUtility}) {
    const AuditResult r = metric_audit(f, 1000, 2);
    CHECK(r.random_violations >= 1);
    CHECK(r.witness_violations >= 1);
    // the fixed witnesses guarantee a violation even for one triple
    CHECK(metric_audit(f, 1, 3).total() >= 1);
  }
  // quadratic violations sit where (x - y)(y - z) > 0
  const AuditResult q = metric_audit(DistanceForm::Quadratic, 100000, 4);
  CHECK(q.violations_opposite_sign == 0);
  CHECK(q.violations_same_sign == q.random_violations);
  Stream rng(55, Block::Test);
  for (int t = 0; t < 10000; ++t) {
    const double x = rng.normal(), y = rng.normal(), z = rng.normal();
    const double prod = (x - y) * (y - z);
    if (std::abs(prod) > 1e-9)
      CHECK(violates_triangle(DistanceForm::Quadratic, x, y, z) == (prod > 0));
  }
  CHECK(distance_form_from_string("gaussian-utility") == DistanceForm::GaussianUtility);
  CHECK_THROWS_AS(distance_form_from_string("manhattan"), ConfigError);
}

TEST_CASE("gamma report") {
  ChainDraws c;
  ModelState s = ModelState::zeros(1, 1, 1);
  s.gamma = 2.0;
  c.draws.assign(10, s);
  const GammaSummary one = gamma_report(std::vector<ChainDraws>{c});
  CHECK(one.mean == 2.0);
  CHECK(one.sd == 0.0);
  const GammaSummary two = gamma_report(std::vector<double>{1.0, 3.0});
  CHECK(two.mean == 2.0);
  CHECK(two.sd == Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(gamma_report(std::vector<double>{}), ContractViolation);
}

TEST_CASE("report JSON") {
  MetricsReport r;
  r.accuracy = 0.8;
  r.apre = 0.4;
  r.silhouette_mean = 0.5;
  r.audit_violations["quadratic"] = 3;
  const auto j = to_json(r);
  CHECK(j.at("accuracy") == 0.8);
  CHECK(j.at("estimator") == "posterior-mean-plugin");
  CHECK(j.at("audit_violations").at("quadratic") == 3);
}

}
