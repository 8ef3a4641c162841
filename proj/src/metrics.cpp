#include "lsirm/metrics.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

namespace lsirm {

SilhouetteResult silhouette(const arma::mat& points,
                            const std::vector<std::string>& labels) {
  const std::size_t n = points.n_rows;
  require(labels.size() == n, "silhouette: one label per point required");
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::size_t> cluster(n);
  for (std::size_t i = 0; i < n; ++i)
    cluster[i] = index.try_emplace(labels[i], index.size()).first->second;
  const std::size_t n_clusters = index.size();
  require(n_clusters >= 2, "silhouette: need at least two clusters");
  std::vector<std::size_t> sizes(n_clusters, 0);
  for (std::size_t c : cluster) ++sizes[c];

  SilhouetteResult out;
  out.per_point.assign(n, 0.0);
  std::vector<double> sums(n_clusters);
  for (std::size_t i = 0; i < n; ++i) {
    if (sizes[cluster[i]] == 1) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double ss = 0.0;
      for (std::size_t k = 0; k < points.n_cols; ++k) {
        const double d = points.at(i, k) - points.at(j, k);
        ss += d * d;
      }
      sums[cluster[j]] += std::sqrt(ss);
    }
    const double a = sums[cluster[i]] / static_cast<double>(sizes[cluster[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n_clusters; ++c)
      if (c != cluster[i]) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    const double denom = std::max(a, b);
    out.per_point[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  double total = 0.0;
  for (double s : out.per_point) total += s;
  out.mean = total / static_cast<double>(n);
  return out;
}

arma::mat plugin_probabilities(const ModelState& s) {
  arma::mat prob(s.n_legislators(), s.n_bills());
  for (std::size_t i = 0; i < s.n_legislators(); ++i)
    for (std::size_t j = 0; j < s.n_bills(); ++j)
      prob(i, j) = logistic(linear_predictor(s, i, j));
  return prob;
}

arma::mat posterior_mean_probabilities(const std::vector<ModelState>& draws) {
  require(!draws.empty(), "posterior_mean_probabilities: no draws");
  arma::mat acc(draws.front().n_legislators(), draws.front().n_bills(),
                arma::fill::zeros);
  for (const auto& d : draws) acc += plugin_probabilities(d);
  return acc / static_cast<double>(draws.size());
}

namespace {

void check_shape(const arma::mat& prob, const VoteMatrix& data) {
  require(prob.n_rows == data.n_legislators() && prob.n_cols == data.n_bills(),
          "prediction shape does not match the vote matrix");
}

bool predicts_yea(double p) { return p >= 0.5; }

}  // namespace

double classification_accuracy(const arma::mat& prob, const VoteMatrix& data) {
  check_shape(prob, data);
  std::size_t observed = 0, correct = 0;
  for (std::size_t i = 0; i < data.n_legislators(); ++i)
    for (std::size_t j = 0; j < data.n_bills(); ++j) {
      const Vote v = data(i, j);
      if (v == Vote::Missing) continue;
      ++observed;
      correct += predicts_yea(prob(i, j)) == (v == Vote::Yea);
    }
  if (observed == 0) throw DataError("classification_accuracy: no observed cells");
  return static_cast<double>(correct) / static_cast<double>(observed);
}

double classification_accuracy(const ModelState& fitted, const VoteMatrix& data) {
  return classification_accuracy(plugin_probabilities(fitted), data);
}

double apre(const arma::mat& prob, const VoteMatrix& data) {
  check_shape(prob, data);
  if (data.n_observed() == 0) throw DataError("apre: no observed cells");
  double minority_total = 0.0, reduction = 0.0;
  for (std::size_t j = 0; j < data.n_bills(); ++j) {
    std::size_t yea = 0, nay = 0, errors = 0;
    for (std::size_t i = 0; i < data.n_legislators(); ++i) {
      const Vote v = data(i, j);
      if (v == Vote::Missing) continue;
      (v == Vote::Yea ? yea : nay) += 1;
      errors += predicts_yea(prob(i, j)) != (v == Vote::Yea);
    }
    const std::size_t minority = std::min(yea, nay);
    if (minority == 0) continue;
    minority_total += static_cast<double>(minority);
    reduction += static_cast<double>(minority) - static_cast<double>(errors);
  }
  if (minority_total == 0.0) throw DataError("apre: every bill is unanimous");
  return reduction / minority_total;
}

double apre(const ModelState& fitted, const VoteMatrix& data) {
  return apre(plugin_probabilities(fitted), data);
}

std::string to_string(DistanceForm f) {
  switch (f) {
    case DistanceForm::Euclidean: return "euclidean";
    case DistanceForm::Quadratic: return "quadratic";
    case DistanceForm::GaussianUtility: return "gaussian-utility";
  }
  return "unknown";
}

DistanceForm distance_form_from_string(const std::string& s) {
  for (auto f : {DistanceForm::Euclidean, DistanceForm::Quadratic,
                 DistanceForm::GaussianUtility})
    if (to_string(f) == s) return f;
  throw ConfigError("unknown distance form '" + s + "'");
}

double audit_distance(DistanceForm form, double x, double y) {
  const double d = x - y;
  switch (form) {
    case DistanceForm::Euclidean: return std::abs(d);
    case DistanceForm::Quadratic: return d * d;
    case DistanceForm::GaussianUtility: return -std::exp(-0.5 * d * d);
  }
  return 0.0;
}

bool violates_triangle(DistanceForm form, double x, double y, double z) {
  return audit_distance(form, x, y) + audit_distance(form, y, z) <
         audit_distance(form, x, z) - 1e-12;
}

std::vector<std::array<double, 3>> audit_witnesses() {
  return {{3.0, 3.0, 1.0}, {0.0, 1.0, 2.0}};
}

AuditResult metric_audit(DistanceForm form, std::size_t n_triples,
                         std::uint64_t seed) {
  require(n_triples >= 1, "metric_audit: need at least one triple");
  AuditResult r;
  r.form = form;
  r.n_triples = n_triples;
  Stream rng(seed, Block::Audit);
  for (std::size_t t = 0; t < n_triples; ++t) {
    const double x = -5.0 + 10.0 * rng.uniform();
    const double y = -5.0 + 10.0 * rng.uniform();
    const double z = -5.0 + 10.0 * rng.uniform();
    if (!violates_triangle(form, x, y, z)) continue;
    ++r.random_violations;
    ((x - y) * (y - z) > 0.0 ? r.violations_same_sign : r.violations_opposite_sign) += 1;
  }
  for (const auto& w : audit_witnesses())
    r.witness_violations += violates_triangle(form, w[0], w[1], w[2]);
  return r;
}

double posterior_mean_gamma(const std::vector<ModelState>& draws) {
  require(!draws.empty(), "posterior_mean_gamma: no draws");
  double s = 0.0;
  for (const auto& d : draws) s += d.gamma;
  return s / static_cast<double>(draws.size());
}

GammaSummary gamma_report(const std::vector<double>& means) {
  require(!means.empty(), "gamma_report: need at least one replication");
  GammaSummary g;
  g.replication_means = means;
  for (double m : means) g.mean += m;
  g.mean /= static_cast<double>(means.size());
  if (means.size() > 1) {
    double ss = 0.0;
    for (double m : means) ss += (m - g.mean) * (m - g.mean);
    g.sd = std::sqrt(ss / static_cast<double>(means.size() - 1));
  }
  return g;
}

GammaSummary gamma_report(const std::vector<ChainDraws>& chains) {
  std::vector<double> means;
  for (const auto& c : chains) means.push_back(posterior_mean_gamma(c.draws));
  return gamma_report(means);
}

std::string to_string(Estimator e) {
  return e == Estimator::PluginPosteriorMean ? "posterior-mean-plugin"
                                             : "draw-averaged-probability";
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json j;
  j["method"] = r.method;
  j["estimator"] = r.estimator;
  j["accuracy"] = r.accuracy;
  j["apre"] = r.apre;
  if (r.silhouette_mean) {
    j["silhouette_mean"] = *r.silhouette_mean;
    j["silhouette_label"] = r.silhouette_label;
  } else {
    j["silhouette_mean"] = nullptr;
  }
  j["gamma_mean"] = r.gamma_mean ? nlohmann::json(*r.gamma_mean) : nlohmann::json(nullptr);
  j["gamma_sd"] = r.gamma_sd ? nlohmann::json(*r.gamma_sd) : nlohmann::json(nullptr);
  j["audit_violations"] = r.audit_violations;
  return j;
}

}  // namespace lsirm
