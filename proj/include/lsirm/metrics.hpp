#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsirm/error.hpp"
#include "lsirm/identify.hpp"
#include "lsirm/random.hpp"

namespace lsirm {

struct SilhouetteResult {
  std::vector<double> per_point;
  double mean = 0.0;
};

// Euclidean silhouette of each row of `points` given cluster tags. Singleton
// clusters score 0, as does a point with a(i) = b(i) = 0.
SilhouetteResult silhouette(const arma::mat& points,
                            const std::vector<std::string>& labels);

// N x P matrix of predicted P(Yea).
arma::mat plugin_probabilities(const ModelState& state);
// Average of per-draw probabilities; positions need no alignment because
// the likelihood depends on distances only.
arma::mat posterior_mean_probabilities(const std::vector<ModelState>& draws);

// Predict Yea when P(Yea) >= 0.5; fraction correct over observed cells.
double classification_accuracy(const arma::mat& prob_yea, const VoteMatrix& data);
double classification_accuracy(const ModelState& fitted, const VoteMatrix& data);

// Aggregate proportional reduction in error against each bill's majority
// outcome: sum_j (minority_j - errors_j) / sum_j minority_j.
double apre(const arma::mat& prob_yea, const VoteMatrix& data);
double apre(const ModelState& fitted, const VoteMatrix& data);

enum class DistanceForm { Euclidean, Quadratic, GaussianUtility };

std::string to_string(DistanceForm f);
DistanceForm distance_form_from_string(const std::string& s);

// One-dimensional "distance" implied by each utility form.
double audit_distance(DistanceForm form, double x, double y);
bool violates_triangle(DistanceForm form, double x, double y, double z);

struct AuditResult {
  DistanceForm form = DistanceForm::Euclidean;
  std::size_t n_triples = 0;
  std::size_t random_violations = 0;
  // Split of random violations by the sign of (x - y)(y - z).
  std::size_t violations_same_sign = 0;
  std::size_t violations_opposite_sign = 0;
  std::size_t witness_violations = 0;  // over the fixed witness triples
  std::size_t total() const { return random_violations + witness_violations; }
};

// Fixed witnesses: (3, 3, 1) and (0, 1, 2).
std::vector<std::array<double, 3>> audit_witnesses();

// Random triples are uniform on [-5, 5]^3.
AuditResult metric_audit(DistanceForm form, std::size_t n_triples,
                         std::uint64_t seed);

struct GammaSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample SD (n - 1); 0 for a single replication
  std::vector<double> replication_means;
};

GammaSummary gamma_report(const std::vector<ChainDraws>& chains);
GammaSummary gamma_report(const std::vector<double>& posterior_means);
double posterior_mean_gamma(const std::vector<ModelState>& draws);

enum class Estimator { PluginPosteriorMean, DrawAverage };
std::string to_string(Estimator e);

struct MetricsReport {
  std::string method = "lsirm";
  std::string estimator = "posterior-mean-plugin";
  std::optional<double> silhouette_mean;
  std::vector<double> silhouette_per_point;
  std::string silhouette_label;
  double accuracy = 0.0;
  double apre = 0.0;
  std::optional<double> gamma_mean;
  std::optional<double> gamma_sd;
  std::map<std::string, std::size_t> audit_violations;
};

nlohmann::json to_json(const MetricsReport& r);

}  // namespace lsirm
