#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lsirm/birt.hpp"
#include "lsirm/identify.hpp"
#include "lsirm/metrics.hpp"
#include "lsirm/simgen.hpp"

namespace lsirm {

// Legislator label used for silhouettes: cluster, faction or group.
std::string default_label_key(const ScenarioSpec& spec);

struct LsirmResult {
  std::vector<ChainDraws> chains;
  AlignedPosterior posterior;  // draws pooled over chains
  MetricsReport report;
};

struct BirtResult {
  BirtFit fit;
  MetricsReport report;
};

// Fit, align and score. Silhouette is skipped when `label_key` is empty or
// absent from the data's labels.
LsirmResult evaluate_lsirm(const VoteMatrix& data, const Hyperparams& hyper,
                           const SamplerConfig& config, const std::string& label_key,
                           Estimator estimator = Estimator::PluginPosteriorMean);
BirtResult evaluate_birt(const VoteMatrix& data, const BirtConfig& config,
                         const std::string& label_key);

MetricsReport lsirm_report(const AlignedPosterior& post, const std::vector<ModelState>& draws,
                           const VoteMatrix& data, const std::string& label_key,
                           Estimator estimator);
MetricsReport birt_report(const BirtState& mean, const VoteMatrix& data,
                          const std::string& label_key);

struct ReplicateOptions {
  ScenarioSpec scenario;  // its seed is replaced by each entry of `seeds`
  std::vector<std::uint64_t> seeds;
  bool lsirm = true;
  bool birt = false;
  Hyperparams hyper;
  SamplerConfig sampler;  // its seed is replaced by the replication seed
  BirtConfig birt_config;
  std::string label_key;  // empty: default_label_key(scenario)
  std::size_t jobs = 1;
};

struct ResultRow {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string method;
  std::size_t n_legislators = 0, n_bills = 0;
  std::optional<double> silhouette;
  double accuracy = 0.0, apre = 0.0;
  std::optional<double> gamma_mean;
};

// One row per (seed, method), ordered by seed then method.
std::vector<ResultRow> replicate(const ReplicateOptions& options);

// scenario,seed,method,n_legislators,n_bills,silhouette,accuracy,apre,gamma_mean
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);

}  // namespace lsirm
