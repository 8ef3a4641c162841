#include "lsirm/pipeline.hpp"

#include <ostream>

#include "lsirm/csv.hpp"
#include "lsirm/parallel.hpp"

namespace lsirm {

std::string default_label_key(const ScenarioSpec& spec) {
  if (std::holds_alternative<ClusterRecoveryParams>(spec.params)) return "cluster";
  if (std::holds_alternative<PartyFactionParams>(spec.params)) return "faction";
  return "group";
}

namespace {

std::optional<SilhouetteResult> maybe_silhouette(const arma::mat& points,
                                                 const VoteMatrix& data,
                                                 const std::string& key) {
  if (key.empty()) return std::nullopt;
  auto it = data.labels.legislator.find(key);
  if (it == data.labels.legislator.end()) return std::nullopt;
  return silhouette(points, it->second);
}

}  // namespace

MetricsReport lsirm_report(const AlignedPosterior& post, const std::vector<ModelState>& draws,
                           const VoteMatrix& data, const std::string& label_key,
                           Estimator estimator) {
  MetricsReport r;
  r.method = "lsirm";
  r.estimator = to_string(estimator);
  const arma::mat prob = estimator == Estimator::DrawAverage
                             ? posterior_mean_probabilities(draws)
                             : plugin_probabilities(post.mean_state);
  r.accuracy = classification_accuracy(prob, data);
  r.apre = apre(prob, data);
  if (auto s = maybe_silhouette(post.mean_state.z, data, label_key)) {
    r.silhouette_mean = s->mean;
    r.silhouette_per_point = s->per_point;
    r.silhouette_label = label_key;
  }
  r.gamma_mean = post.mean_state.gamma;
  if (draws.size() > 1) {
    double m = 0, ss = 0;
    for (const auto& d : draws) m += d.gamma;
    m /= draws.size();
    for (const auto& d : draws) ss += (d.gamma - m) * (d.gamma - m);
    r.gamma_sd = std::sqrt(ss / (draws.size() - 1));
  }
  return r;
}

MetricsReport birt_report(const BirtState& mean, const VoteMatrix& data,
                          const std::string& label_key) {
  MetricsReport r;
  r.method = "birt";
  r.estimator = to_string(Estimator::PluginPosteriorMean);
  const arma::mat prob = birt_probabilities(mean);
  r.accuracy = classification_accuracy(prob, data);
  r.apre = apre(prob, data);
  if (auto s = maybe_silhouette(mean.x, data, label_key)) {
    r.silhouette_mean = s->mean;
    r.silhouette_per_point = s->per_point;
    r.silhouette_label = label_key;
  }
  return r;
}

LsirmResult evaluate_lsirm(const VoteMatrix& data, const Hyperparams& hyper,
                           const SamplerConfig& config, const std::string& label_key,
                           Estimator estimator) {
  LsirmResult res;
  res.chains = run_chains(data, hyper, config);
  std::vector<ModelState> pooled;
  for (const auto& c : res.chains) pooled.insert(pooled.end(), c.draws.begin(), c.draws.end());
  SummarizeOptions opt;
  opt.workers = config.workers;
  res.posterior = summarize(pooled, opt);
  res.report = lsirm_report(res.posterior, pooled, data, label_key, estimator);
  return res;
}

BirtResult evaluate_birt(const VoteMatrix& data, const BirtConfig& config,
                         const std::string& label_key) {
  BirtResult res;
  res.fit = fit_birt(data, config);
  res.report = birt_report(res.fit.mean, data, label_key);
  return res;
}

std::vector<ResultRow> replicate(const ReplicateOptions& o) {
  o.scenario.validate();
  o.sampler.validate();
  o.hyper.validate();
  if (o.seeds.empty()) throw ConfigError("replicate: no seeds");
  if (!o.lsirm && !o.birt) throw ConfigError("replicate: no method selected");
  const std::string key = o.label_key.empty() ? default_label_key(o.scenario) : o.label_key;
  const std::size_t per = (o.lsirm ? 1 : 0) + (o.birt ? 1 : 0);
  std::vector<ResultRow> rows(o.seeds.size() * per);
  parallel_for(o.seeds.size(), o.jobs, [&](std::size_t r) {
    ScenarioSpec spec = o.scenario;
    spec.seed = o.seeds[r];
    const VoteMatrix data = generate(spec);
    std::size_t slot = r * per;
    auto fill = [&](const std::string& method, const MetricsReport& rep) {
      ResultRow& row = rows[slot++];
      row.scenario = spec.kind();
      row.seed = spec.seed;
      row.method = method;
      row.n_legislators = data.n_legislators();
      row.n_bills = data.n_bills();
      row.silhouette = rep.silhouette_mean;
      row.accuracy = rep.accuracy;
      row.apre = rep.apre;
      row.gamma_mean = rep.gamma_mean;
    };
    if (o.lsirm) {
      SamplerConfig sc = o.sampler;
      sc.seed = spec.seed;
      sc.workers = 1;
      fill("lsirm", evaluate_lsirm(data, o.hyper, sc, key).report);
    }
    if (o.birt) {
      BirtConfig bc = o.birt_config;
      bc.sampler.seed = spec.seed;
      bc.sampler.workers = 1;
      fill("birt", evaluate_birt(data, bc, key).report);
    }
  });
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "scenario,seed,method,n_legislators,n_bills,silhouette,accuracy,apre,gamma_mean\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : "NA"; };
  for (const auto& r : rows)
    out << r.scenario << ',' << r.seed << ',' << r.method << ',' << r.n_legislators << ','
        << r.n_bills << ',' << opt(r.silhouette) << ',' << format_double(r.accuracy) << ','
        << format_double(r.apre) << ',' << opt(r.gamma_mean) << '\n';
}

}  // namespace lsirm
