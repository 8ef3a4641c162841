// lsirm: command-line front end. Exit status 0 on success, 1 on usage or
// configuration errors, 2 on data errors.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lsirm/csv.hpp"
#include "lsirm/diagnostics.hpp"
#include "lsirm/ingest.hpp"
#include "lsirm/io.hpp"
#include "lsirm/pipeline.hpp"
#include "lsirm/plot.hpp"

using namespace lsirm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Optional overrides for scenario parameters; unset flags keep the
// scenario's defaults.
struct ScenarioFlags {
  std::string kind;
  std::string spec_file;
  std::optional<double> share, p_indep, loyalty, p, q, partisan_share;
  std::optional<std::size_t> n_bills, k, bills_per_cluster, cluster_size, n_bridge;
  std::optional<std::string> variant;

  void add(CLI::App* app) {
    app->add_option("--kind", kind,
                    "cohesion-gradient | cluster-recovery | agenda-sweep | noise-sweep | "
                    "cross-party | four-coalition-demo");
    app->add_option("--spec", spec_file, "scenario JSON (as written by simulate)");
    app->add_option("--share", share, "independent share (cohesion-gradient)");
    app->add_option("--p-indep", p_indep, "independent Yea probability");
    app->add_option("--loyalty", loyalty, "bloc-member Yea probability");
    app->add_option("--p", p, "supporter Yea probability");
    app->add_option("--q", q, "non-supporter Yea probability");
    app->add_option("--partisan-share", partisan_share);
    app->add_option("--n-bills", n_bills);
    app->add_option("--k", k, "number of clusters");
    app->add_option("--bills-per-cluster", bills_per_cluster);
    app->add_option("--cluster-size", cluster_size);
    app->add_option("--n-bridge", n_bridge, "bridge bills per type (cross-party)");
    app->add_option("--variant", variant, "majority-consensus | ends-against-middle | both");
  }

  ScenarioSpec build(std::uint64_t seed) const {
    ScenarioSpec spec;
    if (!spec_file.empty()) {
      spec = scenario_from_json(read_json(spec_file));
    } else if (kind == "cohesion-gradient") {
      spec.params = CohesionGradientParams{};
    } else if (kind == "cluster-recovery") {
      spec.params = ClusterRecoveryParams{};
    } else if (!kind.empty()) {
      spec.params = PartyFactionParams::defaults(party_scenario_from_string(kind));
    } else {
      throw ConfigError("either --kind or --spec is required");
    }
    spec.seed = seed;
    std::visit(
        [&](auto& prm) {
          using T = std::decay_t<decltype(prm)>;
          if constexpr (std::is_same_v<T, CohesionGradientParams>) {
            if (share) prm.independent_share = *share;
            if (p_indep) prm.p_indep = *p_indep;
            if (loyalty) prm.loyalty = *loyalty;
            if (n_bills) prm.n_bills = *n_bills;
          } else if constexpr (std::is_same_v<T, ClusterRecoveryParams>) {
            if (k) prm.k = *k;
            if (p) prm.p = *p;
            if (q) prm.q = *q;
            if (bills_per_cluster) prm.bills_per_cluster = *bills_per_cluster;
            if (cluster_size) prm.cluster_size = *cluster_size;
          } else {
            if (p) prm.p = *p;
            if (q) prm.q = *q;
            if (n_bills) prm.n_bills = *n_bills;
            if (partisan_share) prm.partisan_share = *partisan_share;
            if (n_bridge) prm.n_bridge_per_type = *n_bridge;
            if (variant) prm.variant = coalition_variant_from_string(*variant);
          }
        },
        spec.params);
    spec.validate();
    return spec;
  }
};

struct SamplerFlags {
  std::string config_file, hyper_file;
  std::optional<std::size_t> iterations, burn_in, thin, chains, workers, k;
  std::optional<std::string> init;
  bool no_adapt = false;

  void add(CLI::App* app) {
    app->add_option("--config", config_file, "SamplerConfig JSON");
    app->add_option("--hyper", hyper_file, "Hyperparams JSON");
    app->add_option("--iterations", iterations);
    app->add_option("--burn-in", burn_in);
    app->add_option("--thin", thin);
    app->add_option("--chains", chains);
    app->add_option("--workers", workers, "threads within a sweep (output unaffected)");
    app->add_option("--dims", k, "latent dimension K");
    app->add_option("--init", init, "random | pca");
    app->add_flag("--no-adapt", no_adapt, "disable burn-in step adaptation");
  }

  SamplerConfig sampler(std::uint64_t seed) const {
    SamplerConfig c = config_file.empty() ? SamplerConfig{}
                                          : sampler_config_from_json(read_json(config_file));
    if (iterations) c.n_iterations = *iterations;
    if (burn_in) c.burn_in = *burn_in;
    if (thin) c.thin = *thin;
    if (chains) c.n_chains = *chains;
    if (workers) c.workers = *workers;
    if (init) {
      if (*init == "pca") c.init = InitMethod::Pca;
      else if (*init == "random") c.init = InitMethod::Random;
      else throw ConfigError("--init must be random or pca");
    }
    if (no_adapt) c.adapt_during_burnin = false;
    c.seed = seed;
    c.validate();
    return c;
  }

  Hyperparams hyper() const {
    Hyperparams h = hyper_file.empty() ? Hyperparams{} : hyperparams_from_json(read_json(hyper_file));
    if (k) h.k = *k;
    h.validate();
    return h;
  }
};

VoteMatrix load_data(const std::string& csv, const std::string& meta) {
  return load_vote_matrix(csv, meta.empty() ? std::nullopt
                                            : std::optional<fs::path>(meta));
}

void write_stream(const fs::path& p, const std::function<void(std::ostream&)>& fn) {
  std::ostringstream s;
  fn(s);
  write_text(p, s.str());
}

std::vector<ModelState> load_chains(const std::vector<std::string>& files) {
  std::vector<ModelState> pooled;
  for (const auto& f : files) {
    std::istringstream in(read_text(f));
    auto d = read_chain_csv(in);
    pooled.insert(pooled.end(), d.begin(), d.end());
  }
  if (pooled.size() < 2) throw DataError("need at least two stored draws");
  return pooled;
}

// Fallback ids when no vote matrix accompanies a chain.
VoteMatrix shape_only(std::size_t n, std::size_t p) { return VoteMatrix(n, p); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Euclidean latent space item response model for roll-call votes"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  std::uint64_t seed = 0;

  // simulate ------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "generate a synthetic vote matrix");
  ScenarioFlags sim_flags;
  std::string sim_out;
  sim_flags.add(sim);
  sim->add_option("--seed", seed)->required();
  sim->add_option("--out", sim_out, "output prefix (<out>.csv, <out>.json)")->required();

  // ingest --------------------------------------------------------------
  auto* ing = app.add_subcommand("ingest", "pivot a long-format roll-call file");
  std::string ing_votes, ing_out;
  IngestConfig ing_cfg;
  bool ing_keep_empty = false;
  ing->add_option("--votes", ing_votes, "CSV with legislator_id|icpsr, bill_id|rollnumber, cast_code|vote")
      ->required();
  ing->add_option("--threshold", ing_cfg.lopsided_threshold, "minimum minority share");
  ing->add_option("--yea-codes", ing_cfg.yea_codes);
  ing->add_option("--nay-codes", ing_cfg.nay_codes);
  ing->add_option("--missing-codes", ing_cfg.missing_codes);
  ing->add_flag("--keep-empty", ing_keep_empty, "keep legislators / bills with no observed vote");
  ing->add_option("--seed", seed, "accepted for uniformity; ingestion is deterministic");
  ing->add_option("--out", ing_out, "output prefix")->required();

  // fit -----------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "run the LSIRM sampler");
  std::string fit_data, fit_meta, fit_out;
  SamplerFlags fit_flags;
  fit->add_option("--data", fit_data, "vote matrix CSV")->required();
  fit->add_option("--meta", fit_meta, "vote matrix JSON");
  fit_flags.add(fit);
  fit->add_option("--seed", seed)->required();
  fit->add_option("--out", fit_out, "output prefix (<out>.chain<c>.csv/.json)")->required();

  // fit-birt ------------------------------------------------------------
  auto* fb = app.add_subcommand("fit-birt", "run the probit IRT comparator");
  std::string fb_data, fb_meta, fb_out;
  SamplerFlags fb_flags;
  double fb_prior_sd = 1.0;
  fb->add_option("--data", fb_data)->required();
  fb->add_option("--meta", fb_meta);
  fb_flags.add(fb);
  fb->add_option("--prior-sd", fb_prior_sd);
  fb->add_option("--seed", seed)->required();
  fb->add_option("--out", fb_out, "output prefix (<out>.birt.csv/.json, <out>.aligned.csv)")
      ->required();

  // align ---------------------------------------------------------------
  auto* al = app.add_subcommand("align", "align draws and export coordinates");
  std::vector<std::string> al_chains;
  std::string al_data, al_meta, al_out;
  std::optional<std::size_t> al_ref;
  al->add_option("--chain", al_chains, "chain CSV (repeatable)")->required();
  al->add_option("--data", al_data, "vote matrix CSV, for node ids");
  al->add_option("--meta", al_meta);
  al->add_option("--reference-draw", al_ref, "0-based draw index (default: last)");
  al->add_option("--seed", seed, "accepted for uniformity; alignment is deterministic");
  al->add_option("--out", al_out, "output prefix (<out>.aligned.csv, <out>.mean.json)")
      ->required();

  // metrics -------------------------------------------------------------
  auto* me = app.add_subcommand("metrics", "score a fitted model");
  std::vector<std::string> me_chains;
  std::string me_birt, me_data, me_meta, me_out, me_label, me_estimator = "plugin";
  std::size_t me_audit = 0;
  me->add_option("--chain", me_chains, "LSIRM chain CSV (repeatable)");
  me->add_option("--birt-chain", me_birt, "comparator chain CSV");
  me->add_option("--data", me_data)->required();
  me->add_option("--meta", me_meta, "labels for silhouettes");
  me->add_option("--label-key", me_label, "legislator label for silhouettes (default: cluster, faction or group)");
  me->add_option("--estimator", me_estimator, "plugin | draw-average");
  me->add_option("--audit-triples", me_audit, "also run the triangle audit");
  me->add_option("--seed", seed, "seed for the optional audit");
  me->add_option("--out", me_out, "output prefix (<out>.metrics.json, <out>.silhouette.csv)")
      ->required();

  // audit-metric ----------------------------------------------------------
  auto* au = app.add_subcommand("audit-metric", "triangle-inequality audit of utility forms");
  std::string au_form = "all", au_out;
  std::size_t au_triples = 100000;
  au->add_option("--form", au_form, "euclidean | quadratic | gaussian-utility | all");
  au->add_option("--triples", au_triples);
  au->add_option("--seed", seed)->required();
  au->add_option("--out", au_out, "output prefix (<out>.audit.json); stdout when omitted");

  // replicate -------------------------------------------------------------
  auto* rp = app.add_subcommand("replicate", "scenario x seeds x methods sweep");
  ScenarioFlags rp_flags;
  SamplerFlags rp_sampler;
  std::size_t rp_reps = 10, rp_jobs = 1;
  std::string rp_methods = "lsirm,birt", rp_out, rp_label;
  std::vector<std::uint64_t> rp_seeds;
  rp_flags.add(rp);
  rp_sampler.add(rp);
  rp->add_option("--replications", rp_reps, "seeds seed..seed+n-1");
  rp->add_option("--seeds", rp_seeds, "explicit seed list (overrides --replications)")
      ->delimiter(',');
  rp->add_option("--methods", rp_methods, "comma-separated subset of lsirm,birt");
  rp->add_option("--label-key", rp_label);
  rp->add_option("--jobs", rp_jobs, "replications run concurrently");
  rp->add_option("--seed", seed)->required();
  rp->add_option("--out", rp_out, "output prefix (<out>.results.csv/.json)")->required();

  // plot-data -------------------------------------------------------------
  auto* pl = app.add_subcommand("plot-data", "SVG scatter and tidy CSV of aligned coordinates");
  std::string pl_aligned, pl_meta, pl_label, pl_out, pl_title;
  bool pl_no_bills = false;
  pl->add_option("--aligned", pl_aligned)->required();
  pl->add_option("--meta", pl_meta, "vote matrix JSON with labels");
  pl->add_option("--label-key", pl_label, "legislator label for colours (default: cluster, faction or group)");
  pl->add_option("--title", pl_title);
  pl->add_flag("--no-bills", pl_no_bills);
  pl->add_option("--seed", seed, "accepted for uniformity");
  pl->add_option("--out", pl_out, "output prefix (<out>.svg, <out>.plot.csv)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*sim) {
      const ScenarioSpec spec = sim_flags.build(seed);
      save_vote_matrix(sim_out + ".csv", sim_out + ".json", generate(spec), spec);
    } else if (*ing) {
      ing_cfg.drop_empty = !ing_keep_empty;
      ing_cfg.validate();
      std::istringstream in(read_text(ing_votes));
      IngestReport rep;
      FilterReport frep;
      const VoteMatrix raw = ingest_votes(in, ing_cfg, &rep);
      const VoteMatrix kept = filter_lopsided(raw, ing_cfg.lopsided_threshold, &frep);
      if (kept.n_bills() == 0) throw DataError("no bills survive the lopsided filter");
      if (rep.unknown_codes)
        std::cerr << "warning: " << rep.unknown_codes << " unknown cast codes read as missing\n";
      std::cerr << "kept " << frep.kept_bills << " bills, dropped " << frep.dropped_bills
                << " lopsided; " << kept.n_legislators() << " legislators\n";
      json meta = vote_matrix_metadata(kept);
      meta["ingest"] = {{"source", ing_votes},
                        {"records", rep.records},
                        {"unknown_codes", rep.unknown_codes},
                        {"empty_legislators_dropped", rep.dropped_legislators},
                        {"empty_bills_dropped", rep.dropped_bills},
                        {"lopsided_threshold", ing_cfg.lopsided_threshold},
                        {"lopsided_dropped", frep.dropped_bills},
                        {"legislators_dropped_after_filter", frep.dropped_legislators},
                        {"yea_codes", ing_cfg.yea_codes},
                        {"nay_codes", ing_cfg.nay_codes},
                        {"missing_codes", ing_cfg.missing_codes}};
      write_stream(ing_out + ".csv", [&](std::ostream& o) { write_vote_matrix_csv(o, kept); });
      write_json(ing_out + ".json", meta);
    } else if (*fit) {
      const VoteMatrix data = load_data(fit_data, fit_meta);
      const Hyperparams h = fit_flags.hyper();
      const SamplerConfig c = fit_flags.sampler(seed);
      const auto chains = run_chains(data, h, c);
      for (const auto& ch : chains) {
        const std::string base = fit_out + ".chain" + std::to_string(ch.chain);
        write_stream(base + ".csv", [&](std::ostream& o) { write_chain_csv(o, ch.draws); });
        json side = chain_sidecar(ch, h);
        side["data"] = fit_data;
        if (ch.draws.size() >= 10) {
          const auto d = diagnostics(ch);
          json diag;
          for (const auto& [name, b] : d.blocks) {
            if (name == "z" || name == "w") continue;  // unaligned
            diag[name] = {{"min_ess", b.min_ess},
                          {"median_ess", b.median_ess},
                          {"max_abs_geweke", b.max_abs_geweke},
                          {"degenerate", b.n_degenerate}};
          }
          side["diagnostics"] = diag;
        }
        write_json(base + ".json", side);
      }
    } else if (*fb) {
      const VoteMatrix data = load_data(fb_data, fb_meta);
      BirtConfig bc;
      bc.sampler = fb_flags.sampler(seed);
      bc.dims = fb_flags.k.value_or(2);
      bc.prior_sd = fb_prior_sd;
      const BirtFit f = fit_birt(data, bc);
      if (f.draws.empty()) throw ConfigError("no draws stored");
      write_stream(fb_out + ".birt.csv", [&](std::ostream& o) { write_birt_chain_csv(o, f.draws); });
      json side = birt_sidecar(f);
      side["data"] = fb_data;
      write_json(fb_out + ".birt.json", side);
      write_stream(fb_out + ".aligned.csv", [&](std::ostream& o) {
        write_aligned_csv(o, aligned_coordinates(f, data));
      });
    } else if (*al) {
      const auto draws = load_chains(al_chains);
      SummarizeOptions opt;
      opt.reference_draw = al_ref;
      const AlignedPosterior post = summarize(draws, opt);
      const VoteMatrix data = al_data.empty()
                                  ? shape_only(post.mean_state.n_legislators(),
                                               post.mean_state.n_bills())
                                  : load_data(al_data, al_meta);
      write_stream(al_out + ".aligned.csv", [&](std::ostream& o) {
        write_aligned_csv(o, aligned_coordinates(post, data));
      });
      json mean = to_json(post.mean_state);
      mean["source_chains"] = al_chains;
      mean["n_draws"] = draws.size();
      mean["reference_draw"] = al_ref ? *al_ref : draws.size() - 1;
      mean["degenerate_reference"] = post.degenerate_reference;
      write_json(al_out + ".mean.json", mean);
    } else if (*me) {
      if (me_chains.empty() == me_birt.empty())
        throw ConfigError("give exactly one of --chain or --birt-chain");
      const VoteMatrix data = load_data(me_data, me_meta);
      if (me_label.empty())
        for (const char* key : {"cluster", "faction", "group"})
          if (data.labels.legislator.count(key)) {
            me_label = key;
            break;
          }
      MetricsReport rep;
      if (!me_chains.empty()) {
        Estimator est;
        if (me_estimator == "plugin") est = Estimator::PluginPosteriorMean;
        else if (me_estimator == "draw-average") est = Estimator::DrawAverage;
        else throw ConfigError("--estimator must be plugin or draw-average");
        const auto draws = load_chains(me_chains);
        rep = lsirm_report(summarize(draws), draws, data, me_label, est);
      } else {
        std::istringstream in(read_text(me_birt));
        const auto draws = read_birt_chain_csv(in);
        if (draws.empty()) throw DataError("empty comparator chain");
        rep = birt_report(align_birt(draws).mean, data, me_label);
      }
      if (me_audit > 0)
        for (DistanceForm f : {DistanceForm::Euclidean, DistanceForm::Quadratic,
                               DistanceForm::GaussianUtility})
          rep.audit_violations[to_string(f)] = metric_audit(f, me_audit, seed).total();
      json j = to_json(rep);
      j["data"] = me_data;
      j["chains"] = me_chains.empty() ? json::array({me_birt}) : json(me_chains);
      write_json(me_out + ".metrics.json", j);
      if (rep.silhouette_mean)
        write_stream(me_out + ".silhouette.csv", [&](std::ostream& o) {
          write_silhouette_csv(o, data.legislator_ids(), data.labels.legislator.at(me_label),
                               rep.silhouette_per_point);
        });
    } else if (*au) {
      std::vector<DistanceForm> forms;
      if (au_form == "all")
        forms = {DistanceForm::Euclidean, DistanceForm::Quadratic, DistanceForm::GaussianUtility};
      else
        forms = {distance_form_from_string(au_form)};
      json out = {{"seed", seed}, {"n_triples", au_triples}, {"forms", json::array()}};
      for (DistanceForm f : forms) {
        const AuditResult r = metric_audit(f, au_triples, seed);
        out["forms"].push_back({{"form", to_string(f)},
                                {"random_violations", r.random_violations},
                                {"violations_same_sign", r.violations_same_sign},
                                {"violations_opposite_sign", r.violations_opposite_sign},
                                {"witness_violations", r.witness_violations},
                                {"total", r.total()}});
      }
      if (au_out.empty()) std::cout << out.dump(2) << '\n';
      else write_json(au_out + ".audit.json", out);
    } else if (*rp) {
      ReplicateOptions o;
      o.scenario = rp_flags.build(seed);
      if (rp_seeds.empty())
        for (std::size_t r = 0; r < rp_reps; ++r) rp_seeds.push_back(seed + r);
      o.seeds = rp_seeds;
      o.lsirm = o.birt = false;
      std::stringstream ms(rp_methods);
      for (std::string m; std::getline(ms, m, ',');) {
        if (m == "lsirm") o.lsirm = true;
        else if (m == "birt") o.birt = true;
        else throw ConfigError("unknown method '" + m + "'");
      }
      o.hyper = rp_sampler.hyper();
      o.sampler = rp_sampler.sampler(seed);
      o.birt_config.sampler = o.sampler;
      o.birt_config.dims = o.hyper.k;
      o.label_key = rp_label;
      o.jobs = rp_jobs;
      const auto rows = replicate(o);
      write_stream(rp_out + ".results.csv", [&](std::ostream& s) { write_results_csv(s, rows); });
      write_json(rp_out + ".results.json", {{"scenario", to_json(o.scenario)},
                                            {"seeds", o.seeds},
                                            {"methods", rp_methods},
                                            {"sampler", to_json(o.sampler)},
                                            {"hyperparams", to_json(o.hyper)},
                                            {"label_key", o.label_key.empty()
                                                              ? default_label_key(o.scenario)
                                                              : o.label_key}});
    } else if (*pl) {
      std::istringstream in(read_text(pl_aligned));
      const AlignedCoordinates a = read_aligned_csv(in);
      std::vector<std::string> groups(a.node_id.size());
      const json meta = pl_meta.empty() ? json::object() : read_json(pl_meta);
      if (pl_label.empty() && meta.contains("legislator_labels"))
        for (const char* key : {"cluster", "faction", "group"})
          if (meta["legislator_labels"].contains(key)) {
            pl_label = key;
            break;
          }
      if (!pl_meta.empty() && !pl_label.empty()) {
        const auto ids = meta.at("legislator_ids").get<std::vector<std::string>>();
        const auto labels = meta.at("legislator_labels").at(pl_label).get<std::vector<std::string>>();
        std::map<std::string, std::string> by_id;
        for (std::size_t i = 0; i < ids.size() && i < labels.size(); ++i) by_id[ids[i]] = labels[i];
        for (std::size_t r = 0; r < a.node_id.size(); ++r)
          if (a.node_type[r] == "legislator") {
            auto it = by_id.find(a.node_id[r]);
            if (it == by_id.end()) throw DataError("no label for " + a.node_id[r]);
            groups[r] = it->second;
          }
      } else {
        for (std::size_t r = 0; r < a.node_id.size(); ++r)
          if (a.node_type[r] == "legislator") groups[r] = "legislator";
      }
      ScatterOptions so;
      so.title = pl_title;
      so.show_bills = !pl_no_bills;
      write_stream(pl_out + ".svg", [&](std::ostream& o) { write_scatter_svg(o, a, groups, so); });
      write_stream(pl_out + ".plot.csv", [&](std::ostream& o) { write_plot_csv(o, a, groups, so); });
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
