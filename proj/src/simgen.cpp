#include "lsirm/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lsirm/error.hpp"
#include "lsirm/random.hpp"

namespace lsirm {

namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

// Fills row i with Bernoulli(prob(j)) votes from the row's own stream.
template <class Prob>
void fill_row(VoteMatrix& m, std::size_t i, std::uint64_t seed, Prob&& prob) {
  Stream rng({seed, 0, 0, Block::Simulate, static_cast<std::uint32_t>(i)});
  for (std::size_t j = 0; j < m.n_bills(); ++j)
    m(i, j) = rng.uniform() < prob(j) ? Vote::Yea : Vote::Nay;
}

struct Faction {
  std::string name;
  std::string party;
  std::size_t size;
};

struct BillSpec {
  std::string type;
  std::vector<std::size_t> supporters;  // faction indices
};

std::string join_targets(const std::vector<Faction>& factions,
                         const std::vector<std::size_t>& idx) {
  std::string out;
  for (std::size_t f : idx) {
    if (!out.empty()) out += '+';
    out += factions[f].name;
  }
  return out;
}

}  // namespace

PartyFactionParams PartyFactionParams::defaults(PartyScenario scenario) {
  PartyFactionParams p;
  p.scenario = scenario;
  switch (scenario) {
    case PartyScenario::AgendaSweep:
      p.n_bills = 400;
      break;
    case PartyScenario::NoiseSweep:
      p.n_bills = 200;
      break;
    case PartyScenario::CrossParty:
      p.n_bills = 240;
      p.n_bridge_per_type = 40;
      p.variant = CoalitionVariant::Both;
      break;
    case PartyScenario::FourCoalitionDemo:
      p.n_bills = 400;
      break;
  }
  return p;
}

std::string ScenarioSpec::kind() const {
  struct Visitor {
    std::string operator()(const CohesionGradientParams&) const { return "cohesion-gradient"; }
    std::string operator()(const ClusterRecoveryParams&) const { return "cluster-recovery"; }
    std::string operator()(const PartyFactionParams& p) const { return to_string(p.scenario); }
  };
  return std::visit(Visitor{}, params);
}

void ScenarioSpec::validate() const {
  (void)generate(*this);
}

VoteMatrix gen_cohesion_gradient(const CohesionGradientParams& par,
                                 std::uint64_t seed) {
  check_probability(par.p_indep, "p_indep");
  check_probability(par.loyalty, "loyalty");
  if (!(par.independent_share >= 0.0 && par.independent_share <= 1.0))
    throw ConfigError("independent_share must lie in [0, 1]");
  if (par.n_bills == 0 || par.group_size == 0 || par.n_groups_per_bloc == 0)
    throw ConfigError("cohesion gradient counts must be positive");
  const double raw = par.independent_share * static_cast<double>(par.group_size);
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) > 1e-9)
    throw ConfigError("independent_share must select a whole number of group members");
  const auto n_indep = static_cast<std::size_t>(rounded);

  const std::size_t n_groups = 2 * par.n_groups_per_bloc;
  const std::size_t n = n_groups * par.group_size;
  VoteMatrix m(n, par.n_bills, Vote::Nay);
  auto& group = m.labels.legislator["group"];
  auto& bloc = m.labels.legislator["bloc"];
  auto& indep = m.labels.legislator["independent"];
  std::vector<bool> is_indep(n, false);
  for (std::size_t g = 0; g < n_groups; ++g) {
    std::vector<std::size_t> members(par.group_size);
    std::iota(members.begin(), members.end(), g * par.group_size);
    Stream rng({seed, 1, 0, Block::Simulate, static_cast<std::uint32_t>(g)});
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t a = 0; a < n_indep; ++a) is_indep[members[a]] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = i / par.group_size;
    group.push_back("G" + std::to_string(g + 1));
    bloc.push_back(g < par.n_groups_per_bloc ? "A" : "B");
    indep.push_back(is_indep[i] ? "1" : "0");
  }
  auto& type = m.labels.bill["type"];
  auto& target = m.labels.bill["target"];
  for (std::size_t j = 0; j < par.n_bills; ++j) {
    type.push_back("bloc");
    target.push_back(j % 2 == 0 ? "A" : "B");
  }
  for (std::size_t i = 0; i < n; ++i)
    fill_row(m, i, seed, [&](std::size_t j) {
      if (is_indep[i]) return par.p_indep;
      return bloc[i] == target[j] ? par.loyalty : 1.0 - par.loyalty;
    });
  return m;
}

VoteMatrix gen_cluster_recovery(const ClusterRecoveryParams& par,
                                std::uint64_t seed) {
  check_probability(par.p, "p");
  check_probability(par.q, "q");
  if (!(par.p > par.q)) throw ContractViolation("cluster recovery requires p > q");
  if (par.k < 2 || par.bills_per_cluster == 0 || par.cluster_size == 0)
    throw ConfigError("cluster recovery needs k >= 2 and positive sizes");
  const std::size_t n = par.k * par.cluster_size;
  const std::size_t p = par.k * par.bills_per_cluster;
  VoteMatrix m(n, p, Vote::Nay);
  auto& cluster = m.labels.legislator["cluster"];
  for (std::size_t i = 0; i < n; ++i)
    cluster.push_back("K" + std::to_string(i / par.cluster_size + 1));
  auto& type = m.labels.bill["type"];
  auto& target = m.labels.bill["target"];
  for (std::size_t j = 0; j < p; ++j) {
    type.push_back("cluster");
    target.push_back("K" + std::to_string(j / par.bills_per_cluster + 1));
  }
  for (std::size_t i = 0; i < n; ++i)
    fill_row(m, i, seed, [&](std::size_t j) {
      return i / par.cluster_size == j / par.bills_per_cluster ? par.p : par.q;
    });
  return m;
}

VoteMatrix gen_party_faction(const PartyFactionParams& par, std::uint64_t seed) {
  check_probability(par.p, "p");
  check_probability(par.q, "q");
  check_probability(par.partisan_share, "partisan_share");
  if (par.n_bills == 0) throw ConfigError("n_bills must be positive");

  std::vector<Faction> factions;
  switch (par.scenario) {
    case PartyScenario::AgendaSweep:
      factions = {{"L1", "L", 30}, {"L2", "L", 30}, {"L3", "L", 30},
                  {"C1", "C", 30}, {"C2", "C", 30}, {"C3", "C", 30}};
      break;
    case PartyScenario::NoiseSweep:
      factions = {{"L1", "L", 20}, {"L2", "L", 20}, {"C1", "C", 20}, {"C2", "C", 20}};
      break;
    case PartyScenario::CrossParty:
    case PartyScenario::FourCoalitionDemo:
      factions = {{"L1", "L", 70}, {"L2", "L", 10}, {"C1", "C", 70}, {"C2", "C", 10}};
      break;
  }
  auto members_of = [&](const std::string& party) {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < factions.size(); ++f)
      if (factions[f].party == party) out.push_back(f);
    return out;
  };
  auto find = [&](const std::string& name) {
    for (std::size_t f = 0; f < factions.size(); ++f)
      if (factions[f].name == name) return f;
    throw ConfigError("unknown faction " + name);
  };

  std::vector<BillSpec> bills;
  auto add_partisan = [&](std::size_t count) {
    const std::size_t for_l = count - count / 2;
    for (std::size_t b = 0; b < for_l; ++b) bills.push_back({"partisan", members_of("L")});
    for (std::size_t b = 0; b < count / 2; ++b) bills.push_back({"partisan", members_of("C")});
  };

  if (par.scenario == PartyScenario::CrossParty) {
    const std::size_t n_a = par.variant == CoalitionVariant::EndsAgainstMiddle ? 0 : par.n_bridge_per_type;
    const std::size_t n_b = par.variant == CoalitionVariant::MajorityConsensus ? 0 : par.n_bridge_per_type;
    if (n_a + n_b > par.n_bills) throw ConfigError("bridge bills exceed n_bills");
    add_partisan(par.n_bills - n_a - n_b);
    for (std::size_t b = 0; b < n_a; ++b) bills.push_back({"bridge_a", {find("L1"), find("C1")}});
    for (std::size_t b = 0; b < n_b; ++b) bills.push_back({"bridge_b", {find("L2"), find("C2")}});
  } else {
    const auto n_partisan = static_cast<std::size_t>(
        std::llround(par.partisan_share * static_cast<double>(par.n_bills)));
    add_partisan(n_partisan);
    const std::size_t n_faction = par.n_bills - n_partisan;
    for (std::size_t f = 0; f < factions.size(); ++f) {
      const std::size_t count = n_faction / factions.size() +
                                (f < n_faction % factions.size() ? 1 : 0);
      for (std::size_t b = 0; b < count; ++b) bills.push_back({"faction", {f}});
    }
  }

  std::size_t n = 0;
  for (const auto& f : factions) n += f.size;
  VoteMatrix m(n, bills.size(), Vote::Nay);
  std::vector<std::size_t> faction_of;
  auto& party = m.labels.legislator["party"];
  auto& faction = m.labels.legislator["faction"];
  for (std::size_t f = 0; f < factions.size(); ++f)
    for (std::size_t a = 0; a < factions[f].size; ++a) {
      faction_of.push_back(f);
      party.push_back(factions[f].party);
      faction.push_back(factions[f].name);
    }
  auto& type = m.labels.bill["type"];
  auto& target = m.labels.bill["target"];
  std::vector<std::vector<bool>> supports(bills.size(), std::vector<bool>(factions.size(), false));
  for (std::size_t j = 0; j < bills.size(); ++j) {
    type.push_back(bills[j].type);
    target.push_back(join_targets(factions, bills[j].supporters));
    for (std::size_t f : bills[j].supporters) supports[j][f] = true;
  }
  for (std::size_t i = 0; i < n; ++i)
    fill_row(m, i, seed, [&](std::size_t j) {
      return supports[j][faction_of[i]] ? par.p : par.q;
    });
  return m;
}

VoteMatrix generate(const ScenarioSpec& spec) {
  struct Visitor {
    std::uint64_t seed;
    VoteMatrix operator()(const CohesionGradientParams& p) const { return gen_cohesion_gradient(p, seed); }
    VoteMatrix operator()(const ClusterRecoveryParams& p) const { return gen_cluster_recovery(p, seed); }
    VoteMatrix operator()(const PartyFactionParams& p) const { return gen_party_faction(p, seed); }
  };
  return std::visit(Visitor{spec.seed}, spec.params);
}

std::string to_string(PartyScenario s) {
  switch (s) {
    case PartyScenario::AgendaSweep: return "agenda-sweep";
    case PartyScenario::NoiseSweep: return "noise-sweep";
    case PartyScenario::CrossParty: return "cross-party";
    case PartyScenario::FourCoalitionDemo: return "four-coalition-demo";
  }
  return "unknown";
}

PartyScenario party_scenario_from_string(const std::string& s) {
  for (auto v : {PartyScenario::AgendaSweep, PartyScenario::NoiseSweep,
                 PartyScenario::CrossParty, PartyScenario::FourCoalitionDemo})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown scenario '" + s + "'");
}

std::string to_string(CoalitionVariant v) {
  switch (v) {
    case CoalitionVariant::MajorityConsensus: return "majority-consensus";
    case CoalitionVariant::EndsAgainstMiddle: return "ends-against-middle";
    case CoalitionVariant::Both: return "both";
  }
  return "unknown";
}

CoalitionVariant coalition_variant_from_string(const std::string& s) {
  for (auto v : {CoalitionVariant::MajorityConsensus,
                 CoalitionVariant::EndsAgainstMiddle, CoalitionVariant::Both})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown coalition variant '" + s + "'");
}

nlohmann::json to_json(const ScenarioSpec& spec) {
  nlohmann::json params;
  if (const auto* c = std::get_if<CohesionGradientParams>(&spec.params)) {
    params = {{"independent_share", c->independent_share},
              {"p_indep", c->p_indep},
              {"loyalty", c->loyalty},
              {"n_bills", c->n_bills},
              {"n_groups_per_bloc", c->n_groups_per_bloc},
              {"group_size", c->group_size}};
  } else if (const auto* r = std::get_if<ClusterRecoveryParams>(&spec.params)) {
    params = {{"k", r->k},
              {"p", r->p},
              {"q", r->q},
              {"bills_per_cluster", r->bills_per_cluster},
              {"cluster_size", r->cluster_size}};
  } else {
    const auto& f = std::get<PartyFactionParams>(spec.params);
    params = {{"p", f.p},
              {"q", f.q},
              {"n_bills", f.n_bills},
              {"partisan_share", f.partisan_share},
              {"variant", to_string(f.variant)},
              {"n_bridge_per_type", f.n_bridge_per_type}};
  }
  return {{"kind", spec.kind()}, {"seed", spec.seed}, {"params", params}};
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  ScenarioSpec spec;
  spec.seed = j.value("seed", std::uint64_t{0});
  const std::string kind = j.at("kind").get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  if (kind == "cohesion-gradient") {
    CohesionGradientParams c;
    c.independent_share = params.value("independent_share", c.independent_share);
    c.p_indep = params.value("p_indep", c.p_indep);
    c.loyalty = params.value("loyalty", c.loyalty);
    c.n_bills = params.value("n_bills", c.n_bills);
    c.n_groups_per_bloc = params.value("n_groups_per_bloc", c.n_groups_per_bloc);
    c.group_size = params.value("group_size", c.group_size);
    spec.params = c;
  } else if (kind == "cluster-recovery") {
    ClusterRecoveryParams r;
    r.k = params.value("k", r.k);
    r.p = params.value("p", r.p);
    r.q = params.value("q", r.q);
    r.bills_per_cluster = params.value("bills_per_cluster", r.bills_per_cluster);
    r.cluster_size = params.value("cluster_size", r.cluster_size);
    spec.params = r;
  } else {
    PartyFactionParams f = PartyFactionParams::defaults(party_scenario_from_string(kind));
    f.p = params.value("p", f.p);
    f.q = params.value("q", f.q);
    f.n_bills = params.value("n_bills", f.n_bills);
    f.partisan_share = params.value("partisan_share", f.partisan_share);
    if (params.contains("variant"))
      f.variant = coalition_variant_from_string(params.at("variant").get<std::string>());
    f.n_bridge_per_type = params.value("n_bridge_per_type", f.n_bridge_per_type);
    spec.params = f;
  }
  return spec;
}

}  // namespace lsirm
