#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include <json.hpp>

#include "lsirm/vote_matrix.hpp"

namespace lsirm {

// Two blocs of five groups (ten legislators each) voting on bloc-contest
// bills. Within every group a fixed share of members are independents who
// vote Yea with probability p_indep on every bill.
struct CohesionGradientParams {
  double independent_share = 0.1;
  double p_indep = 0.5;
  double loyalty = 0.95;  // P(Yea) for a bloc member on own-bloc bills
  std::size_t n_bills = 52;
  std::size_t n_groups_per_bloc = 5;
  std::size_t group_size = 10;
};

// k disjoint clusters of `cluster_size` legislators; each bill targets one
// cluster. Targeted legislators vote Yea with probability p, others q.
struct ClusterRecoveryParams {
  std::size_t k = 5;
  double p = 0.8;
  double q = 0.2;
  std::size_t bills_per_cluster = 100;
  std::size_t cluster_size = 20;
};

enum class PartyScenario { AgendaSweep, NoiseSweep, CrossParty, FourCoalitionDemo };

// Which bridge bills a CrossParty agenda carries.
enum class CoalitionVariant { MajorityConsensus, EndsAgainstMiddle, Both };

// Two parties (L and C) split into factions L1.., C1... Bill
// types: partisan (one whole party), faction (one faction), bridge_a
// (L1 + C1) and bridge_b (L2 + C2). Supporters vote Yea w.p. p, others q.
struct PartyFactionParams {
  PartyScenario scenario = PartyScenario::FourCoalitionDemo;
  double p = 0.95;
  double q = 0.10;
  std::size_t n_bills = 400;
  double partisan_share = 0.5;  // AgendaSweep / NoiseSweep
  CoalitionVariant variant = CoalitionVariant::Both;  // CrossParty
  std::size_t n_bridge_per_type = 40;                 // CrossParty

  // Full-size defaults for each scenario.
  static PartyFactionParams defaults(PartyScenario scenario);
};

using ScenarioParams =
    std::variant<CohesionGradientParams, ClusterRecoveryParams, PartyFactionParams>;

struct ScenarioSpec {
  ScenarioParams params;
  std::uint64_t seed = 0;
  std::string kind() const;
  void validate() const;  // throws ConfigError
};

VoteMatrix gen_cohesion_gradient(const CohesionGradientParams& params,
                                 std::uint64_t seed);
VoteMatrix gen_cluster_recovery(const ClusterRecoveryParams& params,
                                std::uint64_t seed);
VoteMatrix gen_party_faction(const PartyFactionParams& params,
                             std::uint64_t seed);
VoteMatrix generate(const ScenarioSpec& spec);

nlohmann::json to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& j);

std::string to_string(PartyScenario s);
PartyScenario party_scenario_from_string(const std::string& s);
std::string to_string(CoalitionVariant v);
CoalitionVariant coalition_variant_from_string(const std::string& s);

}  // namespace lsirm
