#pragma once

// File formats (column-exact descriptions live in docs/formats.md).

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "lsirm/birt.hpp"
#include "lsirm/identify.hpp"
#include "lsirm/metrics.hpp"
#include "lsirm/sampler.hpp"
#include "lsirm/simgen.hpp"

namespace lsirm {

// --- vote matrix ------------------------------------------------------------
// CSV: header "legislator_id,<bill ids...>", cells 1 / 0 / NA.
void write_vote_matrix_csv(std::ostream& out, const VoteMatrix& m);
VoteMatrix read_vote_matrix_csv(std::istream& in);

// Companion JSON: ids, labels and (optionally) the generating scenario.
nlohmann::json vote_matrix_metadata(const VoteMatrix& m,
                                    const std::optional<ScenarioSpec>& spec = std::nullopt);
void apply_metadata(VoteMatrix& m, const nlohmann::json& meta);

void save_vote_matrix(const std::filesystem::path& csv_path,
                      const std::filesystem::path& json_path, const VoteMatrix& m,
                      const std::optional<ScenarioSpec>& spec = std::nullopt);
VoteMatrix load_vote_matrix(const std::filesystem::path& csv_path,
                            const std::optional<std::filesystem::path>& json_path = std::nullopt);

// --- configs ----------------------------------------------------------------
nlohmann::json to_json(const SamplerConfig& c);
SamplerConfig sampler_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Hyperparams& h);
Hyperparams hyperparams_from_json(const nlohmann::json& j);

// --- chains -----------------------------------------------------------------
// One row per stored draw: theta_1..theta_N, beta_1..beta_P, gamma,
// sigma_theta_sq, z_1_1..z_N_K, w_1_1..w_P_K at 17 significant digits.
std::string chain_csv_header(std::size_t n, std::size_t p, std::size_t k);
void write_chain_csv(std::ostream& out, const std::vector<ModelState>& draws);
std::vector<ModelState> read_chain_csv(std::istream& in);

// Config, hyperparameters, seed, acceptance rates, adapted steps, timing.
nlohmann::json chain_sidecar(const ChainDraws& chain, const Hyperparams& hyper);

// Comparator chains: birt_x_i_d, birt_beta_j_d, birt_alpha_j.
void write_birt_chain_csv(std::ostream& out, const std::vector<BirtState>& draws);
std::vector<BirtState> read_birt_chain_csv(std::istream& in);
nlohmann::json birt_sidecar(const BirtFit& fit);

// --- aligned coordinates ------------------------------------------------------
// node_id,node_type,dim_1..dim_K,sd_1..sd_K
struct AlignedCoordinates {
  std::vector<std::string> node_id;
  std::vector<std::string> node_type;  // legislator | bill
  arma::mat coords;
  arma::mat sd;

  arma::mat legislators() const;
  arma::mat bills() const;
};

AlignedCoordinates aligned_coordinates(const AlignedPosterior& post,
                                       const VoteMatrix& data);
AlignedCoordinates aligned_coordinates(const BirtFit& fit, const VoteMatrix& data);
void write_aligned_csv(std::ostream& out, const AlignedCoordinates& a);
AlignedCoordinates read_aligned_csv(std::istream& in);

// Posterior-mean state (JSON) so downstream commands need not re-align.
nlohmann::json to_json(const ModelState& s);
ModelState model_state_from_json(const nlohmann::json& j);

void write_silhouette_csv(std::ostream& out, const std::vector<std::string>& ids,
                          const std::vector<std::string>& labels,
                          const std::vector<double>& values);

// --- helpers ----------------------------------------------------------------
std::string read_text(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& text);
nlohmann::json read_json(const std::filesystem::path& p);
void write_json(const std::filesystem::path& p, const nlohmann::json& j);

}  // namespace lsirm
