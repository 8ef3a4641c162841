#include "lsirm/io.hpp"

#include <fstream>
#include <sstream>

#include "lsirm/csv.hpp"
#include "lsirm/error.hpp"

namespace lsirm {

using nlohmann::json;

namespace {

std::string cell_token(Vote v) {
  switch (v) {
    case Vote::Yea: return "1";
    case Vote::Nay: return "0";
    default: return "NA";
  }
}

Vote parse_cell(const std::string& s) {
  if (s == "1") return Vote::Yea;
  if (s == "0") return Vote::Nay;
  if (s == "NA" || s.empty()) return Vote::Missing;
  throw DataError("vote matrix: bad cell '" + s + "'");
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

json steps_json(const StepSizes& s) {
  return {{"theta", s.theta}, {"beta", s.beta}, {"log_gamma", s.log_gamma},
          {"z", s.z}, {"w", s.w}};
}

StepSizes steps_from_json(const json& j) {
  StepSizes s;
  s.theta = get_or(j, "theta", s.theta);
  s.beta = get_or(j, "beta", s.beta);
  s.log_gamma = get_or(j, "log_gamma", s.log_gamma);
  s.z = get_or(j, "z", s.z);
  s.w = get_or(j, "w", s.w);
  return s;
}

}  // namespace

void write_vote_matrix_csv(std::ostream& out, const VoteMatrix& m) {
  std::vector<std::string> header{"legislator_id"};
  header.insert(header.end(), m.bill_ids().begin(), m.bill_ids().end());
  write_row(out, header);
  std::vector<std::string> row(m.n_bills() + 1);
  for (std::size_t i = 0; i < m.n_legislators(); ++i) {
    row[0] = m.legislator_ids()[i];
    for (std::size_t j = 0; j < m.n_bills(); ++j) row[j + 1] = cell_token(m(i, j));
    write_row(out, row);
  }
}

VoteMatrix read_vote_matrix_csv(std::istream& in) {
  CsvTable t = read_csv(in);
  if (t.header.empty() || t.header[0] != "legislator_id")
    throw DataError("vote matrix: first column must be legislator_id");
  const std::size_t p = t.header.size() - 1;
  const std::size_t n = t.rows.size();
  if (n == 0 || p == 0) throw DataError("vote matrix: empty");
  std::vector<Vote> cells;
  cells.reserve(n * p);
  std::vector<std::string> legs;
  for (const auto& r : t.rows) {
    legs.push_back(r[0]);
    for (std::size_t j = 1; j <= p; ++j) cells.push_back(parse_cell(r[j]));
  }
  std::vector<std::string> bills(t.header.begin() + 1, t.header.end());
  try {
    VoteMatrix m(n, p, std::move(cells), std::move(legs), std::move(bills));
    m.validate();
    return m;
  } catch (const ContractViolation& e) {
    throw DataError(std::string("vote matrix: ") + e.what());
  }
}

json vote_matrix_metadata(const VoteMatrix& m, const std::optional<ScenarioSpec>& spec) {
  json j;
  j["n_legislators"] = m.n_legislators();
  j["n_bills"] = m.n_bills();
  j["legislator_ids"] = m.legislator_ids();
  j["bill_ids"] = m.bill_ids();
  j["legislator_labels"] = m.labels.legislator;
  j["bill_labels"] = m.labels.bill;
  if (spec) j["scenario"] = to_json(*spec);
  return j;
}

void apply_metadata(VoteMatrix& m, const json& meta) {
  if (meta.contains("legislator_ids") &&
      meta.at("legislator_ids").get<std::vector<std::string>>() != m.legislator_ids())
    throw DataError("metadata: legislator ids do not match the matrix");
  if (meta.contains("bill_ids") &&
      meta.at("bill_ids").get<std::vector<std::string>>() != m.bill_ids())
    throw DataError("metadata: bill ids do not match the matrix");
  if (meta.contains("legislator_labels"))
    meta.at("legislator_labels").get_to(m.labels.legislator);
  if (meta.contains("bill_labels")) meta.at("bill_labels").get_to(m.labels.bill);
  try {
    m.validate();
  } catch (const ContractViolation& e) {
    throw DataError(std::string("metadata: ") + e.what());
  }
}

void save_vote_matrix(const std::filesystem::path& csv_path,
                      const std::filesystem::path& json_path, const VoteMatrix& m,
                      const std::optional<ScenarioSpec>& spec) {
  std::ostringstream csv;
  write_vote_matrix_csv(csv, m);
  write_text(csv_path, csv.str());
  write_json(json_path, vote_matrix_metadata(m, spec));
}

VoteMatrix load_vote_matrix(const std::filesystem::path& csv_path,
                            const std::optional<std::filesystem::path>& json_path) {
  std::istringstream in(read_text(csv_path));
  VoteMatrix m = read_vote_matrix_csv(in);
  if (json_path) apply_metadata(m, read_json(*json_path));
  return m;
}

json to_json(const SamplerConfig& c) {
  return {{"n_iterations", c.n_iterations},
          {"burn_in", c.burn_in},
          {"thin", c.thin},
          {"steps", steps_json(c.steps)},
          {"seed", c.seed},
          {"adapt_during_burnin", c.adapt_during_burnin},
          {"n_chains", c.n_chains},
          {"adapt_interval", c.adapt_interval},
          {"target_accept_scalar", c.target_accept_scalar},
          {"target_accept_vector", c.target_accept_vector},
          {"update_sigma_theta", c.update_sigma_theta},
          {"init", c.init == InitMethod::Pca ? "pca" : "random"}};
}

SamplerConfig sampler_config_from_json(const json& j) {
  SamplerConfig c;
  try {
    c.n_iterations = get_or(j, "n_iterations", c.n_iterations);
    c.burn_in = get_or(j, "burn_in", c.burn_in);
    c.thin = get_or(j, "thin", c.thin);
    if (j.contains("steps")) c.steps = steps_from_json(j.at("steps"));
    c.seed = get_or(j, "seed", c.seed);
    c.adapt_during_burnin = get_or(j, "adapt_during_burnin", c.adapt_during_burnin);
    c.n_chains = get_or(j, "n_chains", c.n_chains);
    c.adapt_interval = get_or(j, "adapt_interval", c.adapt_interval);
    c.target_accept_scalar = get_or(j, "target_accept_scalar", c.target_accept_scalar);
    c.target_accept_vector = get_or(j, "target_accept_vector", c.target_accept_vector);
    c.update_sigma_theta = get_or(j, "update_sigma_theta", c.update_sigma_theta);
    const std::string init = get_or<std::string>(j, "init", "random");
    if (init == "pca") c.init = InitMethod::Pca;
    else if (init == "random") c.init = InitMethod::Random;
    else throw ConfigError("sampler config: unknown init '" + init + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sampler config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const Hyperparams& h) {
  return {{"k", h.k},
          {"sigma_beta_sq", h.sigma_beta_sq},
          {"a_sigma", h.a_sigma},
          {"b_sigma", h.b_sigma},
          {"mu_gamma", h.mu_gamma},
          {"sigma_gamma_sq", h.sigma_gamma_sq}};
}

Hyperparams hyperparams_from_json(const json& j) {
  Hyperparams h;
  try {
    h.k = get_or(j, "k", h.k);
    h.sigma_beta_sq = get_or(j, "sigma_beta_sq", h.sigma_beta_sq);
    h.a_sigma = get_or(j, "a_sigma", h.a_sigma);
    h.b_sigma = get_or(j, "b_sigma", h.b_sigma);
    h.mu_gamma = get_or(j, "mu_gamma", h.mu_gamma);
    h.sigma_gamma_sq = get_or(j, "sigma_gamma_sq", h.sigma_gamma_sq);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("hyperparams: ") + e.what());
  }
  h.validate();
  return h;
}

std::string chain_csv_header(std::size_t n, std::size_t p, std::size_t k) {
  std::ostringstream out;
  for (std::size_t i = 1; i <= n; ++i) out << "theta_" << i << ',';
  for (std::size_t j = 1; j <= p; ++j) out << "beta_" << j << ',';
  out << "gamma,sigma_theta_sq";
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t d = 1; d <= k; ++d) out << ",z_" << i << '_' << d;
  for (std::size_t j = 1; j <= p; ++j)
    for (std::size_t d = 1; d <= k; ++d) out << ",w_" << j << '_' << d;
  return out.str();
}

void write_chain_csv(std::ostream& out, const std::vector<ModelState>& draws) {
  if (draws.empty()) throw ContractViolation("write_chain_csv: no draws");
  const auto& f = draws.front();
  const std::size_t n = f.n_legislators(), p = f.n_bills(), k = f.dims();
  out << chain_csv_header(n, p, k) << '\n';
  for (const auto& s : draws) {
    if (s.n_legislators() != n || s.n_bills() != p || s.dims() != k)
      throw ContractViolation("write_chain_csv: draws differ in shape");
    std::string line;
    auto put = [&](double v) {
      if (!line.empty()) line += ',';
      line += format_double(v);
    };
    for (double v : s.theta) put(v);
    for (double v : s.beta) put(v);
    put(s.gamma);
    put(s.sigma_theta_sq);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < k; ++d) put(s.z(i, d));
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t d = 0; d < k; ++d) put(s.w(j, d));
    out << line << '\n';
  }
}

std::vector<ModelState> read_chain_csv(std::istream& in) {
  CsvTable t = read_csv(in);
  std::size_t n = 0, p = 0, zcols = 0;
  for (const auto& h : t.header) {
    if (h.rfind("theta_", 0) == 0) ++n;
    else if (h.rfind("beta_", 0) == 0) ++p;
    else if (h.rfind("z_", 0) == 0) ++zcols;
  }
  if (n == 0 || p == 0 || zcols % n != 0) throw DataError("chain csv: bad header");
  const std::size_t k = zcols / n;
  if (t.header.size() != n + p + 2 + k * (n + p) ||
      chain_csv_header(n, p, k) != [&] {
        std::string s;
        for (std::size_t c = 0; c < t.header.size(); ++c) s += (c ? "," : "") + t.header[c];
        return s;
      }())
    throw DataError("chain csv: header does not follow the column convention");
  std::vector<ModelState> draws;
  draws.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    ModelState s = ModelState::zeros(n, p, k);
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) s.theta[i] = parse_double(r[c++]);
    for (std::size_t j = 0; j < p; ++j) s.beta[j] = parse_double(r[c++]);
    s.gamma = parse_double(r[c++]);
    s.sigma_theta_sq = parse_double(r[c++]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < k; ++d) s.z(i, d) = parse_double(r[c++]);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t d = 0; d < k; ++d) s.w(j, d) = parse_double(r[c++]);
    draws.push_back(std::move(s));
  }
  return draws;
}

json chain_sidecar(const ChainDraws& chain, const Hyperparams& hyper) {
  const auto& a = chain.acceptance_rates;
  return {{"model", "lsirm"},
          {"seed", chain.seed},
          {"chain", chain.chain},
          {"config", to_json(chain.config)},
          {"hyperparams", to_json(hyper)},
          {"n_draws", chain.draws.size()},
          {"acceptance_rates",
           {{"theta", a.theta}, {"beta", a.beta}, {"log_gamma", a.log_gamma},
            {"z", a.z}, {"w", a.w}}},
          {"final_steps", steps_json(chain.final_steps)},
          {"wall_clock_seconds", chain.wall_clock_seconds}};
}

void write_birt_chain_csv(std::ostream& out, const std::vector<BirtState>& draws) {
  if (draws.empty()) throw ContractViolation("write_birt_chain_csv: no draws");
  const std::size_t n = draws[0].n_legislators(), p = draws[0].n_bills(),
                    d = draws[0].dims();
  std::vector<std::string> header;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t k = 1; k <= d; ++k)
      header.push_back("birt_x_" + std::to_string(i) + "_" + std::to_string(k));
  for (std::size_t j = 1; j <= p; ++j)
    for (std::size_t k = 1; k <= d; ++k)
      header.push_back("birt_beta_" + std::to_string(j) + "_" + std::to_string(k));
  for (std::size_t j = 1; j <= p; ++j) header.push_back("birt_alpha_" + std::to_string(j));
  write_row(out, header);
  for (const auto& s : draws) {
    std::string line;
    auto put = [&](double v) {
      if (!line.empty()) line += ',';
      line += format_double(v);
    };
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < d; ++k) put(s.x(i, k));
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < d; ++k) put(s.discrimination(j, k));
    for (std::size_t j = 0; j < p; ++j) put(s.difficulty[j]);
    out << line << '\n';
  }
}

std::vector<BirtState> read_birt_chain_csv(std::istream& in) {
  CsvTable t = read_csv(in);
  std::size_t xcols = 0, bcols = 0, p = 0;
  for (const auto& h : t.header) {
    if (h.rfind("birt_x_", 0) == 0) ++xcols;
    else if (h.rfind("birt_beta_", 0) == 0) ++bcols;
    else if (h.rfind("birt_alpha_", 0) == 0) ++p;
    else throw DataError("birt chain csv: unexpected column " + h);
  }
  if (p == 0 || bcols % p != 0) throw DataError("birt chain csv: bad header");
  const std::size_t d = bcols / p;
  if (d == 0 || xcols % d != 0) throw DataError("birt chain csv: bad header");
  const std::size_t n = xcols / d;
  std::vector<BirtState> draws;
  for (const auto& r : t.rows) {
    BirtState s{arma::mat(n, d), arma::mat(p, d), arma::vec(p)};
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < d; ++k) s.x(i, k) = parse_double(r[c++]);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < d; ++k) s.discrimination(j, k) = parse_double(r[c++]);
    for (std::size_t j = 0; j < p; ++j) s.difficulty[j] = parse_double(r[c++]);
    draws.push_back(std::move(s));
  }
  return draws;
}

json birt_sidecar(const BirtFit& fit) {
  return {{"model", "birt"},
          {"seed", fit.seed},
          {"config", to_json(fit.config.sampler)},
          {"dims", fit.config.dims},
          {"prior_sd", fit.config.prior_sd},
          {"steps",
           {{"x", fit.config.steps.x},
            {"discrimination", fit.config.steps.discrimination},
            {"difficulty", fit.config.steps.difficulty}}},
          {"n_draws", fit.draws.size()},
          {"acceptance_rates",
           {{"x", fit.accept_x},
            {"discrimination", fit.accept_discrimination},
            {"difficulty", fit.accept_difficulty}}},
          {"wall_clock_seconds", fit.wall_clock_seconds}};
}

arma::mat AlignedCoordinates::legislators() const {
  std::vector<arma::uword> rows;
  for (std::size_t r = 0; r < node_type.size(); ++r)
    if (node_type[r] == "legislator") rows.push_back(r);
  return coords.rows(arma::uvec(rows));
}

arma::mat AlignedCoordinates::bills() const {
  std::vector<arma::uword> rows;
  for (std::size_t r = 0; r < node_type.size(); ++r)
    if (node_type[r] == "bill") rows.push_back(r);
  return coords.rows(arma::uvec(rows));
}

namespace {

AlignedCoordinates stack(const arma::mat& z, const arma::mat& zsd, const arma::mat& w,
                         const arma::mat& wsd, const VoteMatrix& data) {
  if (z.n_rows != data.n_legislators() || w.n_rows != data.n_bills())
    throw ContractViolation("aligned coordinates: shape does not match the data");
  AlignedCoordinates a;
  a.node_id = data.legislator_ids();
  a.node_id.insert(a.node_id.end(), data.bill_ids().begin(), data.bill_ids().end());
  a.node_type.assign(z.n_rows, "legislator");
  a.node_type.resize(z.n_rows + w.n_rows, "bill");
  a.coords = arma::join_cols(z, w);
  a.sd = arma::join_cols(zsd, wsd);
  return a;
}

arma::mat coordinate_sd(const std::vector<BirtState>& draws, bool ideal) {
  const auto pick = [&](const BirtState& s) -> const arma::mat& {
    return ideal ? s.x : s.discrimination;
  };
  const arma::mat& f = pick(draws.front());
  arma::mat sum(f.n_rows, f.n_cols, arma::fill::zeros), sq = sum;
  for (const auto& s : draws) {
    sum += pick(s);
    sq += arma::square(pick(s));
  }
  const double m = static_cast<double>(draws.size());
  if (m < 2) return arma::mat(f.n_rows, f.n_cols, arma::fill::zeros);
  return arma::sqrt(arma::clamp((sq - arma::square(sum) / m) / (m - 1), 0.0, arma::datum::inf));
}

}  // namespace

AlignedCoordinates aligned_coordinates(const AlignedPosterior& post,
                                       const VoteMatrix& data) {
  return stack(post.mean_state.z, post.z_sd, post.mean_state.w, post.w_sd, data);
}

// Bill rows carry discrimination vectors, which live in the same rotated
// frame as the ideal points but are directions rather than positions.
AlignedCoordinates aligned_coordinates(const BirtFit& fit, const VoteMatrix& data) {
  return stack(fit.mean.x, coordinate_sd(fit.aligned, true), fit.mean.discrimination,
               coordinate_sd(fit.aligned, false), data);
}

void write_aligned_csv(std::ostream& out, const AlignedCoordinates& a) {
  const std::size_t k = a.coords.n_cols;
  std::vector<std::string> header{"node_id", "node_type"};
  for (std::size_t d = 1; d <= k; ++d) header.push_back("dim_" + std::to_string(d));
  for (std::size_t d = 1; d <= k; ++d) header.push_back("sd_" + std::to_string(d));
  write_row(out, header);
  for (std::size_t r = 0; r < a.node_id.size(); ++r) {
    std::vector<std::string> row{a.node_id[r], a.node_type[r]};
    for (std::size_t d = 0; d < k; ++d) row.push_back(format_double(a.coords(r, d)));
    for (std::size_t d = 0; d < k; ++d) row.push_back(format_double(a.sd(r, d)));
    write_row(out, row);
  }
}

AlignedCoordinates read_aligned_csv(std::istream& in) {
  CsvTable t = read_csv(in);
  std::size_t k = 0;
  while (t.has_column("dim_" + std::to_string(k + 1))) ++k;
  if (k == 0) throw DataError("aligned csv: no dim_ columns");
  AlignedCoordinates a;
  a.coords.set_size(t.rows.size(), k);
  a.sd.zeros(t.rows.size(), k);
  const std::size_t id = t.column("node_id"), type = t.column("node_type");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    a.node_id.push_back(t.rows[r][id]);
    a.node_type.push_back(t.rows[r][type]);
    if (a.node_type.back() != "legislator" && a.node_type.back() != "bill")
      throw DataError("aligned csv: node_type must be legislator or bill");
    for (std::size_t d = 0; d < k; ++d) {
      a.coords(r, d) = parse_double(t.rows[r][t.column("dim_" + std::to_string(d + 1))]);
      const std::string sd = "sd_" + std::to_string(d + 1);
      if (t.has_column(sd)) a.sd(r, d) = parse_double(t.rows[r][t.column(sd)]);
    }
  }
  return a;
}

json to_json(const ModelState& s) {
  auto mat = [](const arma::mat& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.n_rows; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < m.n_cols; ++c) row.push_back(m(r, c));
      rows.push_back(row);
    }
    return rows;
  };
  return {{"theta", arma::conv_to<std::vector<double>>::from(s.theta)},
          {"beta", arma::conv_to<std::vector<double>>::from(s.beta)},
          {"gamma", s.gamma},
          {"sigma_theta_sq", s.sigma_theta_sq},
          {"z", mat(s.z)},
          {"w", mat(s.w)}};
}

ModelState model_state_from_json(const json& j) {
  try {
    auto mat = [](const json& rows, std::size_t k) {
      arma::mat m(rows.size(), k);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != k) throw DataError("model state: ragged matrix");
        for (std::size_t c = 0; c < k; ++c) m(r, c) = rows[r][c].get<double>();
      }
      return m;
    };
    ModelState s;
    s.theta = arma::vec(j.at("theta").get<std::vector<double>>());
    s.beta = arma::vec(j.at("beta").get<std::vector<double>>());
    s.gamma = j.at("gamma").get<double>();
    s.sigma_theta_sq = j.at("sigma_theta_sq").get<double>();
    const auto& z = j.at("z");
    const std::size_t k = z.empty() ? 0 : z[0].size();
    s.z = mat(z, k);
    s.w = mat(j.at("w"), k);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("model state: ") + e.what());
  } catch (const ContractViolation& e) {
    throw DataError(std::string("model state: ") + e.what());
  }
}

void write_silhouette_csv(std::ostream& out, const std::vector<std::string>& ids,
                          const std::vector<std::string>& labels,
                          const std::vector<double>& values) {
  require(ids.size() == labels.size() && ids.size() == values.size(),
          "write_silhouette_csv: length mismatch");
  write_row(out, {"legislator_id", "label", "silhouette"});
  for (std::size_t i = 0; i < ids.size(); ++i)
    write_row(out, {ids[i], labels[i], format_double(values[i])});
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << text;
  if (!out) throw DataError("write failed: " + p.string());
}

json read_json(const std::filesystem::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::parse_error& e) {
    throw DataError(p.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& p, const json& j) {
  write_text(p, j.dump(2) + "\n");
}

}  // namespace lsirm
