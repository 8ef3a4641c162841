#include "lsirm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsirm/error.hpp"

namespace lsirm {

namespace {

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Biased autocovariances for lags 0..n-1 (direct O(n^2) sum truncated once
// the Geyer sequence terminates).
struct Autocov {
  std::span<const double> x;
  double mean;
  double at(std::size_t lag) const {
    double s = 0.0;
    const std::size_t n = x.size();
    for (std::size_t t = 0; t + lag < n; ++t) s += (x[t] - mean) * (x[t + lag] - mean);
    return s / static_cast<double>(n);
  }
};

}  // namespace

std::optional<double> effective_sample_size(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) return std::nullopt;
  Autocov ac{x, mean_of(x)};
  const double c0 = ac.at(0);
  if (!(c0 > 1e-300 * std::max(1.0, ac.mean * ac.mean))) return std::nullopt;

  double sum = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    double pair = (ac.at(2 * k) + ac.at(2 * k + 1)) / c0;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);  // initial monotone sequence
    prev_pair = pair;
    sum += pair;
  }
  const double nd = static_cast<double>(n);
  const double tau = std::max(-1.0 + 2.0 * sum, 1.0 / std::log10(nd));
  return nd / tau;
}

std::optional<double> geweke_z(std::span<const double> x, double first,
                               double last) {
  const std::size_t n = x.size();
  const std::size_t na = static_cast<std::size_t>(std::floor(first * n));
  const std::size_t nb = static_cast<std::size_t>(std::floor(last * n));
  if (na < 2 || nb < 2) return std::nullopt;
  auto a = x.subspan(0, na);
  auto b = x.subspan(n - nb, nb);
  auto var_of_mean = [](std::span<const double> s) -> std::optional<double> {
    const auto ess = effective_sample_size(s);
    if (!ess) return std::nullopt;
    const double m = mean_of(s);
    double v = 0.0;
    for (double e : s) v += (e - m) * (e - m);
    v /= static_cast<double>(s.size() - 1);
    return v / *ess;
  };
  const auto va = var_of_mean(a), vb = var_of_mean(b);
  if (!va || !vb) return std::nullopt;
  return (mean_of(a) - mean_of(b)) / std::sqrt(*va + *vb);
}

ChainDiagnostics diagnostics(const ChainDraws& chain) {
  const auto& draws = chain.draws;
  if (draws.size() < 10) throw ContractViolation("diagnostics: need at least 10 draws");
  const ModelState& s0 = draws.front();
  const std::size_t n = s0.n_legislators(), p = s0.n_bills(), k = s0.dims();

  ChainDiagnostics out;
  std::vector<double> trace(draws.size());
  auto add = [&](const std::string& block, const std::string& name, auto get) {
    for (std::size_t t = 0; t < draws.size(); ++t) trace[t] = get(draws[t]);
    ParameterDiagnostics d;
    d.name = name;
    d.ess = effective_sample_size(trace);
    d.geweke = geweke_z(trace);
    auto [lo, hi] = std::minmax_element(trace.begin(), trace.end());
    d.min = *lo;
    d.max = *hi;
    out.parameters.push_back(d);
    auto& b = out.blocks[block];
    if (b.n_parameters == 0) {
      b.trace_min = d.min;
      b.trace_max = d.max;
    }
    ++b.n_parameters;
    b.trace_min = std::min(b.trace_min, d.min);
    b.trace_max = std::max(b.trace_max, d.max);
    if (!d.ess) ++b.n_degenerate;
    if (d.geweke) b.max_abs_geweke = std::max(b.max_abs_geweke, std::abs(*d.geweke));
  };

  for (std::size_t i = 0; i < n; ++i)
    add("theta", "theta_" + std::to_string(i + 1),
        [i](const ModelState& s) { return s.theta[i]; });
  for (std::size_t j = 0; j < p; ++j)
    add("beta", "beta_" + std::to_string(j + 1),
        [j](const ModelState& s) { return s.beta[j]; });
  add("gamma", "gamma", [](const ModelState& s) { return s.gamma; });
  add("sigma_theta_sq", "sigma_theta_sq",
      [](const ModelState& s) { return s.sigma_theta_sq; });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < k; ++c)
      add("z", "z_" + std::to_string(i + 1) + "_" + std::to_string(c + 1),
          [i, c](const ModelState& s) { return s.z.at(i, c); });
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t c = 0; c < k; ++c)
      add("w", "w_" + std::to_string(j + 1) + "_" + std::to_string(c + 1),
          [j, c](const ModelState& s) { return s.w.at(j, c); });

  // Block membership follows insertion order above.
  std::size_t offset = 0;
  auto collect = [&](const std::string& block, std::size_t count) {
    std::vector<double> ess;
    for (std::size_t q = offset; q < offset + count; ++q)
      if (out.parameters[q].ess) ess.push_back(*out.parameters[q].ess);
    offset += count;
    auto& b = out.blocks[block];
    if (!ess.empty()) {
      std::sort(ess.begin(), ess.end());
      b.min_ess = ess.front();
      b.median_ess = ess[ess.size() / 2];
    }
  };
  collect("theta", n);
  collect("beta", p);
  collect("gamma", 1);
  collect("sigma_theta_sq", 1);
  collect("z", n * k);
  collect("w", p * k);
  return out;
}

}  // namespace lsirm
