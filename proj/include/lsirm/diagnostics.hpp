#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lsirm/sampler.hpp"

namespace lsirm {

// Effective sample size from Geyer's initial positive sequence (made
// monotone), with tau bounded below by 1/log10(n). Returns nullopt when the
// chain has zero variance.
std::optional<double> effective_sample_size(std::span<const double> x);

// Geweke z-score comparing the first `first` and last `last` fractions.
std::optional<double> geweke_z(std::span<const double> x, double first = 0.1,
                               double last = 0.5);

struct ParameterDiagnostics {
  std::string name;
  std::optional<double> ess;
  std::optional<double> geweke;
  double min = 0.0;
  double max = 0.0;
};

struct BlockDiagnostics {
  std::size_t n_parameters = 0;
  std::size_t n_degenerate = 0;  // zero-variance traces
  double min_ess = 0.0;
  double median_ess = 0.0;
  double max_abs_geweke = 0.0;
  double trace_min = 0.0;
  double trace_max = 0.0;
};

struct ChainDiagnostics {
  std::vector<ParameterDiagnostics> parameters;
  std::map<std::string, BlockDiagnostics> blocks;  // theta, beta, gamma, ...
};

// Needs at least 10 draws. Latent positions are only meaningful after
// alignment; pass aligned draws for z / w summaries.
ChainDiagnostics diagnostics(const ChainDraws& chain);

}  // namespace lsirm
