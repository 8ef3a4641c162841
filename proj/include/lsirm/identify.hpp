#pragma once

#include <optional>
#include <vector>

#include "lsirm/sampler.hpp"

namespace lsirm {

// Legislator (z) and bill (w) positions sharing one latent space.
struct Configuration {
  arma::mat z;  // N x K
  arma::mat w;  // P x K
  std::size_t dims() const { return z.n_cols; }
};

// x -> x * rotation + translation, applied row-wise.
struct RigidTransform {
  arma::mat rotation;       // K x K orthogonal
  arma::rowvec translation;  // 1 x K

  static RigidTransform identity(std::size_t k);
  arma::mat apply(const arma::mat& x) const;
  Configuration apply(const Configuration& c) const;
};

// Joint centroid of all N + P points.
arma::rowvec joint_centroid(const Configuration& c);

Configuration center(const Configuration& c);

struct AxesAlignment {
  Configuration config;
  RigidTransform transform;
  arma::vec variances;     // decreasing
  std::size_t rank = 0;    // numerically non-zero eigenvalues
  bool degenerate = false;  // rank < K
};

// Rotates a centred configuration onto the eigenbasis of the joint
// covariance (variances decreasing), then flips each axis whose legislator
// skewness is negative.
AxesAlignment principal_axes(const Configuration& centered);
Configuration principal_axes_rotate(const Configuration& centered);

struct ProcrustesFit {
  Configuration aligned;
  RigidTransform transform;
  double mismatch = 0.0;  // Frobenius norm after alignment
};

// Orthogonal + translation least-squares match of `draw` onto `reference`.
ProcrustesFit procrustes_align(const Configuration& draw,
                               const Configuration& reference);

// Procrustes on plain point sets (same shape), used by the comparator model.
RigidTransform procrustes_transform(const arma::mat& draw,
                                    const arma::mat& reference);

struct AlignedPosterior {
  ModelState mean_state;
  arma::mat z_sd;  // posterior SD per aligned coordinate
  arma::mat w_sd;
  std::vector<ModelState> aligned_draws;  // empty unless retained
  Configuration reference;
  bool degenerate_reference = false;
};

struct SummarizeOptions {
  std::optional<std::size_t> reference_draw;  // default: last draw
  bool keep_draws = false;
  std::size_t workers = 1;
};

AlignedPosterior summarize(const ChainDraws& chain,
                           const SummarizeOptions& options = {});

// Same, for draws pooled from several chains.
AlignedPosterior summarize(const std::vector<ModelState>& draws,
                           const SummarizeOptions& options = {});

}  // namespace lsirm
