#include "lsirm/identify.hpp"

#include <cmath>

#include "lsirm/parallel.hpp"

namespace lsirm {

namespace {

arma::mat stacked(const Configuration& c) { return arma::join_cols(c.z, c.w); }

void check_config(const Configuration& c) {
  require(c.z.n_cols == c.w.n_cols, "configuration: z and w dimensions differ");
  require(c.z.n_rows + c.w.n_rows > 0, "configuration has no points");
}

}  // namespace

RigidTransform RigidTransform::identity(std::size_t k) {
  return {arma::eye(k, k), arma::rowvec(k, arma::fill::zeros)};
}

arma::mat RigidTransform::apply(const arma::mat& x) const {
  arma::mat out = x * rotation;
  out.each_row() += translation;
  return out;
}

Configuration RigidTransform::apply(const Configuration& c) const {
  return {apply(c.z), apply(c.w)};
}

arma::rowvec joint_centroid(const Configuration& c) {
  check_config(c);
  return arma::mean(stacked(c), 0);
}

Configuration center(const Configuration& c) {
  const arma::rowvec m = joint_centroid(c);
  Configuration out = c;
  out.z.each_row() -= m;
  out.w.each_row() -= m;
  return out;
}

AxesAlignment principal_axes(const Configuration& centered) {
  check_config(centered);
  const std::size_t k = centered.dims();
  const arma::mat x = stacked(centered);
  const arma::mat cov = (x.t() * x) / static_cast<double>(x.n_rows);

  arma::vec eigval;
  arma::mat eigvec;
  arma::eig_sym(eigval, eigvec, cov);
  // eig_sym is ascending; reverse to decreasing variance.
  eigval = arma::flipud(eigval);
  eigvec = arma::fliplr(eigvec);

  AxesAlignment out;
  const double tol = 1e-12 * std::max(1.0, eigval.n_elem ? eigval[0] : 0.0);
  for (double e : eigval) out.rank += e > tol;
  out.degenerate = out.rank < k;

  arma::mat rotated_z = centered.z * eigvec;
  for (std::size_t c = 0; c < k; ++c) {
    double third = 0.0;
    if (rotated_z.n_rows > 0) {
      const double m = arma::mean(rotated_z.col(c));
      for (double v : rotated_z.col(c)) third += (v - m) * (v - m) * (v - m);
    }
    if (third < 0.0) {
      eigvec.col(c) *= -1.0;
      rotated_z.col(c) *= -1.0;
    }
  }
  out.transform = {eigvec, arma::rowvec(k, arma::fill::zeros)};
  out.config = {rotated_z, centered.w * eigvec};
  out.variances = arma::clamp(eigval, 0.0, arma::datum::inf);
  return out;
}

Configuration principal_axes_rotate(const Configuration& centered) {
  return principal_axes(centered).config;
}

RigidTransform procrustes_transform(const arma::mat& draw,
                                    const arma::mat& reference) {
  require(draw.n_rows == reference.n_rows && draw.n_cols == reference.n_cols,
          "procrustes: draw and reference shapes differ");
  require(draw.n_rows > 0, "procrustes: no points");
  const arma::rowvec mx = arma::mean(draw, 0);
  const arma::rowvec my = arma::mean(reference, 0);
  arma::mat xc = draw;
  xc.each_row() -= mx;
  arma::mat yc = reference;
  yc.each_row() -= my;
  arma::mat u, v;
  arma::vec s;
  arma::svd(u, s, v, xc.t() * yc);
  const arma::mat q = u * v.t();
  return {q, my - mx * q};
}

ProcrustesFit procrustes_align(const Configuration& draw,
                               const Configuration& reference) {
  check_config(draw);
  require(draw.z.n_rows == reference.z.n_rows &&
              draw.w.n_rows == reference.w.n_rows &&
              draw.dims() == reference.dims(),
          "procrustes_align: dimension mismatch");
  ProcrustesFit fit;
  fit.transform = procrustes_transform(stacked(draw), stacked(reference));
  fit.aligned = fit.transform.apply(draw);
  fit.mismatch = arma::norm(stacked(fit.aligned) - stacked(reference), "fro");
  return fit;
}

AlignedPosterior summarize(const std::vector<ModelState>& draws,
                           const SummarizeOptions& options) {
  require(draws.size() >= 2, "summarize: need at least 2 draws");
  const std::size_t ref_index = options.reference_draw.value_or(draws.size() - 1);
  require(ref_index < draws.size(), "summarize: reference draw out of range");

  const ModelState& ref_state = draws[ref_index];
  const AxesAlignment axes = principal_axes(center({ref_state.z, ref_state.w}));

  AlignedPosterior out;
  out.reference = axes.config;
  out.degenerate_reference = axes.degenerate;

  const std::size_t m = draws.size();
  std::vector<Configuration> aligned(m);
  parallel_for(m, options.workers, [&](std::size_t t) {
    aligned[t] = procrustes_align({draws[t].z, draws[t].w}, out.reference).aligned;
  });

  ModelState mean = ModelState::zeros(ref_state.n_legislators(),
                                      ref_state.n_bills(), ref_state.dims());
  mean.gamma = 0.0;
  mean.sigma_theta_sq = 0.0;
  arma::mat z_sq(arma::size(mean.z), arma::fill::zeros);
  arma::mat w_sq(arma::size(mean.w), arma::fill::zeros);
  for (std::size_t t = 0; t < m; ++t) {
    mean.theta += draws[t].theta;
    mean.beta += draws[t].beta;
    mean.gamma += draws[t].gamma;
    mean.sigma_theta_sq += draws[t].sigma_theta_sq;
    mean.z += aligned[t].z;
    mean.w += aligned[t].w;
    z_sq += arma::square(aligned[t].z);
    w_sq += arma::square(aligned[t].w);
  }
  const double md = static_cast<double>(m);
  mean.theta /= md;
  mean.beta /= md;
  mean.gamma /= md;
  mean.sigma_theta_sq /= md;
  mean.z /= md;
  mean.w /= md;
  out.z_sd = arma::sqrt(arma::clamp((z_sq - md * arma::square(mean.z)) / (md - 1.0),
                                    0.0, arma::datum::inf));
  out.w_sd = arma::sqrt(arma::clamp((w_sq - md * arma::square(mean.w)) / (md - 1.0),
                                    0.0, arma::datum::inf));
  out.mean_state = std::move(mean);

  if (options.keep_draws) {
    out.aligned_draws.reserve(m);
    for (std::size_t t = 0; t < m; ++t) {
      ModelState s = draws[t];
      s.z = aligned[t].z;
      s.w = aligned[t].w;
      out.aligned_draws.push_back(std::move(s));
    }
  }
  return out;
}

AlignedPosterior summarize(const ChainDraws& chain,
                           const SummarizeOptions& options) {
  return summarize(chain.draws, options);
}

}  // namespace lsirm
