#pragma once

#include <array>
#include <map>
#include <vector>

#include "qle/bondi.hpp"
#include "qle/lorentz.hpp"

namespace qle {

// One order of the graph equation over the round sphere: find the correction
// corr = f^a d_a X~ + phi X~ whose symmetrized cross term with the cone
// matches the forcing, 2 sym(dX~ . dcorr) = rhs (reduced components).
// The rigid-motion kernel is fixed to its zero representative. Throws
// ConsistencyError when the forcing is not such a cross term.
std::array<SphereField, 3> embedding_step(const GridPtr& g,
                                          const SphereField& rhs11,
                                          const SphereField& rhs12,
                                          const SphereField& rhs22);

// Perturbative isometric embedding of the surface family into Minkowski
// space as a graph over the round sphere. comp[0] is the time component
// (prescribed order by order), comp[1..3] are solved so the induced metric
// matches the angular metric series through the requested order.
class EmbeddingSeries {
 public:
  // tau_hats[k] is the order r^{-k} time coefficient; missing entries are
  // zero. spatial_orders is the number of solved spatial corrections below
  // the leading r * (sphere position).
  static EmbeddingSeries reference(const SurfaceGeometry& geo,
                                   const std::vector<SphereField>& tau_hats,
                                   int spatial_orders);

  const RadialSeries& component(int alpha) const { return comp_[alpha]; }
  GridPtr grid() const { return grid_; }
  int spatial_orders() const { return orders_; }

  // constant Lorentz transform of the image
  EmbeddingSeries transformed(const Mat4& L) const;
  // radius-dependent transform sum_k r^{-k} chain[k]
  EmbeddingSeries transformed(const std::map<int, Mat4>& chain) const;

  // sup-norm of the induced-metric defect at each solved order, relative to
  // the matching metric coefficient
  std::vector<double> metric_residuals(const SurfaceGeometry& geo) const;

 private:
  explicit EmbeddingSeries(GridPtr g) : grid_(std::move(g)) {}
  GridPtr grid_;
  std::array<RadialSeries, 4> comp_;
  int orders_ = 0;
};

// Geometry of the image surface: reference mean curvature norm, the future
// timelike unit normal orthogonal to the mean curvature vector, and the
// divergence of the reference connection one-form in mean curvature gauge.
class ReferenceGeometry {
 public:
  ReferenceGeometry(const EmbeddingSeries& emb, const SurfaceGeometry& geo,
                    const Config& cfg);

  const RadialSeries& h_norm() const { return h0_; }
  const RadialSeries& h_norm_sq() const { return h0sq_; }
  const RadialSeries& div_v0() const { return divv0_; }
  // -<T0, J0/|H0|> as a series field
  RadialSeries observer_factor(const Vec4& T0) const;
  // Laplacian of component alpha with respect to the surface metric
  const RadialSeries& curvature_component(int alpha) const { return G_[alpha]; }

 private:
  GridPtr grid_;
  std::array<RadialSeries, 4> G_;    // Delta_sigma of each component
  std::array<RadialSeries, 3> I_;    // spatial part of the normal, I^0 == 1
  RadialSeries nn_inv_sqrt_;         // (-<I,I>)^{-1/2}
  RadialSeries h0sq_, h0_, divv0_;
};

} // namespace qle
