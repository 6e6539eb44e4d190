#include "qle/bondi.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace qle {

namespace {

bool all_finite(const SphereField& f) { return f.isFinite().all(); }

} // namespace

BondiData BondiData::vacuum(GridPtr g) {
  BondiData d;
  d.grid = g;
  d.m = SphereField::Zero(g->size());
  d.X = SphereField::Zero(g->size());
  d.Y = SphereField::Zero(g->size());
  d.Wt = {SphereField::Zero(g->size()), SphereField::Zero(g->size())};
  return d;
}

void BondiData::validate() const {
  if (!grid) throw InputError("radiative data has no grid");
  const auto n = grid->size();
  for (const SphereField* f : {&m, &X, &Y, &Wt.t, &Wt.p}) {
    if (f->size() != n) throw InputError("field size does not match the grid");
    if (!all_finite(*f)) throw InputError("field contains non-finite values");
  }
}

FrameSeries FrameSeries::constant(GridPtr g, const FramePair& f) {
  const bool zero = f.t.abs().maxCoeff() == 0.0 && f.p.abs().maxCoeff() == 0.0;
  if (zero) return {RadialSeries(g), RadialSeries(g)}; // exactly vanishing
  return {RadialSeries::monomial(g, 0, f.t), RadialSeries::monomial(g, 0, f.p)};
}

SurfaceGeometry::SurfaceGeometry(const BondiData& data, const Config& cfg)
    : grid_(data.grid), data_(data), cfg_(cfg) {
  data_.validate();
  const int n = grid_->size();
  const int W = cfg_.series_depth;

  const SphereField Q = grid_->project(data_.X * data_.X + data_.Y * data_.Y);

  // covariant angular block, reduced components; orders below the displayed
  // ones are exactly zero in this data model
  met_.a11 = RadialSeries(grid_);
  met_.a11.set_coeff(2, SphereField::Ones(n));
  met_.a11.set_coeff(1, 2.0 * data_.X);
  met_.a11.set_coeff(0, 2.0 * Q);
  met_.a11 = met_.a11.marked_exact();
  met_.a12 = RadialSeries(grid_);
  met_.a12.set_coeff(1, -2.0 * data_.Y);
  met_.a12 = met_.a12.marked_exact();
  met_.a22 = RadialSeries(grid_);
  met_.a22.set_coeff(2, SphereField::Ones(n));
  met_.a22.set_coeff(1, -2.0 * data_.X);
  met_.a22.set_coeff(0, 2.0 * Q);
  met_.a22 = met_.a22.marked_exact();

  // determinant gauge: the r^3 and r^2 coefficients cancel identically
  // (the r^0 remnant 4(X^2+Y^2)^2 is the truncation artifact of the data
  // model and stays far below the working radii)
  // the determinant is a genuine scalar; its factors are dyad components,
  // so only the assembled result may be re-expanded
  RadialSeries det = (met_.a11.mul(met_.a22, false) -
                      met_.a12.mul(met_.a12, false))
                         .projected();
  const double dscale = 1.0 + Q.abs().maxCoeff();
  if (det.coeff(3).abs().maxCoeff() > 1e-12 * dscale ||
      det.coeff(2).abs().maxCoeff() > 1e-12 * dscale ||
      (det.coeff(4) - 1.0).abs().maxCoeff() > 1e-12)
    throw ConsistencyError("angular metric block violates the determinant gauge");

  // contravariant block: adjugate over the determinant; the entries are dyad
  // components and stay unprojected
  const RadialSeries detinv = det.recip(W);
  inv_.a11 = met_.a22.mul(detinv, false);
  inv_.a12 = -met_.a12.mul(detinv, false);
  inv_.a22 = met_.a11.mul(detinv, false);

  area_ = RadialSeries::monomial(
      grid_, 2, SphereField::Constant(n, 4.0 * std::numbers::pi));

  // divergence of the angular shift one-form
  const FrameSeries Wser = FrameSeries::constant(grid_, data_.Wt);
  const FrameSeries Wcon = inv_.apply(Wser);
  divw_ = frame_divergence(Wcon);

  // |H|^2 = (4 / (U r)) (V / r + delta^a W_a)
  RadialSeries U(grid_), V(grid_);
  U.set_coeff(0, SphereField::Ones(n));
  U.set_coeff(-2, -0.5 * Q);
  V.set_coeff(0, SphereField::Ones(n));
  V.set_coeff(-1, -2.0 * data_.m);
  const RadialSeries Uinv = U.recip(W);
  x_ = V.shifted(-1) + divw_;
  h2_ = x_.mul(Uinv).shifted(-1) * 4.0;
  if (h2_.coeff(-2).minCoeff() <= 0.0)
    throw ConsistencyError("mean curvature norm loses its leading sign");
  h_ = h2_.sqrt(W);

  // connection one-form in mean curvature gauge:
  //   <D_b J, H> = (2/(rU)) d_b x - (2/(rU^2)) x sigma_bc d_r W^c,
  //   V_b = <D_b J, H> / |H|^2
  const FrameSeries dx = gradient_series(x_);
  const FrameSeries WconDr = Wcon.derivative_r();
  const FrameSeries lowDr = met_.apply(WconDr);
  const RadialSeries Uinv2 = Uinv.mul(Uinv);
  const FrameSeries beta = dx.scaled(Uinv.shifted(-1) * 2.0) +
                           lowDr.scaled(x_.mul(Uinv2).shifted(-1) * -2.0);
  const FrameSeries Vone = beta.scaled(h2_.recip(W));
  divv_ = divergence_series(Vone);
}

FrameSeries SurfaceGeometry::gradient_series(const RadialSeries& f) const {
  FrameSeries out{RadialSeries(grid_), RadialSeries(grid_)};
  for (const auto& [k, c] : f.terms()) {
    FramePair g = grid_->gradient(c);
    out.t.set_coeff(k, std::move(g.t));
    out.p.set_coeff(k, std::move(g.p));
  }
  out.t.set_min_power(f.min_power());
  out.p.set_min_power(f.min_power());
  return out;
}

RadialSeries SurfaceGeometry::frame_divergence(const FrameSeries& con) const {
  RadialSeries out(grid_);
  std::set<int> keys;
  for (const auto& [k, c] : con.t.terms()) keys.insert(k);
  for (const auto& [k, c] : con.p.terms()) keys.insert(k);
  for (int k : keys)
    out.set_coeff(k, grid_->synthesize(grid_->divergence(con.at_power(k))));
  std::optional<int> m = con.t.min_power();
  if (con.p.min_power() && (!m || *con.p.min_power() > *m))
    m = con.p.min_power();
  out.set_min_power(m);
  return out;
}

RadialSeries SurfaceGeometry::divergence_series(const FrameSeries& cov) const {
  return frame_divergence(inv_.apply(cov));
}

RadialSeries SurfaceGeometry::laplacian_series(const RadialSeries& f) const {
  return divergence_series(gradient_series(f));
}

RadialSeries SurfaceGeometry::dot_series(const FrameSeries& a,
                                         const FrameSeries& b) const {
  const FrameSeries bu = inv_.apply(b);
  return (a.t.mul(bu.t, false) + a.p.mul(bu.p, false)).projected();
}

std::array<SphereField, 3> SurfaceGeometry::inverse_at(double r) const {
  return {inv_.a11.eval(r), inv_.a12.eval(r), inv_.a22.eval(r)};
}

FramePair SurfaceGeometry::raise_at(double r, const FramePair& cov) const {
  auto [u11, u12, u22] = inverse_at(r);
  return {u11 * cov.t + u12 * cov.p, u12 * cov.t + u22 * cov.p};
}

SphereField SurfaceGeometry::divergence_at(double r,
                                           const FramePair& cov) const {
  return grid_->synthesize(grid_->divergence(raise_at(r, cov)));
}

SphereField SurfaceGeometry::laplacian_at(double r,
                                          const SphereField& f) const {
  return divergence_at(r, grid_->gradient(f));
}

SphereField SurfaceGeometry::dot_at(double r, const FramePair& a,
                                    const FramePair& b) const {
  const FramePair bu = raise_at(r, b);
  return grid_->project(a.t * bu.t + a.p * bu.p);
}

} // namespace qle
