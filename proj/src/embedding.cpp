#include "qle/embedding.hpp"

#include <algorithm>
#include <cmath>

namespace qle {

namespace {

// induced-metric series of the current truncation, reduced components,
// signature (-,+,+,+); frame products are kept raw
struct InducedBlock {
  RadialSeries s11, s12, s22;
};

InducedBlock induced_metric(const SurfaceGeometry& geo,
                            const std::array<RadialSeries, 4>& comp) {
  std::array<FrameSeries, 4> d;
  for (int a = 0; a < 4; ++a) d[a] = geo.gradient_series(comp[a]);
  auto prod = [](const RadialSeries& x, const RadialSeries& y) {
    return x.mul(y, false);
  };
  InducedBlock S{-prod(d[0].t, d[0].t), -prod(d[0].t, d[0].p),
                 -prod(d[0].p, d[0].p)};
  for (int i = 1; i < 4; ++i) {
    S.s11 = S.s11 + prod(d[i].t, d[i].t);
    S.s12 = S.s12 + prod(d[i].t, d[i].p);
    S.s22 = S.s22 + prod(d[i].p, d[i].p);
  }
  return S;
}

double sup(const SphereField& f) { return f.abs().maxCoeff(); }

// 3x3 determinant of series columns; frame products stay raw
RadialSeries det3(const std::array<RadialSeries, 3>& a,
                  const std::array<RadialSeries, 3>& b,
                  const std::array<RadialSeries, 3>& c) {
  auto m = [](const RadialSeries& x, const RadialSeries& y) {
    return x.mul(y, false);
  };
  return m(a[0], m(b[1], c[2]) - m(b[2], c[1])) -
         m(b[0], m(a[1], c[2]) - m(a[2], c[1])) +
         m(c[0], m(a[1], b[2]) - m(a[2], b[1]));
}

} // namespace

std::array<SphereField, 3> embedding_step(const GridPtr& g,
                                          const SphereField& rhs11,
                                          const SphereField& rhs12,
                                          const SphereField& rhs22) {
  const auto& pos = g->position();
  const auto& dth = g->position_dth();
  const auto& dph = g->position_dph();

  // traceless part through tensor potentials (rigid-motion kernel drops),
  // trace part fixes the radial factor
  auto [u, v] =
      g->tensor_potentials(FramePair{0.25 * (rhs11 - rhs22), 0.5 * rhs12});
  const FramePair fh = g->gradient(u) + frame_rotate(g->gradient(v));
  const SphereField phi =
      0.25 * (rhs11 + rhs22) - 0.5 * g->synthesize(g->laplacian(u));

  std::array<SphereField, 3> nc;
  for (int i = 0; i < 3; ++i)
    nc[i] = g->project(fh.t * dth[i] + fh.p * dph[i] + phi * pos[i]);

  // range check: a large defect means the forcing is not the cross term of
  // any graph correction at this band limit
  const double scale = 1.0 + std::max({sup(rhs11), sup(rhs12), sup(rhs22)});
  SphereField c11 = -rhs11, c12 = -rhs12, c22 = -rhs22;
  for (int i = 0; i < 3; ++i) {
    const FramePair gr = g->gradient(nc[i]);
    c11 += 2.0 * dth[i] * gr.t;
    c12 += dth[i] * gr.p + dph[i] * gr.t;
    c22 += 2.0 * dph[i] * gr.p;
  }
  const double defect = std::max({sup(c11), sup(c12), sup(c22)});
  if (defect > 1e-4 * scale)
    throw ConsistencyError(
        "embedding correction cannot match the metric at this order "
        "(defect " +
        std::to_string(defect) + ", forcing scale " + std::to_string(scale) +
        ")");
  return nc;
}

EmbeddingSeries EmbeddingSeries::reference(
    const SurfaceGeometry& geo, const std::vector<SphereField>& tau_hats,
    int spatial_orders) {
  GridPtr g = geo.grid();
  EmbeddingSeries emb(g);
  const auto& pos = g->position();

  emb.comp_[0] = RadialSeries(g);
  for (std::size_t k = 0; k < tau_hats.size(); ++k) {
    if (tau_hats[k].size() == 0 || sup(tau_hats[k]) == 0.0) continue;
    emb.comp_[0].set_coeff(-static_cast<int>(k), g->project(tau_hats[k]));
  }
  for (int i = 0; i < 3; ++i)
    emb.comp_[1 + i] = RadialSeries::monomial(g, 1, pos[i]);
  emb.orders_ = spatial_orders;

  for (int l = 1; l <= spatial_orders; ++l) {
    // at order 2-l the induced block misses only the cross term of the
    // leading cone with the unknown correction, so the defect is the forcing
    const InducedBlock S = induced_metric(geo, emb.comp_);
    const int kc = 2 - l;
    const std::array<SphereField, 3> nc =
        embedding_step(g, (geo.metric().a11 - S.s11).coeff(kc),
                       (geo.metric().a12 - S.s12).coeff(kc),
                       (geo.metric().a22 - S.s22).coeff(kc));
    for (int i = 0; i < 3; ++i) emb.comp_[1 + i].set_coeff(1 - l, nc[i]);
  }

  // orders below the last solved one are unknown, not zero
  for (int i = 0; i < 3; ++i)
    emb.comp_[1 + i].set_min_power(1 - spatial_orders);
  return emb;
}

EmbeddingSeries EmbeddingSeries::transformed(const Mat4& L) const {
  if (lorentz_defect(L) > 1e-10)
    throw InputError("transform does not preserve the Minkowski metric");
  EmbeddingSeries out(grid_);
  out.orders_ = orders_;
  for (int a = 0; a < 4; ++a) {
    RadialSeries acc(grid_);
    for (int b = 0; b < 4; ++b)
      if (L(a, b) != 0.0) acc = acc + comp_[b] * L(a, b);
    out.comp_[a] = std::move(acc); // windows propagate through the sums
  }
  return out;
}

EmbeddingSeries EmbeddingSeries::transformed(
    const std::map<int, Mat4>& chain) const {
  EmbeddingSeries out(grid_);
  out.orders_ = orders_;
  for (int a = 0; a < 4; ++a) {
    RadialSeries acc(grid_);
    for (const auto& [k, L] : chain)
      for (int b = 0; b < 4; ++b)
        if (L(a, b) != 0.0) acc = acc + comp_[b].shifted(-k) * L(a, b);
    out.comp_[a] = std::move(acc);
  }
  return out;
}

std::vector<double> EmbeddingSeries::metric_residuals(
    const SurfaceGeometry& geo) const {
  const InducedBlock S = induced_metric(geo, comp_);
  std::vector<double> out;
  for (int l = 1; l <= orders_; ++l) {
    const int kc = 2 - l;
    const double scale = 1.0 + std::max({sup(geo.metric().a11.coeff(kc)),
                                         sup(geo.metric().a12.coeff(kc)),
                                         sup(geo.metric().a22.coeff(kc))});
    const double defect =
        std::max({sup((geo.metric().a11 - S.s11).coeff(kc)),
                  sup((geo.metric().a12 - S.s12).coeff(kc)),
                  sup((geo.metric().a22 - S.s22).coeff(kc))});
    out.push_back(defect / scale);
  }
  return out;
}

ReferenceGeometry::ReferenceGeometry(const EmbeddingSeries& emb,
                                     const SurfaceGeometry& geo,
                                     const Config& cfg)
    : grid_(emb.grid()) {
  const int W = cfg.series_depth;
  const int n = grid_->size();

  for (int a = 0; a < 4; ++a)
    G_[a] = geo.laplacian_series(emb.component(a));

  h0sq_ = -G_[0].mul(G_[0]);
  for (int i = 1; i < 4; ++i) h0sq_ = h0sq_ + G_[i].mul(G_[i]);
  if (sup(h0sq_.coeff(-2) - 4.0) > 1e-6)
    throw ConsistencyError("image mean curvature does not approach the cone rate");
  h0_ = h0sq_.sqrt(W);

  // future unit normal orthogonal to the surface and to the curvature
  // vector, scaled so its time component is one: the spatial part solves the
  // 3x3 frame system with the time rows as data
  std::array<FrameSeries, 4> d;
  for (int a = 0; a < 4; ++a) d[a] = geo.gradient_series(emb.component(a));
  std::array<std::array<RadialSeries, 3>, 3> col;
  for (int j = 0; j < 3; ++j)
    col[j] = {d[1 + j].t, d[1 + j].p, G_[1 + j]};
  const std::array<RadialSeries, 3> rhs = {d[0].t, d[0].p, G_[0]};

  const RadialSeries det = det3(col[0], col[1], col[2]);
  if (!det.top() || *det.top() != 1 ||
      det.coeff(1).abs().minCoeff() < 1e-8)
    throw ConsistencyError("tangent-curvature frame of the image degenerates");
  const RadialSeries detinv = det.recip(W, false);

  I_[0] = det3(rhs, col[1], col[2]).mul(detinv, false).projected();
  I_[1] = det3(col[0], rhs, col[2]).mul(detinv, false).projected();
  I_[2] = det3(col[0], col[1], rhs).mul(detinv, false).projected();

  RadialSeries nn =
      RadialSeries::monomial(grid_, 0, SphereField::Ones(n));
  for (int i = 0; i < 3; ++i) nn = nn - I_[i].mul(I_[i]);
  if (nn.coeff(0).minCoeff() <= 0.0)
    throw NotTimelikeError("image normal fails to stay timelike");
  nn_inv_sqrt_ = nn.sqrt(W).recip(W);

  // connection one-form of the image in curvature gauge and its divergence
  const RadialSeries w = nn_inv_sqrt_.mul(h0_.recip(W));
  FrameSeries v0{RadialSeries(grid_), RadialSeries(grid_)};
  for (int i = 0; i < 3; ++i) {
    const FrameSeries dI = geo.gradient_series(I_[i]);
    v0.t = v0.t + dI.t.mul(G_[1 + i], false);
    v0.p = v0.p + dI.p.mul(G_[1 + i], false);
  }
  divv0_ = geo.divergence_series(v0.scaled(w));
}

RadialSeries ReferenceGeometry::observer_factor(const Vec4& T0) const {
  RadialSeries s = RadialSeries::monomial(
      grid_, 0, SphereField::Constant(grid_->size(), T0(0)));
  for (int i = 0; i < 3; ++i) s = s - I_[i] * T0(1 + i);
  return s.mul(nn_inv_sqrt_);
}

} // namespace qle
