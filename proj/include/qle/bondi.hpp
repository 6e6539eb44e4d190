#pragma once

#include "qle/config.hpp"
#include "qle/radial_series.hpp"
#include "qle/sphere.hpp"

namespace qle {

// Radiative data on a retarded-time slice: mass aspect m, the two shear
// functions (X, Y) entering the angular metric block, and the O(1) covariant
// part W~ of the angular shift one-form, stored in frame components
// (W_th, W_ph / sin th).  Tails beyond these orders are taken to vanish.
struct BondiData {
  GridPtr grid;
  SphereField m, X, Y;
  FramePair Wt;
  double retarded_time = 0.0;

  static BondiData vacuum(GridPtr g);
  void validate() const; // throws InputError
};

// Pair of frame-component radial series: a tangent one-form or vector field
// expanded in the radial coordinate.
struct FrameSeries {
  RadialSeries t, p;

  FrameSeries() = default;
  FrameSeries(RadialSeries a, RadialSeries b)
      : t(std::move(a)), p(std::move(b)) {}
  static FrameSeries constant(GridPtr g, const FramePair& f);

  FrameSeries operator+(const FrameSeries& o) const {
    return {t + o.t, p + o.p};
  }
  FrameSeries operator-(const FrameSeries& o) const {
    return {t - o.t, p - o.p};
  }
  // componentwise product with a scalar series; frame components are not
  // band-limited scalars, so no re-projection happens here
  FrameSeries scaled(const RadialSeries& s) const {
    return {t.mul(s, false), p.mul(s, false)};
  }
  FrameSeries shifted(int k) const { return {t.shifted(k), p.shifted(k)}; }
  FrameSeries derivative_r() const {
    return {t.derivative_r(), p.derivative_r()};
  }
  FramePair at_power(int k) const { return {t.coeff(k), p.coeff(k)}; }
};

// Symmetric 2x2 series matrix in the orthonormal dyad (reduced components:
// the sin-theta factors of the coordinate basis are absorbed).
struct MetricBlock {
  RadialSeries a11, a12, a22;

  FrameSeries apply(const FrameSeries& f) const {
    return {a11.mul(f.t, false) + a12.mul(f.p, false),
            a12.mul(f.t, false) + a22.mul(f.p, false)};
  }
};

// Geometry of the constant-radius surfaces: induced metric series, mean
// curvature norm, connection-form divergence, and the differential operators
// of the induced metric, both as series and pointwise at finite radius.
class SurfaceGeometry {
 public:
  SurfaceGeometry(const BondiData& data, const Config& cfg);

  const GridPtr& grid() const { return grid_; }
  const BondiData& data() const { return data_; }

  const MetricBlock& metric() const { return met_; }          // covariant
  const MetricBlock& inverse_metric() const { return inv_; }  // contravariant

  const RadialSeries& h_norm() const { return h_; }       // |H|, leading 2/r
  const RadialSeries& h_norm_sq() const { return h2_; }   // |H|^2
  const RadialSeries& div_v() const { return divv_; }     // leading power -3
  const RadialSeries& div_w() const { return divw_; }     // delta^a W_a
  const RadialSeries& area() const { return area_; }      // 4 pi r^2

  // operators of the induced metric on scalar series; one-forms are covariant
  FrameSeries gradient_series(const RadialSeries& f) const;
  FrameSeries raise(const FrameSeries& cov) const { return inv_.apply(cov); }
  FrameSeries lower(const FrameSeries& con) const { return met_.apply(con); }
  RadialSeries divergence_series(const FrameSeries& cov) const;
  RadialSeries laplacian_series(const RadialSeries& f) const;
  RadialSeries dot_series(const FrameSeries& cov_a,
                          const FrameSeries& cov_b) const;

  // pointwise counterparts at a fixed radius
  std::array<SphereField, 3> inverse_at(double r) const; // (u11, u12, u22)
  FramePair raise_at(double r, const FramePair& cov) const;
  SphereField divergence_at(double r, const FramePair& cov) const;
  SphereField laplacian_at(double r, const SphereField& f) const;
  SphereField dot_at(double r, const FramePair& cov_a,
                     const FramePair& cov_b) const;

  // divergence of a contravariant frame series (the radial measure cancels
  // in the determinant gauge, leaving the unit-sphere weak form per order)
  RadialSeries frame_divergence(const FrameSeries& con) const;

 private:
  GridPtr grid_;
  BondiData data_;
  Config cfg_;
  MetricBlock met_, inv_;
  RadialSeries divw_, x_, h2_, h_, divv_, area_;
};

} // namespace qle
