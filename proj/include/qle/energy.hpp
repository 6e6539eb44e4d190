#pragma once

#include <map>
#include <vector>

#include "qle/embedding.hpp"

namespace qle {

struct EnergyMomentum {
  double e = 0.0;
  Vec3 p = Vec3::Zero();
  Vec4 vec() const { return Vec4(e, p(0), p(1), p(2)); }
};

// unit future observer with spatial velocity a
inline Vec4 observer(const Vec3& a) {
  return Vec4(std::sqrt(1.0 + a.squaredNorm()), a(0), a(1), a(2));
}

inline Vec4 lorentz_apply(const Mat4& L, const Vec4& P) { return L * P; }

// Energy-momentum from the curvature and connection coefficients of the
// flat image of the family (the geometric route).
EnergyMomentum image_route_momentum(const SurfaceGeometry& geo,
                                    const Config& cfg);

// Total energy-momentum of the slice by two independent routes: moments of
// the mass aspect, and the curvature/connection coefficients of the surface
// family against its flat image. Throws ConsistencyError if they disagree
// beyond cfg.tol_route.
EnergyMomentum bondi_four_momentum(const SurfaceGeometry& geo,
                                   const Config& cfg);

// least-squares limit of samples over the basis {1, 1/r, 1/r^2, 1/r^3}
double fit_limit(const std::vector<double>& radii,
                 const std::vector<double>& values,
                 double* residual = nullptr);

// Energy of the surface at radius r seen by observer T0, with the supplied
// image family as reference: the curvature-difference term plus the
// connection-difference term against the time function induced by T0.
class EnergyEvaluator {
 public:
  EnergyEvaluator(const SurfaceGeometry& geo, const EmbeddingSeries& emb,
                  const Config& cfg);

  double at_radius(double r, const Vec4& T0) const;
  // ladder evaluation and extrapolation to infinite radius
  double limit(const Vec4& T0, double* fit_residual = nullptr) const;

  const ReferenceGeometry& reference() const { return ref_; }

 private:
  std::map<int, double> power_integrals(const Vec4& T0) const;

  GridPtr grid_;
  Config cfg_;
  ReferenceGeometry ref_;
  std::array<RadialSeries, 4> comp_; // image components, for the time function
  RadialSeries hdiff_;               // |H0| - |H|
  RadialSeries divdiff_;             // div V0 - div V
};

// Samples observers in a velocity ball and resolves the linear dependence of
// the limit on the observer; max_residual reports the worst fit defect.
EnergyMomentum fit_four_vector(const EnergyEvaluator& ev, int count,
                               unsigned seed, double* max_residual = nullptr);

// Relative change of the extrapolated limit when the reference image is
// perturbed by an admissible leading time coefficient.
double perturbation_invariance(const SurfaceGeometry& geo, const Config& cfg,
                               const SphereField& tau0, const Vec4& T0);

// Relative defect of: boosting the reference family backwards equals
// transforming the fitted energy-momentum forwards.
double equivariance_defect(const SurfaceGeometry& geo, const Config& cfg,
                           const Vec3& rapidity);

} // namespace qle
