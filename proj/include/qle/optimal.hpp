#pragma once

#include <vector>

#include "qle/energy.hpp"

namespace qle {

// Radius-dependent isometry chain B(r) = e^{r^-K b_K} ... e^{r^-1 b_1} e^{b_0}
// with pure boost generators; the r^-k factor carries the degree-1 freedom of
// the correction at that order.
struct BoostChain {
  std::vector<Mat4> gens; // gens[k] generates the r^{-k} factor

  Mat4 leading() const;                        // e^{gens[0]}
  std::map<int, Mat4> expand(int depth) const; // series of the product
};

// Solution of the optimal-observer equation on the surface family: the
// boosted image X = B(r) X-hat with time coefficients solved order by order.
struct OptimalSolution {
  EnergyMomentum momentum;
  Vec3 velocity; // leading observer velocity p / sqrt(e^2 - |p|^2)
  BoostChain chain;
  std::vector<SphereField> tau_hats; // solved time coefficients, top down
  EmbeddingSeries reference;         // unboosted image
  EmbeddingSeries family;            // chain-applied image
  RadialSeries f;                    // interface density of the equation
  RadialSeries h0, divv0;            // image invariants
  std::vector<double> residual_sup;  // solved-order residual magnitudes
};

class OptimalSolver {
 public:
  OptimalSolver(const SurfaceGeometry& geo, const Config& cfg);

  // leading observer plus cfg.depth correction orders
  OptimalSolution solve() const;

  // rebuild a solution from its solved data without re-running the solves;
  // residual magnitudes are recomputed from the assembled family
  OptimalSolution assemble(BoostChain chain,
                           std::vector<SphereField> tau_hats) const;

  // full residual series of a candidate family (all operators of the
  // physical metric): density term, tilt term, connection difference
  RadialSeries residual_series(const RadialSeries& tau, const RadialSeries& f,
                               const RadialSeries& h0,
                               const RadialSeries& divv0) const;

  // the same residual evaluated at a finite radius with grid operators
  SphereField residual_at_radius(const OptimalSolution& sol, double r) const;

  // decay rate of the finite-radius residual along the ladder
  double decay_exponent(const OptimalSolution& sol) const;

  // interface density from the two curvature norms and the time function
  RadialSeries interface_factor(const RadialSeries& h0sq,
                                const RadialSeries& tau) const;

  const SurfaceGeometry& geometry() const { return geo_; }

 private:
  SurfaceGeometry geo_;
  Config cfg_;
};

// Second variation of the energy at a solution, time direction: quadratic
// form of the stability operator weighted by the leading chain factor.
double second_variation_time(const OptimalSolution& sol,
                             const SphereField& dtau);

// Second variation in a boost direction db (degree-1 family motions).
double second_variation_boost(const OptimalSolution& sol, const Vec3& db);

} // namespace qle
