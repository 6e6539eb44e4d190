#include "qle/energy.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace qle {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

void validate_observer(const Vec4& T0) {
  if (std::abs(minkowski_dot(T0, T0) + 1.0) > 1e-10 || T0(0) <= 0.0)
    throw InputError("observer is not a unit future timelike vector");
}

} // namespace

EnergyMomentum image_route_momentum(const SurfaceGeometry& geo,
                                    const Config& cfg) {
  const GridPtr& g = geo.grid();
  const EmbeddingSeries emb = EmbeddingSeries::reference(geo, {}, 2);
  const ReferenceGeometry ref(emb, geo, cfg);
  EnergyMomentum Q;
  Q.e = g->integrate(ref.h_norm().coeff(-2) - geo.h_norm().coeff(-2)) /
        (2.0 * kFourPi);
  const SphereField vdiff = ref.div_v0().coeff(-3) - geo.div_v().coeff(-3);
  for (int i = 0; i < 3; ++i)
    Q.p(i) = -g->integrate(vdiff * g->position()[i]) / (2.0 * kFourPi);
  return Q;
}

EnergyMomentum bondi_four_momentum(const SurfaceGeometry& geo,
                                   const Config& cfg) {
  const GridPtr& g = geo.grid();
  const SphereField& m = geo.data().m;

  EnergyMomentum P;
  P.e = g->integrate(2.0 * m) / (2.0 * kFourPi);
  for (int i = 0; i < 3; ++i)
    P.p(i) = g->integrate(2.0 * m * g->position()[i]) / (2.0 * kFourPi);

  // cross-check against the curvature and connection coefficients of the
  // flat image of the family
  const EnergyMomentum Q = image_route_momentum(geo, cfg);
  const double scale = 1.0 + std::abs(P.e) + P.p.cwiseAbs().maxCoeff();
  if (std::abs(Q.e - P.e) > cfg.tol_route * scale ||
      (Q.p - P.p).cwiseAbs().maxCoeff() > cfg.tol_route * scale)
    throw ConsistencyError("energy-momentum routes disagree");
  return P;
}

double fit_limit(const std::vector<double>& radii,
                 const std::vector<double>& values, double* residual) {
  const int n = static_cast<int>(radii.size());
  if (n < 4 || values.size() != radii.size())
    throw InputError("limit fit needs at least four ladder samples");
  Eigen::MatrixXd A(n, 4);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 4; ++j) A(i, j) = std::pow(radii[i], -j);
    b(i) = values[i];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  if (residual) *residual = (A * c - b).cwiseAbs().maxCoeff();
  return c(0);
}

EnergyEvaluator::EnergyEvaluator(const SurfaceGeometry& geo,
                                 const EmbeddingSeries& emb, const Config& cfg)
    : grid_(geo.grid()),
      cfg_(cfg),
      ref_(emb, geo, cfg),
      comp_{emb.component(0), emb.component(1), emb.component(2),
            emb.component(3)},
      hdiff_(ref_.h_norm() - geo.h_norm()),
      divdiff_(ref_.div_v0() - geo.div_v()) {}

std::map<int, double> EnergyEvaluator::power_integrals(const Vec4& T0) const {
  validate_observer(T0);
  // time function of the observer on the image family
  RadialSeries tau = comp_[0] * T0(0);
  for (int i = 0; i < 3; ++i) tau = tau - comp_[1 + i] * T0(1 + i);

  const RadialSeries total =
      ref_.observer_factor(T0).mul(hdiff_) + tau.mul(divdiff_);
  std::map<int, double> out;
  for (const auto& [k, f] : total.terms())
    out[k + 2] = grid_->integrate(f) / (2.0 * kFourPi); // measure r^2 dS
  return out;
}

double EnergyEvaluator::at_radius(double r, const Vec4& T0) const {
  double e = 0.0;
  for (const auto& [k, v] : power_integrals(T0)) e += v * std::pow(r, k);
  return e;
}

double EnergyEvaluator::limit(const Vec4& T0, double* fit_residual) const {
  const auto powers = power_integrals(T0);
  std::vector<double> radii, values;
  double r = cfg_.ladder_r0;
  for (int i = 0; i < cfg_.ladder_count; ++i, r *= cfg_.ladder_factor) {
    double e = 0.0;
    for (const auto& [k, v] : powers) e += v * std::pow(r, k);
    radii.push_back(r);
    values.push_back(e);
  }
  return fit_limit(radii, values, fit_residual);
}

EnergyMomentum fit_four_vector(const EnergyEvaluator& ev, int count,
                               unsigned seed, double* max_residual) {
  if (count < 4) throw InputError("observer fit needs at least four samples");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-0.8, 0.8);
  Eigen::MatrixXd A(count, 4);
  Eigen::VectorXd b(count);
  for (int k = 0; k < count; ++k) {
    const Vec3 a(dist(rng), dist(rng), dist(rng));
    const Vec4 T0 = observer(a);
    for (int j = 0; j < 4; ++j) A(k, j) = T0(j);
    b(k) = ev.limit(T0);
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  if (max_residual)
    *max_residual =
        (A * c - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff());
  EnergyMomentum P;
  P.e = c(0);
  P.p = c.tail<3>();
  return P;
}

double perturbation_invariance(const SurfaceGeometry& geo, const Config& cfg,
                               const SphereField& tau0, const Vec4& T0) {
  const int orders = cfg.depth + 2;
  const EnergyEvaluator base(
      geo, EmbeddingSeries::reference(geo, {}, orders), cfg);
  const EnergyEvaluator moved(
      geo, EmbeddingSeries::reference(geo, {tau0}, orders), cfg);
  const double e0 = base.limit(T0);
  return std::abs(moved.limit(T0) - e0) / (1.0 + std::abs(e0));
}

double equivariance_defect(const SurfaceGeometry& geo, const Config& cfg,
                           const Vec3& rapidity) {
  const int orders = cfg.depth + 2;
  const EmbeddingSeries emb = EmbeddingSeries::reference(geo, {}, orders);
  const Mat4 L = lorentz_exp(boost_generator(rapidity));
  const Mat4 Linv = lorentz_exp(boost_generator(-rapidity));

  const EnergyEvaluator ev(geo, emb, cfg);
  const EnergyEvaluator evT(geo, emb.transformed(Linv), cfg);
  const EnergyMomentum P = fit_four_vector(ev, 10, 137u);
  const EnergyMomentum PT = fit_four_vector(evT, 10, 138u);

  const Vec4 want = lorentz_apply(L, P.vec());
  return (PT.vec() - want).cwiseAbs().maxCoeff() /
         (1.0 + want.cwiseAbs().maxCoeff());
}

} // namespace qle
