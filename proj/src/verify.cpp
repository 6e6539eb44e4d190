#include "qle/verify.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace qle {

namespace {

constexpr double kFourPi = 4.0 * M_PI;

double sup(const SphereField& f) { return f.abs().maxCoeff(); }

CheckResult bound_check(std::string name, double measured, double tol) {
  return {std::move(name), measured, tol, measured <= tol, {}};
}

CheckResult failed_check(std::string name, const std::string& why) {
  return {std::move(name), std::numeric_limits<double>::quiet_NaN(), 0.0,
          false, why};
}

} // namespace

std::string format_check_line(const CheckResult& c) {
  std::ostringstream os;
  os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
     << "  measured=" << c.measured << "  tolerance=" << c.tolerance;
  if (!c.note.empty()) os << "  (" << c.note << ")";
  return os.str();
}

bool all_passed(const std::vector<CheckResult>& checks) {
  for (const CheckResult& c : checks)
    if (!c.pass) return false;
  return true;
}

SphereField image_curvature_at(const SurfaceGeometry& geo,
                               const EmbeddingSeries& emb, double r) {
  const GridPtr& g = geo.grid();
  SphereField h0sq = SphereField::Zero(g->size());
  for (int a = 0; a < 4; ++a) {
    const SphereField G = geo.laplacian_at(r, emb.component(a).eval(r));
    h0sq += (a == 0 ? -1.0 : 1.0) * G * G;
  }
  if (h0sq.minCoeff() <= 0.0)
    throw ConsistencyError("image mean curvature is not spacelike at r");
  return h0sq.sqrt();
}

std::vector<CheckResult> run_verification(const SurfaceGeometry& geo,
                                          const Config& cfg) {
  const GridPtr& g = geo.grid();
  std::vector<CheckResult> out;

  // energy-momentum by mass-aspect moments and by image coefficients
  {
    EnergyMomentum route1;
    route1.e = g->integrate(2.0 * geo.data().m) / (2.0 * kFourPi);
    for (int i = 0; i < 3; ++i)
      route1.p(i) =
          g->integrate(2.0 * geo.data().m * g->position()[i]) / (2.0 * kFourPi);
    try {
      const EnergyMomentum route2 = image_route_momentum(geo, cfg);
      const double diff = (route1.vec() - route2.vec()).cwiseAbs().maxCoeff() /
                          (1.0 + route1.vec().cwiseAbs().maxCoeff());
      out.push_back(bound_check("momentum-route-agreement", diff,
                                cfg.tol_route));
    } catch (const std::exception& e) {
      out.push_back(failed_check("momentum-route-agreement", e.what()));
    }
  }

  // radial gauge: the angular metric determinant is the round one
  {
    const MetricBlock& met = geo.metric();
    const RadialSeries det =
        (met.a11.mul(met.a22, false) - met.a12.mul(met.a12, false))
            .projected();
    const double defect =
        std::max({sup(det.coeff(4) - 1.0), sup(det.coeff(3)),
                  sup(det.coeff(2))});
    out.push_back(bound_check("determinant-gauge", defect, 1e-10));
  }

  const int orders = cfg.depth + 2;
  try {
    const EmbeddingSeries emb = EmbeddingSeries::reference(geo, {}, orders);

    // induced metric of the image matches the angular metric per order
    double worst = 0.0;
    for (double d : emb.metric_residuals(geo)) worst = std::max(worst, d);
    out.push_back(bound_check("embedding-metric-residual", worst, 1e-8));

    const ReferenceGeometry ref(emb, geo, cfg);
    out.push_back(bound_check("image-cone-rate",
                              sup(ref.h_norm_sq().coeff(-2) - 4.0) / 4.0,
                              1e-6));

    const double r = 1e3;
    const SphereField direct = image_curvature_at(geo, emb, r);
    const SphereField series = ref.h_norm().eval(r);
    out.push_back(bound_check(
        "image-curvature-pointwise",
        sup(direct - series) / sup(series), 1e-5));
  } catch (const std::exception& e) {
    out.push_back(failed_check("embedding-metric-residual", e.what()));
  }

  // optimal observer: existence, per-order cancellation, leading profile
  try {
    const OptimalSolver solver(geo, cfg);
    const OptimalSolution sol = solver.solve();

    double worst = 0.0;
    for (double s : sol.residual_sup) worst = std::max(worst, s);
    out.push_back(bound_check("optimal-order-cancellation", worst, 1e-6));

    const double gam = std::sqrt(1.0 + sol.velocity.squaredNorm());
    out.push_back(bound_check(
        "observer-velocity-relation",
        (sol.velocity / gam - sol.momentum.p / sol.momentum.e).norm(), 1e-12));

    SphereField profile = SphereField::Zero(g->size());
    for (int i = 0; i < 3; ++i)
      profile += sol.velocity(i) * g->position()[i];
    out.push_back(bound_check(
        "leading-time-profile",
        sup(sol.family.component(0).coeff(1) - profile), 1e-9));

    // positivity of both second-variation forms on random perturbations
    std::mt19937 rng(2026);
    std::normal_distribution<double> dist;
    double least = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 10; ++trial) {
      HarmonicSpectrum c = HarmonicSpectrum::Zero(g->spectrum_size());
      for (int l = 2; l <= std::min(6, g->lmax()); ++l)
        for (int m = -l; m <= l; ++m)
          c(sh_index(l, m)) = 0.3 * dist(rng);
      least = std::min(least,
                       second_variation_time(sol, g->synthesize(c)));
      const Vec3 db(dist(rng), dist(rng), dist(rng));
      least = std::min(least, second_variation_boost(sol, db));
    }
    CheckResult pos{"second-variation-positive", least, 0.0, least > 0.0, {}};
    out.push_back(pos);

    // the boost form carries the interface mass times a constant profile
    const Vec3 db(0.4, -0.3, 0.2);
    const Eigen::Matrix3d Bs =
        sol.chain.leading().bottomRightCorner<3, 3>();
    const double want = 8.0 * M_PI * sol.momentum.e / gam *
                        (Bs.transpose() * db).squaredNorm();
    out.push_back(bound_check(
        "boost-form-identity",
        std::abs(second_variation_boost(sol, db) - want) / want, 1e-7));
  } catch (const std::exception& e) {
    out.push_back(failed_check("optimal-order-cancellation", e.what()));
  }

  return out;
}

} // namespace qle
