// Acceptance suite for the energy-momentum and optimal-observer pipeline:
// closed-form recoveries, invariance properties, and decay-rate ladders on a
// 32-point grid. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero iff any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "qle/verify.hpp"

namespace {

using namespace qle;

GridPtr grid32() {
  static GridPtr g = SphereGrid::gauss_legendre(32);
  return g;
}

Config base_cfg() {
  Config c;
  c.n_theta = 32;
  return c;
}

double max_abs(const SphereField& f) { return f.abs().maxCoeff(); }

std::string fmt(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.3e", v);
  return b;
}

SphereField random_band(unsigned seed, int lmax, double amp, int lmin = 0) {
  auto g = grid32();
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  HarmonicSpectrum c = HarmonicSpectrum::Zero(g->spectrum_size());
  for (int l = lmin; l <= lmax; ++l)
    for (int m = -l; m <= l; ++m) c[sh_index(l, m)] = amp * dist(rng);
  return g->synthesize(c);
}

// slice whose four-momentum is (1, 0.6, 0, 0): rest-frame velocity 0.75
BondiData dipole_data() {
  auto g = grid32();
  BondiData d = BondiData::vacuum(g);
  d.m = 1.0 + 1.8 * g->position()[0];
  return d;
}

// admissible radiative slice: shear drawn from tensor potentials
BondiData radiative_data() {
  auto g = grid32();
  BondiData d = BondiData::vacuum(g);
  d.m = 1.0 + random_band(101, 5, 0.08);
  std::mt19937 rng(102);
  std::normal_distribution<double> dist;
  HarmonicSpectrum uc = HarmonicSpectrum::Zero(g->spectrum_size());
  HarmonicSpectrum vc = HarmonicSpectrum::Zero(g->spectrum_size());
  for (int l = 2; l <= 5; ++l)
    for (int m = -l; m <= l; ++m) {
      uc[sh_index(l, m)] = 0.01 * dist(rng);
      vc[sh_index(l, m)] = 0.01 * dist(rng);
    }
  const FramePair T =
      g->traceless_hessian(uc) + frame_rotate(g->traceless_hessian(vc));
  d.X = 0.5 * T.t;
  d.Y = -0.5 * T.p;
  d.Wt = g->gradient(random_band(103, 4, 0.08));
  return d;
}

const SurfaceGeometry& radiative_geo() {
  static SurfaceGeometry geo(radiative_data(), base_cfg());
  return geo;
}

// Multi-part criterion: each part has its own tolerance, the line reports
// the worst measured/tolerance ratio against 1.
struct Parts {
  double worst = 0.0;
  std::string binding;

  void add(const std::string& what, double value, double tol) {
    const double ratio = value / tol;
    if (binding.empty() || ratio > worst) {
      worst = ratio;
      binding = what + " = " + fmt(value) + " vs " + fmt(tol);
    }
  }
  CheckResult result(std::string name) const {
    return {std::move(name), worst, 1.0, worst <= 1.0, binding};
  }
};

CheckResult static_mass() {
  const double M = 1.3;
  Config cfg = base_cfg();
  BondiData d = BondiData::vacuum(grid32());
  d.m = SphereField::Constant(grid32()->size(), M);
  SurfaceGeometry geo(d, cfg);
  const EnergyMomentum P = bondi_four_momentum(geo, cfg);
  const double err = (P.vec() - Vec4(M, 0, 0, 0)).cwiseAbs().maxCoeff() / M;
  return {"static-slice-mass", err, 1e-10, err <= 1e-10, ""};
}

CheckResult momentum_routes() {
  Config cfg = base_cfg();
  SurfaceGeometry geo(dipole_data(), cfg);
  const EnergyMomentum A = bondi_four_momentum(geo, cfg);
  const EnergyMomentum B = image_route_momentum(geo, cfg);
  const double want = 0.6;
  double worst = std::abs(A.p(0) - want) / want;
  worst = std::max(worst, std::abs(B.p(0) - want) / want);
  worst = std::max(worst, (A.vec() - B.vec()).cwiseAbs().maxCoeff() /
                              A.vec().cwiseAbs().maxCoeff());
  return {"dipole-momentum-routes", worst, 1e-8, worst <= 1e-8, ""};
}

CheckResult observer_linearity() {
  Config cfg = base_cfg();
  SurfaceGeometry geo(dipole_data(), cfg);
  const EnergyMomentum P = bondi_four_momentum(geo, cfg);
  EnergyEvaluator ev(geo, EmbeddingSeries::reference(geo, {}, cfg.depth + 2),
                     cfg);
  double fit_res = 0.0;
  const EnergyMomentum F = fit_four_vector(ev, 10, 42u, &fit_res);
  Parts parts;
  parts.add("fit residual", fit_res, 1e-9);
  parts.add("vector mismatch",
            (F.vec() - P.vec()).cwiseAbs().maxCoeff() /
                P.vec().cwiseAbs().maxCoeff(),
            1e-8);
  return parts.result("observer-linearity");
}

CheckResult perturbation_invariant() {
  const Vec4 T0 = observer(Vec3(0.25, -0.1, 0.2));
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    const SphereField tau0 = random_band(500 + t, 4, 0.3);
    worst = std::max(
        worst, perturbation_invariance(radiative_geo(), base_cfg(), tau0, T0));
  }
  return {"reference-perturbation-invariance", worst, 1e-6, worst <= 1e-6, ""};
}

CheckResult lorentz_equivariance() {
  std::mt19937 rng(77);
  std::normal_distribution<double> dist;
  std::uniform_real_distribution<double> mag(0.2, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    Vec3 dir(dist(rng), dist(rng), dist(rng));
    dir.normalize();
    worst = std::max(worst, equivariance_defect(radiative_geo(), base_cfg(),
                                                mag(rng) * dir));
  }
  return {"lorentz-equivariance", worst, 1e-6, worst <= 1e-6, ""};
}

CheckResult connection_leading_form() {
  auto g = grid32();
  HarmonicSpectrum c = HarmonicSpectrum::Zero(g->spectrum_size());
  const double amps[5] = {0.8, -0.5, 0.3, 0.7, -0.4};
  for (int m = -2; m <= 2; ++m) c[sh_index(2, m)] = amps[m + 2];
  const SphereField tau0 = g->synthesize(c);
  EmbeddingSeries emb = EmbeddingSeries::reference(radiative_geo(), {tau0}, 3);
  ReferenceGeometry ref(emb, radiative_geo(), base_cfg());
  const SphereField want = 12.0 * tau0;
  const double rel = max_abs(ref.div_v0().coeff(-3) - want) / max_abs(want);
  return {"image-connection-leading-form", rel, 1e-7, rel <= 1e-7, ""};
}

CheckResult leading_order_observer() {
  Config cfg = base_cfg();
  cfg.depth = 0;
  cfg.ladder_count = 4; // radii 100, 200, 400, 800
  SurfaceGeometry geo(dipole_data(), cfg);
  OptimalSolver solver(geo, cfg);
  const OptimalSolution sol = solver.solve();
  Parts parts;
  parts.add("velocity error",
            (sol.velocity - Vec3(0.75, 0, 0)).cwiseAbs().maxCoeff(), 1e-9);
  parts.add("exponent offset from 4", std::abs(solver.decay_exponent(sol) - 4.0),
            0.2);
  return parts.result("leading-order-observer");
}

CheckResult next_order_decay() {
  Config cfg = base_cfg();
  cfg.depth = 1;
  cfg.ladder_count = 4;
  SurfaceGeometry geo(dipole_data(), cfg);
  OptimalSolver solver(geo, cfg);
  const OptimalSolution sol = solver.solve();
  const double err = std::abs(solver.decay_exponent(sol) - 5.0);
  return {"next-order-decay", err, 0.3, err <= 0.3, ""};
}

CheckResult second_variation_positivity() {
  Config cfg = base_cfg();
  cfg.depth = 0;
  BondiData d = BondiData::vacuum(grid32());
  d.m = SphereField::Constant(grid32()->size(), 1.0);
  SurfaceGeometry geo(d, cfg);
  const OptimalSolution sol = OptimalSolver(geo, cfg).solve();

  const double gam = std::sqrt(1.0 + sol.velocity.squaredNorm());
  const Eigen::Matrix3d Bs = sol.chain.leading().bottomRightCorner<3, 3>();
  std::mt19937 rng(2026);
  std::normal_distribution<double> dist;
  double min_time = std::numeric_limits<double>::infinity();
  double min_boost = min_time;
  double ident = 0.0;
  for (int t = 0; t < 50; ++t) {
    const SphereField dtau =
        random_band(3000 + t, 8, 0.2 + 0.3 * std::abs(dist(rng)), 2);
    min_time = std::min(min_time, second_variation_time(sol, dtau));

    const Vec3 db(dist(rng), dist(rng), dist(rng));
    const double val = second_variation_boost(sol, db);
    min_boost = std::min(min_boost, val);
    const Vec3 G = Bs.transpose() * db;
    const double want = 8.0 * M_PI * sol.momentum.e / gam * G.squaredNorm();
    ident = std::max(ident, std::abs(val - want) / want);
  }
  Parts parts;
  parts.add("b-form identity defect", ident, 1e-7);
  CheckResult c = parts.result("second-variation-positivity");
  if (!(min_time > 0.0) || !(min_boost > 0.0)) {
    c.pass = false;
    c.note += "; nonpositive form value";
  } else {
    c.note += "; min time " + fmt(min_time) + ", min boost " + fmt(min_boost);
  }
  return c;
}

CheckResult embedding_consistency() {
  const SurfaceGeometry& geo = radiative_geo();
  EmbeddingSeries emb =
      EmbeddingSeries::reference(geo, {random_band(900, 3, 0.25)}, 4);
  Parts parts;
  double mres = 0.0;
  for (double v : emb.metric_residuals(geo)) mres = std::max(mres, v);
  parts.add("metric residual", mres, 1e-8);

  ReferenceGeometry ref(emb, geo, base_cfg());
  const SphereField series = ref.h_norm().eval(1000.0);
  const SphereField direct = image_curvature_at(geo, emb, 1000.0);
  parts.add("curvature mismatch", max_abs(direct - series) / max_abs(series),
            1e-5);
  return parts.result("embedding-consistency");
}

} // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  std::vector<CheckResult> results;
  auto run = [&](const char* name, const std::function<CheckResult()>& fn) {
    CheckResult c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c = {name, std::numeric_limits<double>::quiet_NaN(), 0.0, false,
           e.what()};
    }
    std::puts(format_check_line(c).c_str());
    std::fflush(stdout);
    results.push_back(std::move(c));
  };

  run("static-slice-mass", static_mass);
  run("dipole-momentum-routes", momentum_routes);
  run("observer-linearity", observer_linearity);
  run("reference-perturbation-invariance", perturbation_invariant);
  run("lorentz-equivariance", lorentz_equivariance);
  run("image-connection-leading-form", connection_leading_form);
  run("leading-order-observer", leading_order_observer);
  run("next-order-decay", next_order_decay);
  run("second-variation-positivity", second_variation_positivity);
  run("embedding-consistency", embedding_consistency);

  int failed = 0;
  for (const CheckResult& c : results) failed += c.pass ? 0 : 1;
  const double secs = std::chrono::duration<double>(clock::now() - t0).count();
  std::printf("%zu checks, %d failed, %.1f s\n", results.size(), failed, secs);
  return failed == 0 ? 0 : 1;
}
