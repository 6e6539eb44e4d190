#include <doctest.h>

#include <cmath>
#include <random>

#include "qle/optimal.hpp"

using namespace qle;

namespace {

GridPtr grid() {
  static GridPtr g = SphereGrid::gauss_legendre(16);
  return g;
}

double max_abs(const SphereField& f) { return f.abs().maxCoeff(); }

SphereField random_band(unsigned seed, int lmax, double amp, int lmin = 0) {
  auto g = grid();
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  HarmonicSpectrum c = HarmonicSpectrum::Zero(g->spectrum_size());
  for (int l = lmin; l <= lmax; ++l)
    for (int m = -l; m <= l; ++m) c[sh_index(l, m)] = amp * dist(rng);
  return g->synthesize(c);
}

// admissible radiative slice: shear drawn from tensor potentials
BondiData sample_data(unsigned seed) {
  auto g = grid();
  BondiData d = BondiData::vacuum(g);
  d.m = 1.0 + random_band(seed, 3, 0.15);
  std::mt19937 rng(seed + 1);
  std::normal_distribution<double> dist;
  HarmonicSpectrum uc = HarmonicSpectrum::Zero(g->spectrum_size());
  HarmonicSpectrum vc = HarmonicSpectrum::Zero(g->spectrum_size());
  for (int l = 2; l <= 3; ++l)
    for (int m = -l; m <= l; ++m) {
      uc[sh_index(l, m)] = 0.02 * dist(rng);
      vc[sh_index(l, m)] = 0.02 * dist(rng);
    }
  const FramePair T =
      g->traceless_hessian(uc) + frame_rotate(g->traceless_hessian(vc));
  d.X = 0.5 * T.t;
  d.Y = -0.5 * T.p;
  d.Wt = g->gradient(random_band(seed + 3, 3, 0.15));
  return d;
}

// slice whose four-momentum is (1, 0.6, 0, 0): observer velocity 0.75
BondiData dipole_data() {
  auto g = grid();
  BondiData d = BondiData::vacuum(g);
  d.m = 1.0 + 1.8 * g->position()[0];
  return d;
}

Config solver_cfg(int depth) {
  Config c;
  c.n_theta = 16;
  c.depth = depth;
  return c;
}

} // namespace

TEST_CASE("static slice admits the trivial observer") {
  const double M = 1.3;
  auto g = grid();
  BondiData d = BondiData::vacuum(g);
  d.m = SphereField::Constant(g->size(), M);
  SurfaceGeometry geo(d, solver_cfg(2));
  OptimalSolver solver(geo, solver_cfg(2));

  OptimalSolution sol = solver.solve();
  CHECK(sol.momentum.e == doctest::Approx(M).epsilon(1e-12));
  CHECK(sol.momentum.p.norm() < 1e-12);
  CHECK(sol.velocity.norm() < 1e-12);
  CHECK((sol.chain.leading() - Mat4::Identity()).cwiseAbs().maxCoeff() <
        1e-12);
  for (const SphereField& t : sol.tau_hats) CHECK(max_abs(t) < 1e-10);
  for (double s : sol.residual_sup) CHECK(s < 1e-10);
  for (double r : {50.0, 400.0, 3200.0})
    CHECK(max_abs(solver.residual_at_radius(sol, r)) < 1e-12);
}

TEST_CASE("spacelike energy-momentum is rejected") {
  auto g = grid();
  BondiData d = BondiData::vacuum(g);
  d.m = 0.1 + 1.8 * g->position()[0]; // e = 0.1 < |p| = 0.6
  SurfaceGeometry geo(d, solver_cfg(0));
  OptimalSolver solver(geo, solver_cfg(0));
  CHECK_THROWS_AS(solver.solve(), NotTimelikeError);
}

TEST_CASE("boosted slice recovers its rest frame") {
  SurfaceGeometry geo(dipole_data(), solver_cfg(1));
  OptimalSolver solver(geo, solver_cfg(1));
  OptimalSolution sol = solver.solve();

  // velocity of the optimal observer from the momentum ratio
  CHECK(sol.momentum.e == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.momentum.p(0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK((sol.velocity - Vec3(0.75, 0.0, 0.0)).norm() < 1e-12);
  CHECK((sol.chain.leading() - pure_boost(sol.velocity))
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  // the leading time coefficient is the linear observer profile
  auto g = grid();
  SphereField want = SphereField::Zero(g->size());
  for (int i = 0; i < 3; ++i) want += sol.velocity(i) * g->position()[i];
  CHECK(max_abs(sol.family.component(0).coeff(1) - want) < 1e-10);

  // interface mass deficit carries the total energy
  const double gam = std::sqrt(1.0 + sol.velocity.squaredNorm());
  const double fm2 = g->integrate(sol.f.coeff(-2));
  CHECK(-fm2 == doctest::Approx(8.0 * M_PI * sol.momentum.e / gam)
                    .epsilon(1e-8));

  for (double s : sol.residual_sup) CHECK(s < 1e-8);
}

TEST_CASE("degree-1 system matrix matches the velocity projector") {
  SurfaceGeometry geo(dipole_data(), solver_cfg(1));
  OptimalSolver solver(geo, solver_cfg(1));
  OptimalSolution sol = solver.solve();
  auto g = grid();

  const Vec3 c = sol.velocity;
  const double gsq = 1.0 + c.squaredNorm();
  const double fm2 = g->integrate(sol.f.coeff(-2));
  const Eigen::Matrix3d A =
      -fm2 * (Eigen::Matrix3d::Identity() - c * c.transpose() / gsq);

  // projector spectrum: 1/gamma^2 along the velocity, 1 transverse
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(A / -fm2);
  CHECK(es.eigenvalues()(0) == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(es.eigenvalues()(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(es.eigenvalues()(2) == doctest::Approx(1.0).epsilon(1e-12));

  // finite differences of the order forcing against the chain generator
  // reproduce A composed with the spatial block of the leading factor
  const RadialSeries h0sq = sol.h0.mul(sol.h0);
  const auto moments = [&](const Vec3& b) {
    BoostChain chain = sol.chain;
    chain.gens[1] = boost_generator(b);
    const EmbeddingSeries fam = sol.reference.transformed(chain.expand(7));
    const RadialSeries tau = fam.component(0);
    const RadialSeries f = solver.interface_factor(h0sq, tau);
    const SphereField S =
        solver.residual_series(tau, f, sol.h0, sol.divv0).coeff(-4);
    Vec3 m;
    for (int i = 0; i < 3; ++i) m(i) = g->integrate(S * g->position()[i]);
    return m;
  };

  const Eigen::Matrix3d Bs = sol.chain.leading().bottomRightCorner<3, 3>();
  const Eigen::Matrix3d want = A * Bs;
  const double eps = 1e-5;
  for (int j = 0; j < 3; ++j) {
    const Vec3 ej = eps * Vec3::Unit(j);
    const Vec3 col = (moments(ej) - moments(-ej)) / (2.0 * eps);
    CHECK((col - want.col(j)).norm() < 1e-6 * want.norm());
  }
}

TEST_CASE("finite-radius residual decays one power faster per order") {
  SurfaceGeometry geo(dipole_data(), solver_cfg(0));

  OptimalSolver s0(geo, solver_cfg(0));
  const double e0 = s0.decay_exponent(s0.solve());
  CHECK(e0 == doctest::Approx(4.0).epsilon(0.05));

  OptimalSolver s1(geo, solver_cfg(1));
  const double e1 = s1.decay_exponent(s1.solve());
  CHECK(e1 == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("radiative slice solves and keeps the observer relation") {
  SurfaceGeometry geo(sample_data(29), solver_cfg(1));
  OptimalSolver solver(geo, solver_cfg(1));
  OptimalSolution sol = solver.solve();

  for (double s : sol.residual_sup) CHECK(s < 1e-8);

  // c / gamma == p / e by construction of the velocity
  const double gam = std::sqrt(1.0 + sol.velocity.squaredNorm());
  CHECK((sol.velocity / gam - sol.momentum.p / sol.momentum.e).norm() <
        1e-12);

  auto g = grid();
  SphereField want = SphereField::Zero(g->size());
  for (int i = 0; i < 3; ++i) want += sol.velocity(i) * g->position()[i];
  CHECK(max_abs(sol.family.component(0).coeff(1) - want) < 1e-9);

  // moving the solved top coefficient rebuilds the forcing it cancelled
  const RadialSeries h0sq = sol.h0.mul(sol.h0);
  const SphereField delta = random_band(91, 3, 0.01, 2);
  std::vector<SphereField> moved = sol.tau_hats;
  moved[0] += delta;
  const EmbeddingSeries emb2 = EmbeddingSeries::reference(geo, moved, 3);
  const ReferenceGeometry ref2(emb2, geo, solver_cfg(1));
  const EmbeddingSeries fam2 = emb2.transformed(sol.chain.expand(7));
  const RadialSeries tau2 = fam2.component(0);
  const RadialSeries f2 = solver.interface_factor(ref2.h_norm_sq(), tau2);
  const SphereField S2 =
      solver.residual_series(tau2, f2, ref2.h_norm(), ref2.div_v0())
          .coeff(-3);
  HarmonicSpectrum stab = g->analyze(delta);
  for (int l = 0; l <= g->lmax(); ++l)
    for (int m = -l; m <= l; ++m)
      stab(sh_index(l, m)) *= 0.5 * stability_eigenvalue(l);
  CHECK(max_abs(S2 - g->synthesize(stab)) < 1e-7);
}

TEST_CASE("second variation is positive in both directions") {
  SurfaceGeometry geo(dipole_data(), solver_cfg(1));
  OptimalSolver solver(geo, solver_cfg(1));
  OptimalSolution sol = solver.solve();
  auto g = grid();

  std::mt19937 rng(7);
  std::normal_distribution<double> dist;

  // time direction: quadrature value equals the spectral closed form
  for (int trial = 0; trial < 5; ++trial) {
    const SphereField dtau =
        random_band(100 + trial, 5, 0.3 * (1.0 + dist(rng) * dist(rng)), 2);
    const double quad = second_variation_time(sol, dtau);
    HarmonicSpectrum c = g->analyze(dtau);
    double spectral = 0.0;
    for (int l = 2; l <= g->lmax(); ++l)
      for (int m = -l; m <= l; ++m)
        spectral += stability_eigenvalue(l) * c(sh_index(l, m)) *
                    c(sh_index(l, m));
    spectral *= 0.5 * sol.chain.leading()(0, 0);
    CHECK(quad > 0.0);
    CHECK(quad == doctest::Approx(spectral).epsilon(1e-10));
  }

  // boost direction: the angular profile has constant energy density, so
  // the form reduces to the interface mass times the squared motion
  const double gam = std::sqrt(1.0 + sol.velocity.squaredNorm());
  const Eigen::Matrix3d Bs = sol.chain.leading().bottomRightCorner<3, 3>();
  for (int trial = 0; trial < 5; ++trial) {
    const Vec3 db(dist(rng), dist(rng), dist(rng));
    const double val = second_variation_boost(sol, db);
    const Vec3 G = Bs.transpose() * db;

    SphereField dg = SphereField::Zero(g->size());
    for (int i = 0; i < 3; ++i) dg += G(i) * g->position()[i];
    const FramePair gr = g->gradient(dg);
    const SphereField density = gr.t * gr.t + gr.p * gr.p + dg * dg;
    CHECK(max_abs(density - G.squaredNorm()) < 1e-10);

    const double want =
        8.0 * M_PI * sol.momentum.e / gam * G.squaredNorm();
    CHECK(val > 0.0);
    CHECK(val == doctest::Approx(want).epsilon(1e-7));
  }
}
