#include "qle/optimal.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace qle {

namespace {

double sup(const SphereField& f) { return f.abs().maxCoeff(); }

// unboosted image of the family together with its invariants; the chain
// factors commute with every per-surface invariant, so these never need to
// be rebuilt when only the chain changes
struct Pieces {
  EmbeddingSeries emb;
  RadialSeries h0sq, h0, divv0;
};

Pieces make_pieces(const SurfaceGeometry& geo, const Config& cfg,
                   const std::vector<SphereField>& taus, int orders) {
  EmbeddingSeries emb = EmbeddingSeries::reference(geo, taus, orders);
  const ReferenceGeometry ref(emb, geo, cfg);
  return {std::move(emb), ref.h_norm_sq(), ref.h_norm(), ref.div_v0()};
}

} // namespace

Mat4 BoostChain::leading() const {
  return gens.empty() ? Mat4::Identity() : lorentz_exp(gens[0]);
}

std::map<int, Mat4> BoostChain::expand(int depth) const {
  std::map<int, Mat4> acc{{0, Mat4::Identity()}};
  for (std::size_t k = 0; k < gens.size(); ++k) {
    std::map<int, Mat4> factor;
    if (k == 0) {
      factor.emplace(0, lorentz_exp(gens[0]));
    } else {
      factor.emplace(0, Mat4::Identity());
      Mat4 pw = Mat4::Identity();
      double inv_fact = 1.0;
      for (int j = 1; static_cast<int>(k) * j <= depth; ++j) {
        pw = pw * gens[k];
        inv_fact /= j;
        factor.emplace(static_cast<int>(k) * j, inv_fact * pw);
      }
    }
    // later (deeper) factors act on the left of the accumulated product
    std::map<int, Mat4> next;
    for (const auto& [i, A] : factor)
      for (const auto& [j, B] : acc) {
        if (i + j > depth) continue;
        const Mat4 prod = A * B;
        auto [it, fresh] = next.emplace(i + j, prod);
        if (!fresh) it->second += prod;
      }
    acc = std::move(next);
  }
  return acc;
}

OptimalSolver::OptimalSolver(const SurfaceGeometry& geo, const Config& cfg)
    : geo_(geo), cfg_(cfg) {}

RadialSeries OptimalSolver::interface_factor(const RadialSeries& h0sq,
                                             const RadialSeries& tau) const {
  const int W = cfg_.series_depth;
  const GridPtr& g = geo_.grid();

  // both curvature norms open at the cone rate; the difference starts one
  // order below, and the roundoff remnant at the cone order is removed so
  // the order bookkeeping stays honest
  RadialSeries num = geo_.h_norm_sq() - h0sq;
  if (num.has(-2)) {
    if (sup(num.coeff(-2)) > 1e-6)
      throw ConsistencyError(
          "curvature norms of the surface and its image open at different "
          "rates");
    RadialSeries cleaned(g);
    for (const auto& [k, c] : num.terms())
      if (k != -2) cleaned.set_coeff(k, c);
    cleaned.set_min_power(num.min_power());
    num = std::move(cleaned);
  }

  const FrameSeries grad = geo_.gradient_series(tau);
  const RadialSeries gauge =
      RadialSeries::constant(g, SphereField::Ones(g->size())) +
      geo_.dot_series(grad, grad);
  const RadialSeries lap = geo_.laplacian_series(tau);
  const RadialSeries lap2 = lap.mul(lap);

  const RadialSeries den = (geo_.h_norm_sq().mul(gauge) + lap2).sqrt(W) +
                           (h0sq.mul(gauge) + lap2).sqrt(W);
  return num.mul(den.recip(W));
}

RadialSeries OptimalSolver::residual_series(const RadialSeries& tau,
                                            const RadialSeries& f,
                                            const RadialSeries& h0,
                                            const RadialSeries& divv0) const {
  const int W = cfg_.series_depth;
  const FrameSeries grad = geo_.gradient_series(tau);
  const RadialSeries density = geo_.divergence_series(grad.scaled(f));

  const RadialSeries z = geo_.laplacian_series(tau).mul(f).mul(
      geo_.h_norm().mul(h0).recip(W));
  const RadialSeries tilt = geo_.laplacian_series(asinh_series(z, W));

  return density - tilt - geo_.div_v() + divv0;
}

OptimalSolution OptimalSolver::solve() const {
  const GridPtr& g = geo_.grid();
  const int korders = cfg_.depth + 2;

  const EnergyMomentum P = bondi_four_momentum(geo_, cfg_);
  const double mass2 = P.e * P.e - P.p.squaredNorm();
  if (P.e <= 0.0 || mass2 <= 0.0)
    throw NotTimelikeError(
        "energy-momentum is not future timelike: no optimal observer");
  const Vec3 c = P.p / std::sqrt(mass2);
  const double gsq = 1.0 + c.squaredNorm();

  BoostChain chain;
  const double cn = c.norm();
  chain.gens.push_back(
      boost_generator(cn > 0.0 ? Vec3(std::asinh(cn) / cn * c) : Vec3::Zero()));

  std::vector<SphereField> taus;
  Pieces pc = make_pieces(geo_, cfg_, taus, korders);

  RadialSeries f(g);
  const auto forcing = [&](int k) {
    const EmbeddingSeries fam = pc.emb.transformed(chain.expand(cfg_.depth + 6));
    const RadialSeries tau = fam.component(0);
    f = interface_factor(pc.h0sq, tau);
    return SphereField(residual_series(tau, f, pc.h0, pc.divv0).coeff(-(k + 3)));
  };

  for (int k = 0; k <= cfg_.depth; ++k) {
    if (k > 0) {
      // the r^-k chain factor absorbs the degree-1 obstruction of this
      // order; the system matrix is the interface mass times the projector
      // flattened along the observer velocity
      chain.gens.push_back(Mat4::Zero());
      SphereField S = forcing(k);
      const double fm2 = g->integrate(f.coeff(-2));
      if (!(fm2 < 0.0))
        throw ConsistencyError("interface density carries no mass deficit");
      const Eigen::Matrix3d A =
          -fm2 * (Eigen::Matrix3d::Identity() - c * c.transpose() / gsq);
      const Eigen::Matrix3d Bs = chain.leading().bottomRightCorner<3, 3>();
      Vec3 btot = Vec3::Zero();
      for (int pass = 0; pass < 4; ++pass) {
        Vec3 mom;
        for (int i = 0; i < 3; ++i)
          mom(i) = g->integrate(S * g->position()[i]);
        if (mom.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + sup(S))) break;
        const Vec3 d = A.ldlt().solve(-mom);
        btot += Bs.ldlt().solve(d);
        chain.gens[k] = boost_generator(btot);
        S = forcing(k);
      }
    }

    const SphereField S = forcing(k);
    const HarmonicSpectrum u =
        g->solve_stability(g->analyze(-2.0 * S), cfg_.eps_solv);
    taus.push_back(g->synthesize(u));
    pc = make_pieces(geo_, cfg_, taus, korders);

    const SphereField left = forcing(k);
    if (sup(left) > 1e-7 * (1.0 + sup(S)))
      throw ConsistencyError(
          "time correction failed to cancel its order of the residual");
  }

  return assemble(std::move(chain), std::move(taus));
}

OptimalSolution OptimalSolver::assemble(
    BoostChain chain, std::vector<SphereField> tau_hats) const {
  if (chain.gens.size() != tau_hats.size())
    throw InputError("chain factors and time coefficients disagree in depth");
  const GridPtr& g = geo_.grid();
  const int korders = cfg_.depth + 2;

  const EnergyMomentum P = bondi_four_momentum(geo_, cfg_);
  const double mass2 = P.e * P.e - P.p.squaredNorm();
  if (P.e <= 0.0 || mass2 <= 0.0)
    throw NotTimelikeError(
        "energy-momentum is not future timelike: no optimal observer");
  const Vec3 c = P.p / std::sqrt(mass2);

  Pieces pc = make_pieces(geo_, cfg_, tau_hats, korders);
  EmbeddingSeries fam = pc.emb.transformed(chain.expand(cfg_.depth + 6));
  RadialSeries f = interface_factor(pc.h0sq, fam.component(0));
  const RadialSeries res =
      residual_series(fam.component(0), f, pc.h0, pc.divv0);

  std::vector<double> rsup;
  for (std::size_t k = 0; k < tau_hats.size(); ++k)
    rsup.push_back(sup(res.coeff(-(static_cast<int>(k) + 3))));

  return OptimalSolution{P,
                         c,
                         std::move(chain),
                         std::move(tau_hats),
                         std::move(pc.emb),
                         std::move(fam),
                         std::move(f),
                         std::move(pc.h0),
                         std::move(pc.divv0),
                         std::move(rsup)};
}

SphereField OptimalSolver::residual_at_radius(const OptimalSolution& sol,
                                              double r) const {
  const GridPtr& g = geo_.grid();
  const SphereField tau_r = sol.family.component(0).eval(r);
  const SphereField f_r = sol.f.eval(r);
  const SphereField lap_r = geo_.laplacian_at(r, tau_r);
  const FramePair grad_r = g->gradient(tau_r);

  const SphereField density = geo_.divergence_at(r, grad_r.cwise(f_r));
  const SphereField z =
      lap_r * f_r / (geo_.h_norm().eval(r) * sol.h0.eval(r));
  const SphereField tilt = geo_.laplacian_at(
      r, z.unaryExpr([](double x) { return std::asinh(x); }));

  return density - tilt - geo_.div_v().eval(r) + sol.divv0.eval(r);
}

double OptimalSolver::decay_exponent(const OptimalSolution& sol) const {
  const int n = cfg_.ladder_count;
  if (n < 2) throw InputError("decay fit needs at least two ladder radii");

  Eigen::MatrixXd M(n, 2);
  Eigen::VectorXd y(n);
  double r = cfg_.ladder_r0;
  for (int i = 0; i < n; ++i, r *= cfg_.ladder_factor) {
    const double s = sup(residual_at_radius(sol, r));
    if (s <= 0.0) return std::numeric_limits<double>::infinity();
    M(i, 0) = 1.0;
    M(i, 1) = std::log(r);
    y(i) = std::log(s);
  }
  const Eigen::Vector2d line = M.colPivHouseholderQr().solve(y);
  return -line(1);
}

double second_variation_time(const OptimalSolution& sol,
                             const SphereField& dtau) {
  const GridPtr g = sol.reference.grid();
  HarmonicSpectrum spec = g->analyze(dtau);
  for (int l = 0; l <= g->lmax(); ++l)
    for (int m = -l; m <= l; ++m)
      spec(sh_index(l, m)) *= stability_eigenvalue(l);
  const double b00 = sol.chain.leading()(0, 0);
  return 0.5 * b00 * g->integrate(g->synthesize(spec) * dtau);
}

double second_variation_boost(const OptimalSolution& sol, const Vec3& db) {
  const GridPtr g = sol.reference.grid();
  const Mat4 B = sol.chain.leading();

  // motion of the time function under a perturbation of the leading factor
  Vec3 G = Vec3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) G(i) += db(j) * B(1 + j, 1 + i);
  SphereField dg = SphereField::Zero(g->size());
  for (int i = 0; i < 3; ++i) dg += G(i) * g->position()[i];

  const FramePair grad = g->gradient(dg);
  const SphereField quad = grad.t * grad.t + grad.p * grad.p + dg * dg;
  return -g->integrate(sol.f.coeff(-2) * quad);
}

} // namespace qle
