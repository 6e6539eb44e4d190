#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <utility>

#include "qle/config.hpp"

namespace qle {

// Scalar samples on the quadrature grid, theta-major: f[i*n_phi + j].
using SphereField = Eigen::ArrayXd;

// Coefficients in the real orthonormal harmonic basis, indexed l*l+l+m.
// The basis carries no Condon-Shortley phase; m>0 are cosine modes, m<0 sine.
using HarmonicSpectrum = Eigen::VectorXd;

inline int sh_index(int l, int m) { return l * l + l + m; }
inline int sh_count(int lmax) { return (lmax + 1) * (lmax + 1); }

// Components of a tangent object in the orthonormal dyad (e_theta, e_phihat),
// e_phihat = (1/sin th) d_phi.  For a one-form w this stores (w_th, w_ph/sin th);
// for a symmetric traceless 2-tensor it stores the independent pair (T11, T12).
struct FramePair {
  SphereField t, p;

  FramePair() = default;
  FramePair(SphereField a, SphereField b) : t(std::move(a)), p(std::move(b)) {}

  FramePair operator+(const FramePair& o) const { return {t + o.t, p + o.p}; }
  FramePair operator-(const FramePair& o) const { return {t - o.t, p - o.p}; }
  FramePair operator*(double s) const { return {t * s, p * s}; }
  FramePair cwise(const SphereField& s) const { return {t * s, p * s}; }
};

// Quarter-turn rotation of the frame pair: maps the gradient-type tensor built
// from a potential to its curl-type partner with the same potential.
inline FramePair frame_rotate(const FramePair& f) { return {f.p, -f.t}; }

// Gauss-Legendre x equispaced-phi product grid with exact quadrature for
// products of two harmonics of degree <= lmax() and the spectral transforms,
// derivative tables and weak-form operators built on it.
class SphereGrid {
 public:
  static std::shared_ptr<const SphereGrid> gauss_legendre(int n_theta,
                                                          int n_phi = 0);

  int n_theta() const { return nth_; }
  int n_phi() const { return nph_; }
  int lmax() const { return nth_ - 1; }
  int size() const { return nth_ * nph_; }
  int spectrum_size() const { return sh_count(lmax()); }

  // Per-node measure including the area element; sums to 4*pi.
  const SphereField& weights() const { return w_; }
  const SphereField& sin_theta() const { return sin_; }
  const SphereField& cos_theta() const { return cos_; }

  double theta_node(int i) const { return theta_[i]; }
  double phi_node(int j) const { return phi_[j]; }

  double integrate(const SphereField& f) const { return (w_ * f).sum(); }

  HarmonicSpectrum analyze(const SphereField& f) const;
  SphereField synthesize(const HarmonicSpectrum& c) const;
  // Re-expansion of pointwise products onto the resolved band.
  SphereField project(const SphereField& f) const {
    return synthesize(analyze(f));
  }

  // Round sphere Laplacian, spectral: eigenvalue -l(l+1) per degree.
  HarmonicSpectrum laplacian(const HarmonicSpectrum& c) const;
  SphereField laplacian(const SphereField& f) const {
    return synthesize(laplacian(analyze(f)));
  }

  // Gradient one-form of a scalar in frame components.
  FramePair gradient(const HarmonicSpectrum& c) const;
  FramePair gradient(const SphereField& f) const {
    return gradient(analyze(f));
  }

  // Divergence of a frame vector via the weak form: the degree-0 coefficient
  // vanishes identically, and divergence(gradient(f)) == laplacian(f) exactly
  // on the resolved band.
  HarmonicSpectrum divergence(const FramePair& v) const;
  SphereField divergence_field(const FramePair& v) const {
    return synthesize(divergence(v));
  }

  // Traceless Hessian of a potential: (D_a D_b - 1/2 s_ab D^2) u in frame
  // components (T11, T12).
  FramePair traceless_hessian(const HarmonicSpectrum& u) const;

  // Potentials (u, v) of a symmetric traceless frame tensor
  // T = H(u) + rot(H(v)); degrees 0 and 1 lie in the kernel and are dropped.
  std::pair<HarmonicSpectrum, HarmonicSpectrum> tensor_potentials(
      const FramePair& T) const;

  // Solve D^2(D^2 + 2) u = rhs.  Degrees 0 and 1 span the kernel: the solution
  // has no such modes, and the same modes of rhs must vanish to eps (relative
  // to max(1, |rhs|_2)) or a SolvabilityError is thrown.
  HarmonicSpectrum solve_stability(const HarmonicSpectrum& rhs,
                                   double eps) const;

  // Unit-sphere position X~ = (sin th sin ph, sin th cos ph, cos th) and its
  // frame derivatives; X~_i = sqrt(4pi/3) * Y(1, i-2).
  const std::array<SphereField, 3>& position() const { return pos_; }
  const std::array<SphereField, 3>& position_dth() const { return pos_dt_; }
  const std::array<SphereField, 3>& position_dph() const { return pos_dp_; }

 private:
  SphereGrid(int n_theta, int n_phi);

  int plm_index(int l, int m) const { return l * (l + 1) / 2 + m; }

  int nth_ = 0, nph_ = 0;
  double dphi_ = 0.0;
  Eigen::ArrayXd xs_, wx_;          // Gauss-Legendre nodes/weights in cos th
  Eigen::ArrayXd theta_, phi_;
  SphereField w_, sin_, cos_;       // grid-sized
  // Legendre-type tables, rows plm_index(l,m), columns theta nodes:
  Eigen::MatrixXd q_;    // normalized associated Legendre Q_l^m(cos th)
  Eigen::MatrixXd dq_;   // d/dth Q_l^m
  Eigen::MatrixXd qs_;   // Q_l^m / sin th (m >= 1 only)
  Eigen::MatrixXd e1_;   // theta-theta frame component table of the
                         // traceless Hessian of Q_l^m cos(m ph)
  Eigen::MatrixXd e2_;   // theta-phihat companion table
  Eigen::MatrixXd qw_;   // q_ with theta columns scaled by the x-weights
  // Fourier tables, rows m = 0..lmax, columns phi nodes.  The *n_ variants
  // carry the basis norm (synthesis); the *w_ variants additionally carry
  // dphi (analysis).
  Eigen::MatrixXd ctn_, stn_, ctw_, stw_;

  std::array<SphereField, 3> pos_, pos_dt_, pos_dp_;

  // Fourier rows of a grid field: out(i, m) = sum_j f(i,j) * table(m,j) * dphi
  // * basis norm.  Column m of `fc` is the cosine row, of `fs` the sine row.
  void fourier_rows(const SphereField& f, Eigen::MatrixXd& fc,
                    Eigen::MatrixXd& fs) const;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

// Eigenvalue of D^2(D^2+2) on degree l: l(l+1)(l(l+1)-2).
inline double stability_eigenvalue(int l) {
  const double ll = static_cast<double>(l) * (l + 1);
  return ll * (ll - 2.0);
}

} // namespace qle
