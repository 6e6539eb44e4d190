#include "qle/sphere.hpp"

#include <cmath>
#include <numbers>

namespace qle {

namespace {

constexpr double pi = std::numbers::pi;

// Gauss-Legendre nodes and weights on [-1,1] by Newton iteration on P_n.
void gauss_nodes(int n, Eigen::ArrayXd& x, Eigen::ArrayXd& w) {
  x.resize(n);
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    double t = std::cos(pi * (k + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int l = 2; l <= n; ++l) {
        double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int l = 2; l <= n; ++l) {
      double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[k] = t;
    w[k] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  // Newton guesses walk from +1 down; store ascending in x.
  x.reverseInPlace();
  w.reverseInPlace();
}

} // namespace

std::shared_ptr<const SphereGrid> SphereGrid::gauss_legendre(int n_theta,
                                                             int n_phi) {
  if (n_phi <= 0) n_phi = 2 * n_theta;
  if (n_theta < 2) throw GridError("grid needs at least 2 colatitude nodes");
  if (n_phi < 2 * (n_theta - 1) + 1)
    throw GridError("n_phi too small for exact transforms at this n_theta");
  return std::shared_ptr<const SphereGrid>(new SphereGrid(n_theta, n_phi));
}

SphereGrid::SphereGrid(int n_theta, int n_phi) : nth_(n_theta), nph_(n_phi) {
  const int L = lmax();
  gauss_nodes(nth_, xs_, wx_);
  dphi_ = 2.0 * pi / nph_;

  theta_.resize(nth_);
  for (int i = 0; i < nth_; ++i) theta_[i] = std::acos(xs_[i]);
  phi_.resize(nph_);
  for (int j = 0; j < nph_; ++j) phi_[j] = dphi_ * j;

  w_.resize(size());
  sin_.resize(size());
  cos_.resize(size());
  for (int i = 0; i < nth_; ++i) {
    const double s = std::sin(theta_[i]);
    for (int j = 0; j < nph_; ++j) {
      w_[i * nph_ + j] = wx_[i] * dphi_;
      sin_[i * nph_ + j] = s;
      cos_[i * nph_ + j] = xs_[i];
    }
  }

  // Normalized associated Legendre tables (no Condon-Shortley phase),
  // int_{-1}^{1} Q_l^m(x)^2 dx = 1, by the stable m-diagonal recurrences.
  const int rows = plm_index(L, L) + 1;
  q_.setZero(rows, nth_);
  dq_.setZero(rows, nth_);
  qs_.setZero(rows, nth_);
  e1_.setZero(rows, nth_);
  e2_.setZero(rows, nth_);
  for (int i = 0; i < nth_; ++i) {
    const double x = xs_[i];
    const double s = std::sin(theta_[i]);
    const double cot = x / s;
    for (int m = 0; m <= L; ++m) {
      // seed Q_m^m
      double qmm = std::sqrt(0.5);
      for (int k = 1; k <= m; ++k)
        qmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
      double prev = 0.0, cur = qmm;
      for (int l = m; l <= L; ++l) {
        q_(plm_index(l, m), i) = cur;
        double next = 0.0;
        if (l == m) {
          next = std::sqrt(2.0 * m + 3.0) * x * cur;
        } else if (l < L) {
          const double a =
              std::sqrt((4.0 * l * l + 8.0 * l + 3.0) /
                        (static_cast<double>(l + 1 - m) * (l + 1 + m)));
          const double b = std::sqrt(
              (static_cast<double>(l - m) * (l + m)) / (4.0 * l * l - 1.0));
          next = a * (x * cur - b * prev);
        }
        prev = cur;
        cur = next;
      }
    }
    for (int m = 0; m <= L; ++m) {
      for (int l = m; l <= L; ++l) {
        const int r = plm_index(l, m);
        const double Q = q_(r, i);
        const double Qm1 = (l - 1 >= m) ? q_(plm_index(l - 1, m), i) : 0.0;
        const double rl =
            (l > m)
                ? std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) *
                            (static_cast<double>(l - m) * (l + m)))
                : 0.0;
        const double dQ = (l * x * Q - rl * Qm1) / s;
        dq_(r, i) = dQ;
        if (m >= 1) qs_(r, i) = Q / s;
        e1_(r, i) = -0.5 * l * (l + 1.0) * Q - cot * dQ +
                    static_cast<double>(m) * m * Q / (s * s);
        e2_(r, i) = m * (dQ - cot * Q) / s;
      }
    }
  }
  qw_ = q_;
  for (int i = 0; i < nth_; ++i) qw_.col(i) *= wx_[i];

  // Fourier tables.  Norms: 1/sqrt(2pi) for m = 0, 1/sqrt(pi) otherwise.
  ctn_.setZero(L + 1, nph_);
  stn_.setZero(L + 1, nph_);
  for (int m = 0; m <= L; ++m) {
    const double nrm = (m == 0) ? 1.0 / std::sqrt(2.0 * pi)
                                : 1.0 / std::sqrt(pi);
    for (int j = 0; j < nph_; ++j) {
      ctn_(m, j) = nrm * std::cos(m * phi_[j]);
      stn_(m, j) = nrm * std::sin(m * phi_[j]);
    }
  }
  ctw_ = ctn_ * dphi_;
  stw_ = stn_ * dphi_;

  for (auto* a : {&pos_, &pos_dt_, &pos_dp_})
    for (auto& f : *a) f.resize(size());
  for (int i = 0; i < nth_; ++i) {
    const double s = std::sin(theta_[i]), c = xs_[i];
    for (int j = 0; j < nph_; ++j) {
      const double sp = std::sin(phi_[j]), cp = std::cos(phi_[j]);
      const int k = i * nph_ + j;
      pos_[0][k] = s * sp;
      pos_[1][k] = s * cp;
      pos_[2][k] = c;
      pos_dt_[0][k] = c * sp;
      pos_dt_[1][k] = c * cp;
      pos_dt_[2][k] = -s;
      pos_dp_[0][k] = cp;
      pos_dp_[1][k] = -sp;
      pos_dp_[2][k] = 0.0;
    }
  }
}

void SphereGrid::fourier_rows(const SphereField& f, Eigen::MatrixXd& fc,
                              Eigen::MatrixXd& fs) const {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      F(f.data(), nth_, nph_);
  fc.noalias() = F * ctw_.transpose();
  fs.noalias() = F * stw_.transpose();
}

HarmonicSpectrum SphereGrid::analyze(const SphereField& f) const {
  const int L = lmax();
  Eigen::MatrixXd fc, fs;
  fourier_rows(f, fc, fs);
  HarmonicSpectrum c(spectrum_size());
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      const auto row = qw_.row(plm_index(l, m));
      c[sh_index(l, m)] = row.dot(fc.col(m));
      if (m > 0) c[sh_index(l, -m)] = row.dot(fs.col(m));
    }
  }
  return c;
}

SphereField SphereGrid::synthesize(const HarmonicSpectrum& c) const {
  const int L = lmax();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nth_, L + 1);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nth_, L + 1);
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      const auto row = q_.row(plm_index(l, m));
      A.col(m) += c[sh_index(l, m)] * row.transpose();
      if (m > 0) B.col(m) += c[sh_index(l, -m)] * row.transpose();
    }
  }
  Eigen::MatrixXd F = A * ctn_ + B * stn_;
  SphereField out(size());
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>(out.data(), nth_, nph_) = F;
  return out;
}

HarmonicSpectrum SphereGrid::laplacian(const HarmonicSpectrum& c) const {
  HarmonicSpectrum out(c.size());
  for (int l = 0; l <= lmax(); ++l)
    for (int m = -l; m <= l; ++m)
      out[sh_index(l, m)] = -static_cast<double>(l) * (l + 1) *
                            c[sh_index(l, m)];
  return out;
}

FramePair SphereGrid::gradient(const HarmonicSpectrum& c) const {
  const int L = lmax();
  Eigen::MatrixXd At = Eigen::MatrixXd::Zero(nth_, L + 1);
  Eigen::MatrixXd Bt = Eigen::MatrixXd::Zero(nth_, L + 1);
  Eigen::MatrixXd Ap = Eigen::MatrixXd::Zero(nth_, L + 1);
  Eigen::MatrixXd Bp = Eigen::MatrixXd::Zero(nth_, L + 1);
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      const int r = plm_index(l, m);
      At.col(m) += c[sh_index(l, m)] * dq_.row(r).transpose();
      if (m > 0) {
        Bt.col(m) += c[sh_index(l, -m)] * dq_.row(r).transpose();
        // d_ph/sin th: cosine modes feed sine rows and vice versa
        Bp.col(m) -= m * c[sh_index(l, m)] * qs_.row(r).transpose();
        Ap.col(m) += m * c[sh_index(l, -m)] * qs_.row(r).transpose();
      }
    }
  }
  Eigen::MatrixXd Ft = At * ctn_ + Bt * stn_;
  Eigen::MatrixXd Fp = Ap * ctn_ + Bp * stn_;
  FramePair g{SphereField(size()), SphereField(size())};
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>(g.t.data(), nth_, nph_) = Ft;
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>(g.p.data(), nth_, nph_) = Fp;
  return g;
}

HarmonicSpectrum SphereGrid::divergence(const FramePair& v) const {
  const int L = lmax();
  Eigen::MatrixXd v1c, v1s, v2c, v2s;
  fourier_rows(v.t, v1c, v1s);
  fourier_rows(v.p, v2c, v2s);
  // weak form: c_A = -int v . grad Y_A; the x-weights live in qw_ tables
  // via dq = dq_ and qs = qs_ against raw wx, so assemble with wx explicitly.
  HarmonicSpectrum c = HarmonicSpectrum::Zero(spectrum_size());
  Eigen::ArrayXd wx = wx_;
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      const int r = plm_index(l, m);
      const Eigen::ArrayXd dqw = dq_.row(r).transpose().array() * wx;
      c[sh_index(l, m)] = -(dqw * v1c.col(m).array()).sum();
      if (m > 0) {
        const Eigen::ArrayXd qsw = qs_.row(r).transpose().array() * wx;
        c[sh_index(l, m)] += m * (qsw * v2s.col(m).array()).sum();
        c[sh_index(l, -m)] = -(dqw * v1s.col(m).array()).sum() -
                             m * (qsw * v2c.col(m).array()).sum();
      }
    }
  }
  return c;
}

FramePair SphereGrid::traceless_hessian(const HarmonicSpectrum& u) const {
  const int L = lmax();
  Eigen::MatrixXd A1 = Eigen::MatrixXd::Zero(nth_, L + 1);
  Eigen::MatrixXd B1 = Eigen::MatrixXd::Zero(nth_, L + 1);
  Eigen::MatrixXd A2 = Eigen::MatrixXd::Zero(nth_, L + 1);
  Eigen::MatrixXd B2 = Eigen::MatrixXd::Zero(nth_, L + 1);
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      const int r = plm_index(l, m);
      A1.col(m) += u[sh_index(l, m)] * e1_.row(r).transpose();
      if (m > 0) {
        B1.col(m) += u[sh_index(l, -m)] * e1_.row(r).transpose();
        B2.col(m) -= u[sh_index(l, m)] * e2_.row(r).transpose();
        A2.col(m) += u[sh_index(l, -m)] * e2_.row(r).transpose();
      }
    }
  }
  Eigen::MatrixXd F1 = A1 * ctn_ + B1 * stn_;
  Eigen::MatrixXd F2 = A2 * ctn_ + B2 * stn_;
  FramePair T{SphereField(size()), SphereField(size())};
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>(T.t.data(), nth_, nph_) = F1;
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>(T.p.data(), nth_, nph_) = F2;
  return T;
}

std::pair<HarmonicSpectrum, HarmonicSpectrum> SphereGrid::tensor_potentials(
    const FramePair& T) const {
  const int L = lmax();
  Eigen::MatrixXd t1c, t1s, t2c, t2s;
  fourier_rows(T.t, t1c, t1s);
  fourier_rows(T.p, t2c, t2s);
  HarmonicSpectrum u = HarmonicSpectrum::Zero(spectrum_size());
  HarmonicSpectrum v = HarmonicSpectrum::Zero(spectrum_size());
  Eigen::ArrayXd wx = wx_;
  for (int l = 2; l <= L; ++l) {
    const double inv = 2.0 / stability_eigenvalue(l);
    for (int m = 0; m <= l; ++m) {
      const int r = plm_index(l, m);
      const Eigen::ArrayXd e1w = e1_.row(r).transpose().array() * wx;
      const Eigen::ArrayXd e2w = e2_.row(r).transpose().array() * wx;
      double cE = 2.0 * ((e1w * t1c.col(m).array()).sum() -
                         (e2w * t2s.col(m).array()).sum());
      double cB = 2.0 * (-(e2w * t1s.col(m).array()).sum() -
                         (e1w * t2c.col(m).array()).sum());
      u[sh_index(l, m)] = inv * cE;
      v[sh_index(l, m)] = inv * cB;
      if (m > 0) {
        double cEs = 2.0 * ((e1w * t1s.col(m).array()).sum() +
                            (e2w * t2c.col(m).array()).sum());
        double cBs = 2.0 * ((e2w * t1c.col(m).array()).sum() -
                            (e1w * t2s.col(m).array()).sum());
        u[sh_index(l, -m)] = inv * cEs;
        v[sh_index(l, -m)] = inv * cBs;
      }
    }
  }
  return {u, v};
}

HarmonicSpectrum SphereGrid::solve_stability(const HarmonicSpectrum& rhs,
                                             double eps) const {
  const double scale = std::max(1.0, rhs.norm());
  const double mono = std::abs(rhs[0]);
  const double dip = rhs.segment(1, 3).norm();
  if (mono > eps * scale || dip > eps * scale)
    throw SolvabilityError("stability solve obstructed by low modes", mono,
                           dip);
  HarmonicSpectrum u = HarmonicSpectrum::Zero(rhs.size());
  for (int l = 2; l <= lmax(); ++l)
    for (int m = -l; m <= l; ++m)
      u[sh_index(l, m)] = rhs[sh_index(l, m)] / stability_eigenvalue(l);
  return u;
}

} // namespace qle
