#include "qle/lorentz.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "qle/config.hpp"

namespace qle {

Mat4 minkowski_metric() {
  Mat4 eta = Mat4::Identity();
  eta(0, 0) = -1.0;
  return eta;
}

double minkowski_dot(const Vec4& a, const Vec4& b) {
  return -a[0] * b[0] + a.tail<3>().dot(b.tail<3>());
}

Mat4 boost_generator(const Vec3& w) {
  Mat4 k = Mat4::Zero();
  for (int i = 0; i < 3; ++i) {
    k(0, i + 1) = w[i];
    k(i + 1, 0) = w[i];
  }
  return k;
}

Mat4 lorentz_exp(const Mat4& gen) {
  if (generator_defect(gen) > 1e-12)
    throw InputError("matrix is not in the Lorentz Lie algebra");
  return gen.exp();
}

Mat4 pure_boost(const Vec3& c) {
  const double gamma = std::sqrt(1.0 + c.squaredNorm());
  Mat4 b = Mat4::Identity();
  b(0, 0) = gamma;
  for (int i = 0; i < 3; ++i) {
    b(0, i + 1) = b(i + 1, 0) = c[i];
    for (int j = 0; j < 3; ++j) b(i + 1, j + 1) += c[i] * c[j] / (1.0 + gamma);
  }
  return b;
}

double lorentz_defect(const Mat4& L) {
  const Mat4 eta = minkowski_metric();
  return (L.transpose() * eta * L - eta).cwiseAbs().maxCoeff();
}

double generator_defect(const Mat4& b) {
  const Mat4 eta = minkowski_metric();
  return (b.transpose() * eta + eta * b).cwiseAbs().maxCoeff();
}

} // namespace qle
