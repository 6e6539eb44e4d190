#pragma once

#include <Eigen/Dense>

namespace qle {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

// signature (-,+,+,+)
Mat4 minkowski_metric();

double minkowski_dot(const Vec4& a, const Vec4& b);

// boost generator: eta-antisymmetric matrix mixing the time axis with w
Mat4 boost_generator(const Vec3& w);

// matrix exponential restricted to so(3,1) inputs
Mat4 lorentz_exp(const Mat4& gen);

// the boost taking e_0 to (sqrt(1+|c|^2), c); equals exp of a generator
Mat4 pure_boost(const Vec3& c);

// || L^T eta L - eta ||_max
double lorentz_defect(const Mat4& L);

// || b^T eta + eta b ||_max
double generator_defect(const Mat4& b);

} // namespace qle
