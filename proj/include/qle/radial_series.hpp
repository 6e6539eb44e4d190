#pragma once

#include <map>
#include <optional>

#include "qle/sphere.hpp"

namespace qle {

// Laurent-type expansion in the radial coordinate with sphere-field
// coefficients:  f(r) = sum_k  c_k(theta,phi) r^k.
//
// Truncation is tracked explicitly: `min_power` is the lowest power whose
// coefficient is trusted (absent coefficients above it are exactly zero).
// A series without `min_power` is exact: everything not stored is zero.
// Arithmetic propagates the trusted window conservatively, so a product
// never claims coefficients that the operands cannot support.
class RadialSeries {
 public:
  RadialSeries() = default;
  explicit RadialSeries(GridPtr grid) : grid_(std::move(grid)) {}

  static RadialSeries monomial(GridPtr grid, int power, SphereField coeff);
  static RadialSeries constant(GridPtr grid, SphereField coeff) {
    return monomial(std::move(grid), 0, std::move(coeff));
  }

  bool empty() const { return terms_.empty(); }
  bool is_exact() const { return !min_.has_value(); }
  std::optional<int> top() const;
  std::optional<int> min_power() const { return min_; }
  bool trusted(int k) const { return !min_ || k >= *min_; }

  bool has(int k) const { return terms_.count(k) > 0; }
  SphereField coeff(int k) const;
  const std::map<int, SphereField>& terms() const { return terms_; }

  SphereField eval(double r) const;

  GridPtr grid() const { return grid_; }

  RadialSeries operator+(const RadialSeries& o) const;
  RadialSeries operator-(const RadialSeries& o) const;
  RadialSeries operator-() const;
  RadialSeries operator*(double s) const;
  // pointwise scale of every coefficient by a fixed sphere field
  RadialSeries cwise(const SphereField& f) const;

  // Product with window tracking; coefficients are re-expanded onto the
  // resolved band unless `project` is false (used for frame components,
  // which are not band-limited scalars).
  RadialSeries mul(const RadialSeries& o, bool project = true) const;

  // 1/f and sqrt(f) by coefficient recursion on the subleading part.
  // `depth` is the number of orders kept below the leading one; for inexact
  // input the window is capped by the input's own relative depth.
  RadialSeries recip(int depth, bool project = true) const;
  RadialSeries sqrt(int depth, bool project = true) const;

  RadialSeries derivative_r() const;
  RadialSeries shifted(int s) const;
  RadialSeries truncated_below(int kmin) const;
  RadialSeries marked_exact() const;
  RadialSeries projected() const;

  void set_coeff(int k, SphereField f);
  void set_min_power(std::optional<int> m);

 private:
  void drop_untrusted();

  GridPtr grid_;
  std::map<int, SphereField> terms_;
  std::optional<int> min_;
};

inline RadialSeries operator*(double s, const RadialSeries& f) {
  return f * s;
}

// arcsinh(z) for a series vanishing at infinity (top power <= -1), summed
// over odd powers of z through the trusted window; `depth` bounds the
// window below z's own top when z is exact.
RadialSeries asinh_series(const RadialSeries& z, int depth);

} // namespace qle
