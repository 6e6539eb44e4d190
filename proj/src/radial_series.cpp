#include "qle/radial_series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace qle {

namespace {

// Highest power at which an operand can contribute anything, including its
// untrusted tail; nullopt means the operand is exactly zero.
std::optional<int> top_effective(const RadialSeries& s) {
  if (!s.empty()) return *s.top();
  if (!s.is_exact()) return *s.min_power() - 1;
  return std::nullopt;
}

} // namespace

RadialSeries RadialSeries::monomial(GridPtr grid, int power,
                                    SphereField coeff) {
  RadialSeries s(grid);
  s.terms_[power] = std::move(coeff);
  return s;
}

std::optional<int> RadialSeries::top() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.rbegin()->first;
}

SphereField RadialSeries::coeff(int k) const {
  auto it = terms_.find(k);
  if (it != terms_.end()) return it->second;
  return SphereField::Zero(grid_ ? grid_->size() : 0);
}

SphereField RadialSeries::eval(double r) const {
  SphereField out = SphereField::Zero(grid_ ? grid_->size() : 0);
  for (const auto& [k, f] : terms_) out += f * std::pow(r, k);
  return out;
}

void RadialSeries::drop_untrusted() {
  if (!min_) return;
  for (auto it = terms_.begin(); it != terms_.end();)
    it = (it->first < *min_) ? terms_.erase(it) : std::next(it);
}

RadialSeries RadialSeries::operator+(const RadialSeries& o) const {
  RadialSeries out(grid_ ? grid_ : o.grid_);
  out.terms_ = terms_;
  for (const auto& [k, f] : o.terms_) {
    auto it = out.terms_.find(k);
    if (it == out.terms_.end())
      out.terms_[k] = f;
    else
      it->second += f;
  }
  if (min_ || o.min_) {
    int m = std::numeric_limits<int>::min();
    if (min_) m = std::max(m, *min_);
    if (o.min_) m = std::max(m, *o.min_);
    out.min_ = m;
    out.drop_untrusted();
  }
  return out;
}

RadialSeries RadialSeries::operator-() const {
  RadialSeries out = *this;
  for (auto& [k, f] : out.terms_) f = -f;
  return out;
}

RadialSeries RadialSeries::operator-(const RadialSeries& o) const {
  return *this + (-o);
}

RadialSeries RadialSeries::operator*(double s) const {
  RadialSeries out = *this;
  for (auto& [k, f] : out.terms_) f *= s;
  return out;
}

RadialSeries RadialSeries::cwise(const SphereField& g) const {
  RadialSeries out = *this;
  for (auto& [k, f] : out.terms_) f *= g;
  return out;
}

RadialSeries RadialSeries::mul(const RadialSeries& o, bool project) const {
  GridPtr g = grid_ ? grid_ : o.grid_;
  // an exactly-zero factor annihilates everything, even untrusted tails
  if ((empty() && is_exact()) || (o.empty() && o.is_exact()))
    return RadialSeries(g);

  RadialSeries out(g);
  std::optional<int> rmin;
  auto consider = [&rmin](const RadialSeries& a, const RadialSeries& b) {
    if (a.is_exact()) return;
    int cand = *a.min_power() + *top_effective(b);
    rmin = rmin ? std::max(*rmin, cand) : cand;
  };
  consider(*this, o);
  consider(o, *this);
  out.min_ = rmin;

  for (const auto& [ka, fa] : terms_) {
    for (const auto& [kb, fb] : o.terms_) {
      const int k = ka + kb;
      if (rmin && k < *rmin) continue;
      auto it = out.terms_.find(k);
      if (it == out.terms_.end())
        out.terms_[k] = fa * fb;
      else
        it->second += fa * fb;
    }
  }
  if (project) {
    for (auto& [k, f] : out.terms_) f = g->project(f);
  }
  return out;
}

RadialSeries RadialSeries::recip(int depth, bool project) const {
  if (empty()) throw ConsistencyError("reciprocal of a vanishing series");
  const int p = *top();
  const SphereField lead = coeff(p);
  if (lead.abs().minCoeff() <= 0.0)
    throw ConsistencyError("reciprocal of a series with vanishing leading term");
  const SphereField inv_lead = 1.0 / lead;

  if (is_exact() && terms_.size() == 1) {
    return monomial(grid_, -p, inv_lead); // exact
  }
  const int J = is_exact() ? depth : std::min(depth, p - *min_);
  RadialSeries out(grid_);
  std::vector<SphereField> d(J + 1);
  d[0] = project ? grid_->project(inv_lead) : inv_lead;
  for (int k = 1; k <= J; ++k) {
    SphereField acc = SphereField::Zero(grid_->size());
    for (int j = 1; j <= k; ++j) acc += coeff(p - j) * d[k - j];
    SphereField dk = -inv_lead * acc;
    d[k] = project ? grid_->project(dk) : dk;
  }
  for (int k = 0; k <= J; ++k) out.terms_[-p - k] = d[k];
  out.min_ = -p - J;
  return out;
}

RadialSeries RadialSeries::sqrt(int depth, bool project) const {
  if (empty()) throw ConsistencyError("sqrt of a vanishing series");
  const int p = *top();
  if (p % 2 != 0)
    throw ConsistencyError("sqrt of a series with odd leading power");
  const SphereField lead = coeff(p);
  if (lead.minCoeff() <= 0.0)
    throw ConsistencyError("sqrt of a series with non-positive leading term");
  const SphereField s0 = lead.sqrt();

  if (is_exact() && terms_.size() == 1) {
    return monomial(grid_, p / 2, s0); // exact
  }
  const int J = is_exact() ? depth : std::min(depth, p - *min_);
  RadialSeries out(grid_);
  std::vector<SphereField> s(J + 1);
  s[0] = project ? grid_->project(s0) : s0;
  for (int k = 1; k <= J; ++k) {
    SphereField acc = coeff(p - k);
    for (int j = 1; j < k; ++j) acc -= s[j] * s[k - j];
    SphereField sk = acc / (2.0 * s0);
    s[k] = project ? grid_->project(sk) : sk;
  }
  for (int k = 0; k <= J; ++k) out.terms_[p / 2 - k] = s[k];
  out.min_ = p / 2 - J;
  return out;
}

RadialSeries RadialSeries::derivative_r() const {
  RadialSeries out(grid_);
  for (const auto& [k, f] : terms_)
    if (k != 0) out.terms_[k - 1] = static_cast<double>(k) * f;
  if (min_) out.min_ = *min_ - 1;
  return out;
}

RadialSeries RadialSeries::shifted(int s) const {
  RadialSeries out(grid_);
  for (const auto& [k, f] : terms_) out.terms_[k + s] = f;
  if (min_) out.min_ = *min_ + s;
  return out;
}

RadialSeries RadialSeries::truncated_below(int kmin) const {
  RadialSeries out = *this;
  bool dropped = false;
  for (auto it = out.terms_.begin(); it != out.terms_.end();) {
    if (it->first < kmin) {
      it = out.terms_.erase(it);
      dropped = true;
    } else {
      ++it;
    }
  }
  if (out.min_)
    out.min_ = std::max(*out.min_, kmin);
  else if (dropped)
    out.min_ = kmin;
  return out;
}

RadialSeries RadialSeries::marked_exact() const {
  RadialSeries out = *this;
  out.min_.reset();
  return out;
}

RadialSeries RadialSeries::projected() const {
  RadialSeries out = *this;
  for (auto& [k, f] : out.terms_) f = grid_->project(f);
  return out;
}

void RadialSeries::set_coeff(int k, SphereField f) {
  if (min_ && k < *min_)
    throw ConsistencyError("assigning a coefficient below the trusted window");
  terms_[k] = std::move(f);
}

void RadialSeries::set_min_power(std::optional<int> m) {
  min_ = m;
  drop_untrusted();
}

RadialSeries asinh_series(const RadialSeries& z, int depth) {
  if (z.empty()) {
    RadialSeries out(z.grid());
    out.set_min_power(z.min_power());
    return out;
  }
  const int p = *z.top();
  if (p > -1)
    throw ConsistencyError("arcsinh expansion needs an argument vanishing at infinity");
  const int rmin = z.is_exact() ? p - depth : *z.min_power();

  RadialSeries out(z.grid());
  RadialSeries zp = z.truncated_below(rmin);
  double a = 1.0;
  int n = 0;
  while (!zp.empty() && *zp.top() >= rmin) {
    out = out + zp * a;
    ++n;
    a *= -((2.0 * n - 1.0) / (2.0 * n)) * ((2.0 * n - 1.0) / (2.0 * n + 1.0));
    zp = zp.mul(z).mul(z).truncated_below(rmin);
  }
  out.set_min_power(rmin);
  return out;
}

} // namespace qle
