#pragma once

#include <string>
#include <vector>

#include "qle/optimal.hpp"

namespace qle {

// One named invariant check: `pass` is authoritative; measured and tolerance
// are diagnostic (positivity checks require measured > tolerance instead of
// the usual measured <= tolerance).
struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note; // failure context, empty on success
};

std::string format_check_line(const CheckResult& c);
bool all_passed(const std::vector<CheckResult>& checks);

// |H0| of the image family at a finite radius, by grid differentiation of
// the evaluated embedding components (cross-validates the series route).
SphereField image_curvature_at(const SurfaceGeometry& geo,
                               const EmbeddingSeries& emb, double r);

// Invariant suite over one data set: energy routes, metric gauge, embedding
// defects, image cone rate, series-vs-grid curvature, optimal-solve
// cancellations and the second-variation forms.
std::vector<CheckResult> run_verification(const SurfaceGeometry& geo,
                                          const Config& cfg);

} // namespace qle
