#pragma once

#include <stdexcept>
#include <string>

namespace qle {

// Runtime knobs shared by the solver, the verification runner and the CLI.
struct Config {
  int n_theta = 32;         // colatitude nodes; n_phi defaults to 2*n_theta
  int series_depth = 8;     // trusted window of inverse-radius powers below leading
  int depth = 2;            // correction orders solved beyond the leading observer
  double eps_solv = 1e-8;   // admissible low-mode residual in solvability checks
  double tol_route = 1e-8;  // required agreement between independent energy routes
  double ladder_r0 = 100.0; // innermost radius of the evaluation ladder
  int ladder_count = 5;     // number of ladder radii
  double ladder_factor = 2.0;
};

struct GridError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Energy-momentum fails the timelike condition: no optimal observer exists.
struct NotTimelikeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A linear solve hit an obstruction in the kernel modes of the stability
// operator: the low harmonics of the right-hand side did not cancel.
struct SolvabilityError : std::runtime_error {
  SolvabilityError(const std::string& what, double mono, double dip)
      : std::runtime_error(what), monopole(mono), dipole(dip) {}
  double monopole = 0.0; // magnitude of the degree-0 obstruction
  double dipole = 0.0;   // magnitude of the degree-1 obstruction
};

// Two supposedly equivalent internal computations disagreed.
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace qle
