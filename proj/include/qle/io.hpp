#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qle/verify.hpp"

namespace qle {

// Structured input document (schema version 1): grid block, the radiative
// fields as constants / node samples / harmonic triples, an optional
// observer, and solver overrides.  Validation is strict: unknown keys and
// double representations are rejected with their location.
class InputDocument {
 public:
  static InputDocument load(const std::string& path);
  static InputDocument from_text(const std::string& text,
                                 const std::string& origin = "<memory>");

  int version() const;
  bool has_grid() const;
  int n_theta() const; // 0 when unspecified
  int n_phi() const;
  std::optional<Vec3> observer() const;

  // overlay of the document's solver section onto a base configuration
  Config apply_solver(Config base) const;

  // synthesize the fields onto the grid; validates shapes and band limits
  BondiData realize(const GridPtr& g) const;

  std::uint64_t hash() const { return hash_; }
  std::string hash_hex() const;

 private:
  nlohmann::json doc_;
  std::string origin_;
  std::uint64_t hash_ = 0;
};

// report fragments (deterministic key order)
nlohmann::ordered_json config_to_json(const Config& cfg);
nlohmann::ordered_json momentum_to_json(const EnergyMomentum& P);
nlohmann::ordered_json checks_to_json(const std::vector<CheckResult>& checks);

// solved data of an optimal solution; spectra are sparse (l, m, value)
// triples above the cut
nlohmann::ordered_json solution_to_json(const OptimalSolution& sol,
                                        double cut = 1e-14);
std::pair<BoostChain, std::vector<SphereField>> solution_from_json(
    const nlohmann::json& j, const GridPtr& g);

// flat deterministic "path = value" rendering of a report tree
std::string render_text(const nlohmann::ordered_json& rep);

} // namespace qle
