#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "qle/io.hpp"

namespace {

using nlohmann::ordered_json;
using namespace qle;

// configuration file referenced by QLE_CONFIG: top-level solver knobs plus
// an optional grid resolution
Config load_config_file(const std::string& path, Config base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open config file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  if (!j.is_object()) throw InputError(path + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "n_theta")
      base.n_theta = value.get<int>();
    else if (key == "depth")
      base.depth = value.get<int>();
    else if (key == "series_depth")
      base.series_depth = value.get<int>();
    else if (key == "eps_solv")
      base.eps_solv = value.get<double>();
    else if (key == "tol_route")
      base.tol_route = value.get<double>();
    else if (key == "ladder_r0")
      base.ladder_r0 = value.get<double>();
    else if (key == "ladder_count")
      base.ladder_count = value.get<int>();
    else if (key == "ladder_factor")
      base.ladder_factor = value.get<double>();
    else
      throw InputError(path + ": unknown key '" + key + "'");
  }
  return base;
}

struct Session {
  InputDocument doc;
  Config cfg;
  GridPtr grid;
  SurfaceGeometry geo;
};

// precedence: defaults < QLE_CONFIG file < input solver section < flags
Session open_session(const std::string& input, int grid_flag,
                     double tol_flag) {
  Config cfg;
  if (const char* env = std::getenv("QLE_CONFIG"))
    cfg = load_config_file(env, cfg);

  InputDocument doc = InputDocument::load(input);
  cfg = doc.apply_solver(cfg);
  if (doc.has_grid()) cfg.n_theta = doc.n_theta();
  if (grid_flag > 0) cfg.n_theta = grid_flag;
  if (tol_flag > 0.0) {
    cfg.eps_solv = tol_flag;
    cfg.tol_route = tol_flag;
  }

  GridPtr g = SphereGrid::gauss_legendre(
      cfg.n_theta, doc.has_grid() ? doc.n_phi() : 0);
  BondiData data = doc.realize(g);
  SurfaceGeometry geo(data, cfg);
  return {std::move(doc), cfg, std::move(g), std::move(geo)};
}

ordered_json report_header(const char* command, const Session& s) {
  return ordered_json{{"version", 1},
                      {"command", command},
                      {"input_hash", s.doc.hash_hex()},
                      {"config", config_to_json(s.cfg)}};
}

std::vector<double> ladder_radii(const Config& cfg) {
  std::vector<double> radii;
  double r = cfg.ladder_r0;
  for (int i = 0; i < cfg.ladder_count; ++i, r *= cfg.ladder_factor)
    radii.push_back(r);
  return radii;
}

ordered_json cmd_momentum(const Session& s) {
  ordered_json rep = report_header("momentum", s);
  rep["momentum"] = momentum_to_json(bondi_four_momentum(s.geo, s.cfg));
  rep["image_route"] = momentum_to_json(image_route_momentum(s.geo, s.cfg));
  return rep;
}

ordered_json cmd_energy(const Session& s, const Vec3& a) {
  const EmbeddingSeries emb =
      EmbeddingSeries::reference(s.geo, {}, s.cfg.depth + 2);
  const EnergyEvaluator ev(s.geo, emb, s.cfg);
  const Vec4 T0 = observer(a);

  ordered_json rep = report_header("energy", s);
  rep["observer"] = {a(0), a(1), a(2)};
  ordered_json ladder = ordered_json::array();
  for (double r : ladder_radii(s.cfg))
    ladder.push_back({r, ev.at_radius(r, T0)});
  rep["ladder"] = ladder;

  double fit_res = 0.0;
  rep["limit"] = ev.limit(T0, &fit_res);
  rep["fit_residual"] = fit_res;

  const EnergyMomentum P = bondi_four_momentum(s.geo, s.cfg);
  // the limit is linear in T0 with components (e, p) in the (T0^0, a) basis
  rep["pairing"] = P.e * T0(0) + P.p.dot(a);
  return rep;
}

ordered_json cmd_optimal(const Session& s) {
  const OptimalSolver solver(s.geo, s.cfg);
  const OptimalSolution sol = solver.solve();

  ordered_json rep = report_header("optimal", s);
  rep["solution"] = solution_to_json(sol);
  ordered_json ladder = ordered_json::array();
  for (double r : ladder_radii(s.cfg))
    ladder.push_back(
        {r, solver.residual_at_radius(sol, r).abs().maxCoeff()});
  rep["residual_ladder"] = ladder;
  rep["decay_exponent"] = solver.decay_exponent(sol);
  return rep;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw InputError(out_path + ": cannot open output file");
  out << text;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"energy-momentum of radiative surface families at large radius"};
  app.require_subcommand(1);

  int grid_flag = 0;
  double tol_flag = 0.0;
  std::string out_path;
  std::string format = "text";
  app.add_option("--grid", grid_flag, "colatitude nodes (overrides input)");
  app.add_option("--tol", tol_flag, "solver and route tolerance override");
  app.add_option("--out", out_path, "write the report to this path");
  app.add_option("--format", format, "report format")
      ->check(CLI::IsMember({"text", "structured"}));

  std::string in_momentum, in_energy, in_optimal, in_verify;
  std::vector<double> observer_flag;
  int depth_flag = -1;

  CLI::App* momentum =
      app.add_subcommand("momentum", "energy-momentum by both routes");
  momentum->add_option("input", in_momentum, "input document")->required();

  CLI::App* energy =
      app.add_subcommand("energy", "observer energy along the radius ladder");
  energy->add_option("input", in_energy, "input document")->required();
  energy
      ->add_option("--observer", observer_flag,
                   "observer velocity a1,a2,a3 (overrides input)")
      ->delimiter(',')
      ->expected(3);

  CLI::App* optimal =
      app.add_subcommand("optimal", "solve for the optimal observer");
  optimal->add_option("input", in_optimal, "input document")->required();
  optimal->add_option("--depth", depth_flag, "correction orders to solve");

  CLI::App* verify =
      app.add_subcommand("verify", "run the invariant suite on the input");
  verify->add_option("input", in_verify, "input document")->required();

  // global flags may also follow the subcommand name
  for (CLI::App* sub : {momentum, energy, optimal, verify})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    ordered_json rep;
    bool checks_passed = true;

    if (momentum->parsed()) {
      rep = cmd_momentum(open_session(in_momentum, grid_flag, tol_flag));
    } else if (energy->parsed()) {
      Session s = open_session(in_energy, grid_flag, tol_flag);
      Vec3 a = Vec3::Zero();
      if (observer_flag.size() == 3)
        a = Vec3(observer_flag[0], observer_flag[1], observer_flag[2]);
      else if (auto doc_obs = s.doc.observer())
        a = *doc_obs;
      rep = cmd_energy(s, a);
    } else if (optimal->parsed()) {
      Session s = open_session(in_optimal, grid_flag, tol_flag);
      if (depth_flag >= 0) {
        s.cfg.depth = depth_flag;
        rep = cmd_optimal(Session{std::move(s.doc), s.cfg, s.grid,
                                  SurfaceGeometry(s.geo.data(), s.cfg)});
      } else {
        rep = cmd_optimal(s);
      }
    } else {
      Session s = open_session(in_verify, grid_flag, tol_flag);
      const std::vector<CheckResult> checks = run_verification(s.geo, s.cfg);
      checks_passed = all_passed(checks);
      rep = report_header("verify", s);
      rep["checks"] = checks_to_json(checks);
      rep["all_passed"] = checks_passed;
      if (format == "text") {
        std::string text;
        for (const CheckResult& c : checks)
          text += format_check_line(c) + "\n";
        text += std::string("verification = ") +
                (checks_passed ? "PASS" : "FAIL") + "\n";
        emit(text, out_path);
        return checks_passed ? 0 : 1;
      }
    }

    emit(format == "structured" ? rep.dump(2) + "\n" : render_text(rep),
         out_path);
    return checks_passed ? 0 : 1;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const GridError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "check failure: " << e.what() << "\n";
    return 1;
  }
}
