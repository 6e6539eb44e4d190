#include "qle/io.hpp"

#include <fstream>
#include <sstream>

namespace qle {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(where, "unknown key '" + key + "'");
  }
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

// one of {constant, grid, harmonics}, synthesized onto the grid
SphereField scalar_field(const json& j, const GridPtr& g,
                         const std::string& where) {
  require_keys(j, where, {"constant", "grid", "harmonics"});
  if (j.size() != 1)
    fail(where, "exactly one of constant/grid/harmonics required");

  if (j.contains("constant"))
    return SphereField::Constant(
        g->size(), number_at(j["constant"], where + ".constant"));

  if (j.contains("grid")) {
    const json& arr = j["grid"];
    if (!arr.is_array() || static_cast<int>(arr.size()) != g->size())
      fail(where + ".grid", "expected " + std::to_string(g->size()) +
                                " node samples (theta-major)");
    SphereField f(g->size());
    for (int i = 0; i < g->size(); ++i)
      f(i) = number_at(arr[i], where + ".grid[" + std::to_string(i) + "]");
    return f;
  }

  const json& arr = j["harmonics"];
  if (!arr.is_array()) fail(where + ".harmonics", "expected an array");
  HarmonicSpectrum c = HarmonicSpectrum::Zero(g->spectrum_size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = where + ".harmonics[" + std::to_string(i) + "]";
    const json& t = arr[i];
    if (!t.is_array() || t.size() != 3)
      fail(at, "expected a (degree, order, value) triple");
    if (!t[0].is_number_integer() || !t[1].is_number_integer())
      fail(at, "degree and order must be integers");
    const int l = t[0].get<int>();
    const int m = t[1].get<int>();
    if (l < 0 || std::abs(m) > l) fail(at, "invalid (degree, order)");
    if (l > g->lmax())
      fail(at, "degree " + std::to_string(l) + " exceeds the band limit " +
                   std::to_string(g->lmax()));
    c(sh_index(l, m)) += number_at(t[2], at);
  }
  return g->synthesize(c);
}

} // namespace

InputDocument InputDocument::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open input file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str(), path);
}

InputDocument InputDocument::from_text(const std::string& text,
                                       const std::string& origin) {
  InputDocument doc;
  doc.origin_ = origin;
  doc.hash_ = fnv1a(text);
  try {
    doc.doc_ = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": " + e.what());
  }

  const json& j = doc.doc_;
  require_keys(j, origin,
               {"version", "grid", "fields", "observer", "solver"});
  if (!j.contains("version") || !j["version"].is_number_integer())
    fail(origin, "missing integer 'version'");
  if (j["version"].get<int>() != 1)
    fail(origin, "unsupported schema version");
  if (!j.contains("fields")) fail(origin, "missing 'fields'");

  if (j.contains("grid")) {
    require_keys(j["grid"], origin + ".grid", {"n_theta", "n_phi"});
    if (!j["grid"].contains("n_theta"))
      fail(origin + ".grid", "missing n_theta");
  }
  require_keys(j["fields"], origin + ".fields",
               {"m", "X", "Y", "shear_potentials", "W", "retarded_time"});
  if (!j["fields"].contains("m")) fail(origin + ".fields", "missing m");
  if (j.contains("observer")) {
    const json& o = j["observer"];
    if (!o.is_array() || o.size() != 3)
      fail(origin + ".observer", "expected three velocity components");
  }
  if (j.contains("solver"))
    require_keys(j["solver"], origin + ".solver",
                 {"depth", "series_depth", "eps_solv", "tol_route", "ladder"});
  return doc;
}

int InputDocument::version() const { return doc_["version"].get<int>(); }

bool InputDocument::has_grid() const { return doc_.contains("grid"); }

int InputDocument::n_theta() const {
  return has_grid() ? doc_["grid"]["n_theta"].get<int>() : 0;
}

int InputDocument::n_phi() const {
  return has_grid() && doc_["grid"].contains("n_phi")
             ? doc_["grid"]["n_phi"].get<int>()
             : 0;
}

std::optional<Vec3> InputDocument::observer() const {
  if (!doc_.contains("observer")) return std::nullopt;
  const json& o = doc_["observer"];
  return Vec3(number_at(o[0], origin_ + ".observer"),
              number_at(o[1], origin_ + ".observer"),
              number_at(o[2], origin_ + ".observer"));
}

Config InputDocument::apply_solver(Config base) const {
  if (!doc_.contains("solver")) return base;
  const json& s = doc_["solver"];
  if (s.contains("depth")) base.depth = s["depth"].get<int>();
  if (s.contains("series_depth"))
    base.series_depth = s["series_depth"].get<int>();
  if (s.contains("eps_solv")) base.eps_solv = s["eps_solv"].get<double>();
  if (s.contains("tol_route")) base.tol_route = s["tol_route"].get<double>();
  if (s.contains("ladder")) {
    const json& l = s["ladder"];
    require_keys(l, origin_ + ".solver.ladder", {"r0", "count", "factor"});
    if (l.contains("r0")) base.ladder_r0 = l["r0"].get<double>();
    if (l.contains("count")) base.ladder_count = l["count"].get<int>();
    if (l.contains("factor")) base.ladder_factor = l["factor"].get<double>();
  }
  return base;
}

BondiData InputDocument::realize(const GridPtr& g) const {
  const json& f = doc_["fields"];
  const std::string where = origin_ + ".fields";

  BondiData d = BondiData::vacuum(g);
  d.m = scalar_field(f["m"], g, where + ".m");

  const bool direct = f.contains("X") || f.contains("Y");
  if (f.contains("shear_potentials")) {
    if (direct)
      fail(where, "shear given twice: use either X/Y or shear_potentials");
    const json& sp = f["shear_potentials"];
    require_keys(sp, where + ".shear_potentials", {"u", "v"});
    HarmonicSpectrum u = HarmonicSpectrum::Zero(g->spectrum_size());
    HarmonicSpectrum v = u;
    if (sp.contains("u"))
      u = g->analyze(scalar_field(sp["u"], g, where + ".shear_potentials.u"));
    if (sp.contains("v"))
      v = g->analyze(scalar_field(sp["v"], g, where + ".shear_potentials.v"));
    const FramePair T =
        g->traceless_hessian(u) + frame_rotate(g->traceless_hessian(v));
    d.X = 0.5 * T.t;
    d.Y = -0.5 * T.p;
  } else if (direct) {
    if (!f.contains("X") || !f.contains("Y"))
      fail(where, "X and Y must be given together");
    d.X = scalar_field(f["X"], g, where + ".X");
    d.Y = scalar_field(f["Y"], g, where + ".Y");
  }

  if (f.contains("W")) {
    const json& w = f["W"];
    require_keys(w, where + ".W", {"gradient_of", "components"});
    if (w.size() != 1)
      fail(where + ".W", "exactly one of gradient_of/components required");
    if (w.contains("gradient_of")) {
      d.Wt = g->gradient(
          scalar_field(w["gradient_of"], g, where + ".W.gradient_of"));
    } else {
      const json& c = w["components"];
      require_keys(c, where + ".W.components", {"t", "p"});
      if (!c.contains("t") || !c.contains("p"))
        fail(where + ".W.components", "both t and p required");
      d.Wt = FramePair(scalar_field(c["t"], g, where + ".W.components.t"),
                       scalar_field(c["p"], g, where + ".W.components.p"));
    }
  }

  if (f.contains("retarded_time"))
    d.retarded_time = number_at(f["retarded_time"], where + ".retarded_time");

  d.validate();
  return d;
}

std::string InputDocument::hash_hex() const {
  std::ostringstream os;
  os << std::hex << hash_;
  return os.str();
}

ordered_json config_to_json(const Config& cfg) {
  return ordered_json{{"n_theta", cfg.n_theta},
                      {"series_depth", cfg.series_depth},
                      {"depth", cfg.depth},
                      {"eps_solv", cfg.eps_solv},
                      {"tol_route", cfg.tol_route},
                      {"ladder",
                       {{"r0", cfg.ladder_r0},
                        {"count", cfg.ladder_count},
                        {"factor", cfg.ladder_factor}}}};
}

ordered_json momentum_to_json(const EnergyMomentum& P) {
  return ordered_json{{"e", P.e}, {"p", {P.p(0), P.p(1), P.p(2)}}};
}

ordered_json checks_to_json(const std::vector<CheckResult>& checks) {
  ordered_json arr = ordered_json::array();
  for (const CheckResult& c : checks) {
    ordered_json row{{"name", c.name},
                     {"measured", c.measured},
                     {"tolerance", c.tolerance},
                     {"pass", c.pass}};
    if (!c.note.empty()) row["note"] = c.note;
    arr.push_back(row);
  }
  return arr;
}

ordered_json solution_to_json(const OptimalSolution& sol, double cut) {
  const GridPtr g = sol.reference.grid();
  ordered_json chain = ordered_json::array();
  for (const Mat4& b : sol.chain.gens) {
    ordered_json row = ordered_json::array();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) row.push_back(b(i, j));
    chain.push_back(row);
  }
  ordered_json taus = ordered_json::array();
  for (const SphereField& t : sol.tau_hats) {
    const HarmonicSpectrum c = g->analyze(t);
    ordered_json triples = ordered_json::array();
    for (int l = 0; l <= g->lmax(); ++l)
      for (int m = -l; m <= l; ++m)
        if (std::abs(c(sh_index(l, m))) > cut)
          triples.push_back({l, m, c(sh_index(l, m))});
    taus.push_back(triples);
  }
  return ordered_json{{"momentum", momentum_to_json(sol.momentum)},
                      {"velocity",
                       {sol.velocity(0), sol.velocity(1), sol.velocity(2)}},
                      {"chain_generators", chain},
                      {"tau_hats", taus},
                      {"residual_sup", sol.residual_sup}};
}

std::pair<BoostChain, std::vector<SphereField>> solution_from_json(
    const json& j, const GridPtr& g) {
  BoostChain chain;
  for (const json& row : j.at("chain_generators")) {
    if (!row.is_array() || row.size() != 16)
      throw InputError("chain generator must hold 16 row-major entries");
    Mat4 b;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) b(i, k) = row[4 * i + k].get<double>();
    chain.gens.push_back(b);
  }
  std::vector<SphereField> taus;
  for (const json& triples : j.at("tau_hats")) {
    HarmonicSpectrum c = HarmonicSpectrum::Zero(g->spectrum_size());
    for (const json& t : triples) {
      const int l = t[0].get<int>();
      const int m = t[1].get<int>();
      if (l < 0 || std::abs(m) > l || l > g->lmax())
        throw InputError("time coefficient outside the band limit");
      c(sh_index(l, m)) += t[2].get<double>();
    }
    taus.push_back(g->synthesize(c));
  }
  return {std::move(chain), std::move(taus)};
}

namespace {

void render_node(const ordered_json& j, const std::string& path,
                 std::ostringstream& os) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items())
      render_node(value, path.empty() ? key : path + "." + key, os);
  } else {
    os << path << " = " << j.dump() << "\n";
  }
}

} // namespace

std::string render_text(const ordered_json& rep) {
  std::ostringstream os;
  render_node(rep, "", os);
  return os.str();
}

} // namespace qle
