#include "cesaro/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "cesaro/errors.hpp"

namespace cesaro {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("at " + (path.empty() ? std::string("/") : path) + ": " + what);
}

// Object view that remembers which keys were read so leftovers can be rejected.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return path_ + "/" + key; }

  const Json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(path(key), "missing required field");
    return j_.at(key);
  }

  double real(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return parse_rational(at(key), path(key));
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_number_integer()) fail(path(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_string()) fail(path(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) fail(path(item.key()), "unknown key");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> real_list(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_rational(j[i], path + "/" + std::to_string(i)));
  return out;
}

PrototypeSet parse_prototype(const Json& j, const std::string& path, const TorusSpace& space) {
  if (j.is_string()) {
    if (j.get<std::string>() != "full") fail(path, "expected \"full\" or an object with boxes");
    return PrototypeSet::full(space);
  }
  Section s(j, path);
  const Json& boxes = s.at("boxes");
  s.finish();
  if (!boxes.is_array() || boxes.empty()) fail(path + "/boxes", "expected a nonempty array");
  std::vector<Box> pieces;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const std::string bp = path + "/boxes/" + std::to_string(i);
    Section b(boxes[i], bp);
    const auto lo = real_list(b.at("lo"), bp + "/lo");
    const auto hi = real_list(b.at("hi"), bp + "/hi");
    b.finish();
    if (static_cast<int>(lo.size()) != space.dim() || static_cast<int>(hi.size()) != space.dim())
      fail(bp, "lo and hi need " + std::to_string(space.dim()) + " components");
    Box box;
    for (int a = 0; a < space.dim(); ++a) {
      box.lo[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)];
      box.hi[static_cast<std::size_t>(a)] = hi[static_cast<std::size_t>(a)];
    }
    pieces.push_back(box);
  }
  try {
    return PrototypeSet(space, pieces);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

}  // namespace

double parse_rational(const Json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) fail(path, "expected a number or a \"p/q\" string");
  const std::string s = j.get<std::string>();
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return parse_real(s);
    const double p = parse_real(s.substr(0, slash));
    const double q = parse_real(s.substr(slash + 1));
    if (q == 0.0) fail(path, "zero denominator");
    return p / q;
  } catch (const std::invalid_argument&) {
    fail(path, "cannot parse '" + s + "' as a number");
  }
}

RunConfig parse_config(const Json& j) {
  RunConfig cfg;
  ProtocolConfig& p = cfg.protocol;
  Section root(j, "");
  const Json& version = root.at("version");
  if (!version.is_number_integer() || version.get<int>() != kConfigVersion)
    fail("/version", "unsupported version, expected " + std::to_string(kConfigVersion));

  int dim = 1;
  if (root.has("space")) {
    Section s(root.at("space"), "/space");
    dim = static_cast<int>(s.integer("dim", 1));
    s.finish();
    if (dim < 1 || dim > kMaxDim) fail("/space/dim", "dimension must be 1 or 2");
  }
  const TorusSpace space(dim);
  p.prototype = root.has("prototype") ? parse_prototype(root.at("prototype"), "/prototype", space)
                                      : PrototypeSet::full(space);

  if (root.has("model")) {
    try {
      p.model = parse_model(root.text("model", ""));
    } catch (const std::invalid_argument& e) {
      fail("/model", e.what());
    }
  }
  p.mass = root.real("mass", 0.0);
  p.T0 = root.real("T0", 1.0);
  p.K_sim = static_cast<int>(root.integer("K_sim", 8));
  p.N_max = static_cast<int>(root.integer("N_max", 200));
  if (!(p.T0 > 0.0)) fail("/T0", "must be positive");
  if (p.K_sim < 1) fail("/K_sim", "must be at least 1");
  if (p.N_max < 1) fail("/N_max", "must be at least 1");
  if (p.model == Model::klein_gordon && !(p.mass > 0.0)) fail("/mass", "Klein-Gordon needs a positive mass");
  if (p.model != Model::klein_gordon && p.mass != 0.0) fail("/mass", "only Klein-Gordon carries a mass");

  if (root.has("window")) {
    Section s(root.at("window"), "/window");
    if (s.has("values")) {
      const Json& v = s.at("values");
      if (!v.is_array() || v.empty()) fail("/window/values", "expected a nonempty array");
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number_integer()) fail("/window/values/" + std::to_string(i), "expected an integer");
        p.window.values.push_back(v[i].get<int>());
      }
    }
    p.window.stride = static_cast<int>(s.integer("stride", 5));
    p.window.max = static_cast<int>(s.integer("max", -1));
    s.finish();
    if (p.window.stride < 1) fail("/window/stride", "must be positive");
    if (!p.window.values.empty() && p.window.values.size() < static_cast<std::size_t>(p.N_max))
      fail("/window/values", "needs at least N_max entries");
  }

  if (root.has("tolerance")) {
    Section s(root.at("tolerance"), "/tolerance");
    const std::string kind = s.text("kind", "harmonic");
    if (kind == "harmonic") {
      p.tolerance.kind = ToleranceSequence::Kind::harmonic;
    } else if (kind == "constant") {
      p.tolerance.kind = ToleranceSequence::Kind::constant;
      p.tolerance.value = parse_rational(s.at("value"), "/tolerance/value");
    } else if (kind == "values") {
      p.tolerance.kind = ToleranceSequence::Kind::values;
      p.tolerance.values = real_list(s.at("values"), "/tolerance/values");
      if (p.tolerance.values.size() < static_cast<std::size_t>(p.N_max))
        fail("/tolerance/values", "needs at least N_max entries");
    } else {
      fail("/tolerance/kind", "expected harmonic, constant or values");
    }
    s.finish();
  }

  if (root.has("datum")) {
    Section s(root.at("datum"), "/datum");
    const std::int64_t seed = s.integer("seed", 1);
    if (seed < 0) fail("/datum/seed", "must be nonnegative");
    p.datum.seed = static_cast<std::uint64_t>(seed);
    p.datum.window = static_cast<int>(s.integer("window", -1));
    if (s.has("decay")) {
      Section d(s.at("decay"), "/datum/decay");
      const std::string kind = d.text("kind", "flat");
      if (kind == "flat") {
        p.datum.decay.kind = DecayProfile::Kind::flat;
      } else if (kind == "power") {
        p.datum.decay.kind = DecayProfile::Kind::power;
        p.datum.decay.p = parse_rational(d.at("p"), "/datum/decay/p");
      } else {
        fail("/datum/decay/kind", "expected flat or power");
      }
      d.finish();
    }
    s.finish();
    if (p.datum.window < -1) fail("/datum/window", "must be nonnegative");
  }

  if (root.has("design")) {
    Section s(root.at("design"), "/design");
    const std::string method = s.text("method", "equispaced");
    if (method == "equispaced")
      p.design.method = DesignMethod::equispaced;
    else if (method == "solve")
      p.design.method = DesignMethod::solve;
    else
      fail("/design/method", "expected equispaced or solve");
    const std::string cand = s.text("candidates", "grid");
    if (cand == "grid")
      p.design.candidates = CandidateKind::grid;
    else if (cand == "random")
      p.design.candidates = CandidateKind::random;
    else
      fail("/design/candidates", "expected grid or random");
    cfg.design_K = static_cast<int>(s.integer("K", 1));
    p.design.grid_per_axis = static_cast<int>(s.integer("grid", 0));
    p.design.random_count = static_cast<int>(s.integer("n_random", 64));
    const std::int64_t seed = s.integer("seed", 1);
    if (seed < 0) fail("/design/seed", "must be nonnegative");
    p.design.seed = static_cast<std::uint64_t>(seed);
    p.design.tol = s.real("tol", 1e-10);
    p.design.max_iter = static_cast<int>(s.integer("max_iter", 20000));
    s.finish();
    if (cfg.design_K < 0) fail("/design/K", "must be nonnegative");
    if (p.design.grid_per_axis < 0) fail("/design/grid", "must be nonnegative");
    if (p.design.random_count < 1) fail("/design/n_random", "must be positive");
    if (!(p.design.tol >= 0.0)) fail("/design/tol", "must be nonnegative");
    if (p.design.max_iter < 1) fail("/design/max_iter", "must be positive");
  }

  if (root.has("schedule")) {
    Section s(root.at("schedule"), "/schedule");
    cfg.schedule_epsilon = s.real("epsilon", cfg.schedule_epsilon);
    cfg.schedule_interval = static_cast<int>(s.integer("interval", 1));
    if (s.has("speeds")) cfg.speeds = real_list(s.at("speeds"), "/schedule/speeds");
    s.finish();
    if (!(cfg.schedule_epsilon > 0.0 && cfg.schedule_epsilon < p.L()))
      fail("/schedule/epsilon", "must lie in (0, L)");
    if (cfg.schedule_interval < 1) fail("/schedule/interval", "must be at least 1");
    for (std::size_t i = 0; i < cfg.speeds.size(); ++i)
      if (!(cfg.speeds[i] > 0.0)) fail("/schedule/speeds/" + std::to_string(i), "must be positive");
  }

  if (root.has("verify")) {
    Section s(root.at("verify"), "/verify");
    cfg.verify_trials = static_cast<int>(s.integer("trials", 100));
    const std::int64_t seed = s.integer("seed", 1);
    if (seed < 0) fail("/verify/seed", "must be nonnegative");
    cfg.verify_seed = static_cast<std::uint64_t>(seed);
    s.finish();
    if (cfg.verify_trials < 1) fail("/verify/trials", "must be positive");
  }

  if (root.has("output")) {
    Section s(root.at("output"), "/output");
    cfg.output_dir = s.text("dir", cfg.output_dir);
    cfg.schedule_rows = s.integer("schedule_rows", cfg.schedule_rows);
    s.finish();
    if (cfg.schedule_rows < 0) fail("/output/schedule_rows", "must be nonnegative");
  }
  root.finish();

  try {
    validate(p);
  } catch (const WindowExceedsSimulation& e) {
    fail("/window", e.what());
  } catch (const std::invalid_argument& e) {
    fail("", e.what());
  }
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": invalid JSON");
  }
  return parse_config(j);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_config_text(text);
}

}  // namespace cesaro
