#include "omem/config.hpp"

#include <fstream>
#include <set>

#include "omem/errors.hpp"

namespace omem::cli {
namespace {

using nlohmann::json;

// Typed access to one JSON object that remembers which keys were read, so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  double number(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }
  std::optional<double> number_opt(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }
  double number_or(const std::string& key, double fallback) { return number_opt(key).value_or(fallback); }

  std::uint64_t count(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(key, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  std::uint64_t count_or(const std::string& key, std::uint64_t fallback) {
    return has(key) ? count(key) : fallback;
  }

  bool flag_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_array() || v.empty()) fail(key, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(key, "expected a non-empty array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  const json& raw(const std::string& key) { return at(key); }

  std::optional<Section> child(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return Section(at(key), join(key));
  }

  // Throws on any key that was never read.
  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) fail(key, "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const auto where = join(key);
    throw ValidationError("config: " + (where.empty() ? std::string("<root>") : where) + ": " + what);
  }

 private:
  const json& at(const std::string& key) {
    if (!node_.contains(key)) fail(key, "missing required key");
    seen_.insert(key);
    return node_.at(key);
  }

  std::string join(const std::string& key) const {
    if (key.empty()) return path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

OmParams parse_params(Section s) {
  OmParams p;
  p.delta = s.number_or("delta", p.delta);
  p.omega_m = s.number_or("omega_m", p.omega_m);
  p.g_m = s.number_or("g_m", p.g_m);
  p.kappa = s.number_or("kappa", p.kappa);
  p.quality = s.number("quality");
  p.omega_c = s.number_or("omega_c", p.omega_c);
  s.finish();
  p.validate();
  return p;
}

DriveKind parse_kind(Section& s, const std::string& key) {
  const auto name = s.text(key);
  const auto kind = parse_drive_kind(name);
  if (!kind) s.fail(key, "unknown drive kind '" + name + "'");
  return *kind;
}

DriveSpec parse_drive(Section s, std::optional<double>& sigma_over_t_s) {
  const DriveKind kind = parse_kind(s, "kind");
  DriveSpec d;
  switch (kind) {
    case DriveKind::gaussian_train: {
      const double e0 = s.number("e0");
      const double t_s = s.number("t_s");
      if (s.has("sigma") == s.has("sigma_over_t_s")) {
        s.fail("sigma", "give exactly one of sigma and sigma_over_t_s");
      }
      double sigma = 0.0;
      if (s.has("sigma")) {
        sigma = s.number("sigma");
      } else {
        sigma_over_t_s = s.number("sigma_over_t_s");
        sigma = *sigma_over_t_s * t_s;
      }
      d = DriveSpec::gaussian_train(e0, t_s, sigma);
      break;
    }
    case DriveKind::sinusoidal:
      d = DriveSpec::sinusoidal(s.number("e0"), s.number("omega"));
      break;
    case DriveKind::square_sinusoidal:
      d = DriveSpec::square_sinusoidal(s.number("e0"), s.number("omega"));
      break;
    case DriveKind::delta_pulse:
      d = DriveSpec::delta_pulse(s.number("e0"), s.number("t_s"), s.number_opt("sigma"));
      break;
    case DriveKind::tabulated: {
      const auto& rows = s.raw("samples");
      if (!rows.is_array()) s.fail("samples", "expected an array of [t, value] pairs");
      std::vector<DriveSample> samples;
      for (const auto& r : rows) {
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
          s.fail("samples", "expected an array of [t, value] pairs");
        }
        samples.push_back({r[0].get<double>(), r[1].get<double>()});
      }
      d = DriveSpec::tabulated(std::move(samples), s.number_opt("period"));
      break;
    }
  }
  s.finish();
  d.validate();
  return d;
}

MeanFieldState parse_state(Section s) {
  MeanFieldState st;
  st.x_c = s.number_or("x_c", 0.0);
  st.p_c = s.number_or("p_c", 0.0);
  st.x_m = s.number_or("x_m", 0.0);
  st.p_m = s.number_or("p_m", 0.0);
  s.finish();
  if (!st.finite()) s.fail("", "initial state must be finite");
  return st;
}

IntegratorOverrides parse_integrator(Section s) {
  IntegratorOverrides o;
  o.rel_tol = s.number_opt("rel_tol");
  o.abs_tol = s.number_opt("abs_tol");
  o.max_step = s.number_opt("max_step");
  o.sample_dt = s.number_opt("sample_dt");
  if (s.has("max_steps")) o.max_steps = s.count("max_steps");
  s.finish();
  return o;
}

AnalysisOptions parse_analysis(Section s) {
  AnalysisOptions a;
  if (s.has("output")) {
    const auto name = s.text("output");
    const auto obs = parse_observable(name);
    if (!obs) s.fail("output", "unknown observable '" + name + "'");
    a.output = *obs;
  }
  a.skip_cycles = s.count_or("skip_cycles", a.skip_cycles);
  a.storing.eps_x = s.number_or("eps_x", a.storing.eps_x);
  a.storing.eps_y = s.number_or("eps_y", a.storing.eps_y);
  a.include_open_cycles = s.flag_or("include_open_cycles", a.include_open_cycles);
  a.jump_windows_per_cycle = s.count_or("jump_windows_per_cycle", a.jump_windows_per_cycle);
  s.finish();
  if (a.jump_windows_per_cycle == 0) s.fail("jump_windows_per_cycle", "must be >= 1");
  return a;
}

OptimizerSection parse_optimizer(Section s) {
  OptimizerSection o;
  o.kind = parse_kind(s, "drive");
  o.space = SearchSpace::defaults_for(o.kind);
  if (auto b = s.child("bounds")) {
    for (auto& bound : o.space.bounds) {
      if (!b->has(bound.name)) continue;
      const auto range = b->numbers(bound.name);
      if (range.size() != 2) b->fail(bound.name, "expected [lower, upper]");
      bound.lower = range[0];
      bound.upper = range[1];
    }
    b->finish();
  }
  auto& g = o.ga;
  g.population = s.count_or("population", g.population);
  g.generations = s.count_or("generations", g.generations);
  g.mutation_sigma = s.number_or("mutation_sigma", g.mutation_sigma);
  g.mutation_shrink = s.number_or("mutation_shrink", g.mutation_shrink);
  g.crossover_rate = s.number_or("crossover_rate", g.crossover_rate);
  g.blend_alpha = s.number_or("blend_alpha", g.blend_alpha);
  g.tournament_size = s.count_or("tournament_size", g.tournament_size);
  g.elitism = s.count_or("elitism", g.elitism);
  g.seed = s.count_or("seed", g.seed);
  g.cycles = s.count_or("cycles", g.cycles);
  g.target_cost = s.number_opt("target_cost");
  g.jobs = s.count_or("jobs", g.jobs);
  s.finish();
  o.space.validate();
  g.validate();
  return o;
}

std::vector<SweepAxis> parse_sweep(Section s) {
  static const std::set<std::string> allowed{"e0", "t_s", "sigma", "omega", "sigma_over_t_s"};
  std::vector<SweepAxis> axes;
  for (const auto& name : allowed) {
    if (s.has(name)) axes.push_back({name, s.numbers(name)});
  }
  s.finish();
  if (axes.empty()) s.fail("", "sweep needs at least one axis");
  return axes;
}

}  // namespace

RunConfig parse_config(const nlohmann::json& doc) {
  Section root(doc, "");
  const auto version = root.count("schema_version");
  if (version != kSchemaVersion) {
    root.fail("schema_version", "unsupported version " + std::to_string(version) + " (expected " +
                                    std::to_string(kSchemaVersion) + ")");
  }
  RunConfig cfg;
  if (auto s = root.child("params")) {
    cfg.params = parse_params(*s);
  } else {
    root.fail("params", "missing required section");
  }
  if (auto s = root.child("drive")) cfg.drive = parse_drive(*s, cfg.sigma_over_t_s);
  if (auto s = root.child("initial_state")) cfg.initial_state = parse_state(*s);
  if (auto s = root.child("integrator")) cfg.integrator = parse_integrator(*s);
  if (auto s = root.child("simulation")) {
    cfg.cycles = s->count_or("cycles", cfg.cycles);
    s->finish();
    if (cfg.cycles == 0) s->fail("cycles", "must be >= 1");
  }
  if (auto s = root.child("analysis")) cfg.analysis = parse_analysis(*s);
  if (auto s = root.child("optimizer")) cfg.optimizer = parse_optimizer(*s);
  if (auto s = root.child("sweep")) cfg.sweep = parse_sweep(*s);
  if (root.has("output_dir")) cfg.output_dir = root.text("output_dir");
  root.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config: " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

nlohmann::json to_json(const RunConfig& cfg) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  const auto& p = cfg.params;
  doc["params"] = {{"delta", p.delta}, {"omega_m", p.omega_m}, {"g_m", p.g_m},
                   {"kappa", p.kappa}, {"quality", p.quality}, {"omega_c", p.omega_c}};
  if (cfg.drive) {
    const auto& d = *cfg.drive;
    json j{{"kind", std::string(to_string(d.kind))}};
    switch (d.kind) {
      case DriveKind::gaussian_train:
        j["e0"] = d.e0;
        j["t_s"] = d.t_s;
        if (cfg.sigma_over_t_s) {
          j["sigma_over_t_s"] = *cfg.sigma_over_t_s;
        } else {
          j["sigma"] = d.sigma;
        }
        break;
      case DriveKind::sinusoidal:
      case DriveKind::square_sinusoidal:
        j["e0"] = d.e0;
        j["omega"] = d.omega;
        break;
      case DriveKind::delta_pulse:
        j["e0"] = d.e0;
        j["t_s"] = d.t_s;
        j["sigma"] = d.sigma;
        break;
      case DriveKind::tabulated: {
        json rows = json::array();
        for (const auto& s : d.samples) rows.push_back({s.t, s.value});
        j["samples"] = rows;
        if (d.declared_period) j["period"] = *d.declared_period;
        break;
      }
    }
    doc["drive"] = j;
  }
  const auto& s = cfg.initial_state;
  doc["initial_state"] = {{"x_c", s.x_c}, {"p_c", s.p_c}, {"x_m", s.x_m}, {"p_m", s.p_m}};
  json integ = json::object();
  if (cfg.integrator.rel_tol) integ["rel_tol"] = *cfg.integrator.rel_tol;
  if (cfg.integrator.abs_tol) integ["abs_tol"] = *cfg.integrator.abs_tol;
  if (cfg.integrator.max_step) integ["max_step"] = *cfg.integrator.max_step;
  if (cfg.integrator.sample_dt) integ["sample_dt"] = *cfg.integrator.sample_dt;
  if (cfg.integrator.max_steps) integ["max_steps"] = *cfg.integrator.max_steps;
  doc["integrator"] = integ;
  doc["simulation"] = {{"cycles", cfg.cycles}};
  const auto& a = cfg.analysis;
  doc["analysis"] = {{"output", std::string(to_string(a.output))},
                     {"skip_cycles", a.skip_cycles},
                     {"eps_x", a.storing.eps_x},
                     {"eps_y", a.storing.eps_y},
                     {"include_open_cycles", a.include_open_cycles},
                     {"jump_windows_per_cycle", a.jump_windows_per_cycle}};
  if (cfg.optimizer) {
    const auto& o = *cfg.optimizer;
    json bounds = json::object();
    for (const auto& b : o.space.bounds) bounds[b.name] = {b.lower, b.upper};
    const auto& g = o.ga;
    json j{{"drive", std::string(to_string(o.kind))},
           {"bounds", bounds},
           {"population", g.population},
           {"generations", g.generations},
           {"mutation_sigma", g.mutation_sigma},
           {"mutation_shrink", g.mutation_shrink},
           {"crossover_rate", g.crossover_rate},
           {"blend_alpha", g.blend_alpha},
           {"tournament_size", g.tournament_size},
           {"elitism", g.elitism},
           {"seed", g.seed},
           {"cycles", g.cycles},
           {"jobs", g.jobs}};
    if (g.target_cost) j["target_cost"] = *g.target_cost;
    doc["optimizer"] = j;
  }
  if (!cfg.sweep.empty()) {
    json j = json::object();
    for (const auto& axis : cfg.sweep) j[axis.name] = axis.values;
    doc["sweep"] = j;
  }
  doc["output_dir"] = cfg.output_dir.string();
  return doc;
}

DriveSpec resolve_drive(const RunConfig& cfg) {
  if (!cfg.drive) throw ValidationError("config: drive: missing required section");
  DriveSpec d = *cfg.drive;
  if (cfg.sigma_over_t_s) d.sigma = *cfg.sigma_over_t_s * d.t_s;
  d.validate();
  return d;
}

IntegratorConfig resolve_integrator(const RunConfig& cfg, const DriveSpec& drive) {
  auto ic = IntegratorConfig::defaults_for(drive, cfg.params.kappa);
  const auto& o = cfg.integrator;
  if (o.rel_tol) ic.rel_tol = *o.rel_tol;
  if (o.abs_tol) ic.abs_tol = *o.abs_tol;
  if (o.max_step) ic.max_step = *o.max_step;
  if (o.sample_dt) ic.sample_dt = *o.sample_dt;
  if (o.max_steps) ic.max_steps = *o.max_steps;
  ic.validate();
  return ic;
}

}  // namespace omem::cli
