#include "decaylab/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

namespace decaylab::harness {

using nlohmann::json;

namespace {

constexpr const char* kKindNames[] = {"ids", "e0", "count-vs-alpha", "trial", "growth", "wegner", "localize", "dynamics"};

bool alpha_grid_kind(ExperimentKind k) {
  return k == ExperimentKind::CountVsAlpha || k == ExperimentKind::Localize || k == ExperimentKind::Dynamics;
}
bool trial_kind(ExperimentKind k) { return k == ExperimentKind::Trial || k == ExperimentKind::Growth; }
bool localize_kind(ExperimentKind k) { return k == ExperimentKind::Localize || k == ExperimentKind::Dynamics; }

// Wraps a JSON object, hands out typed members and remembers which keys were read.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key) && !node_.at(key).is_null(); }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& at(const std::string& key) {
    used_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key, double fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number()) throw ConfigError(child(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(child(key), "expected a finite number");
    return x;
  }

  std::optional<double> optional_number(const std::string& key) {
    used_.insert(key);
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(child(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  int integer(const std::string& key, int fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) throw ConfigError(child(key), "expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) throw ConfigError(child(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) throw ConfigError(child(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_array()) throw ConfigError(child(key), "expected an array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) throw ConfigError(child(key), "expected finite numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  // Rejects every key that was not read.
  void finish(const std::string& kind_name) const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!used_.count(it.key())) {
        throw ConfigError(child(it.key()), "unknown key for experiment kind '" + kind_name + "'");
      }
    }
  }

  void skip(const std::string& key) { used_.insert(key); }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

std::vector<double> default_times() {
  std::vector<double> t{0.0};
  for (int k = 0; k < 40; ++k) t.push_back(std::pow(10.0, -1.0 + 4.0 * k / 39.0));
  return t;
}

std::vector<double> default_etas(double reference_energy) {
  std::vector<double> etas;
  for (int k = 0; k < 6; ++k) etas.push_back(0.25 * std::abs(reference_energy) * std::pow(10.0, -2.0 + 0.4 * k));
  return etas;
}

ModelBlock read_model(Reader& r, ExperimentKind kind, const std::string& kind_name) {
  ModelBlock m;
  m.dim = r.integer("dim", 1);
  require(m.dim >= 1 && m.dim <= 3, r.child("dim"), "dimension must be 1, 2 or 3");
  m.coupling = r.number("coupling", 1.0);
  require(m.coupling >= 0.0, r.child("coupling"), "coupling must be non-negative");

  if (r.has("envelope")) {
    require(!alpha_grid_kind(kind), r.child("envelope"),
            "the envelope is set by campaign.alphas for experiment kind '" + kind_name + "'");
    Reader e(r.at("envelope"), r.child("envelope"));
    m.envelope.alpha = e.number("alpha", 0.0);
    require(m.envelope.alpha >= 0.0, e.child("alpha"), "alpha must be non-negative");
    if (e.has("witness")) {
      Reader w(e.at("witness"), e.child("witness"));
      EnvelopeBlock::Witness wit;
      wit.scale = w.number("scale", 1.0);
      wit.exponent = w.number("exponent", 0.5);
      wit.r0 = w.number("r0", 1.0);
      require(wit.scale > 0.0, w.child("scale"), "witness scale must be positive");
      require(wit.exponent > 0.0, w.child("exponent"), "witness exponent must be positive");
      require(wit.r0 > 0.0, w.child("r0"), "r0 must be positive");
      w.finish(kind_name);
      m.envelope.witness = wit;
    } else {
      e.skip("witness");
    }
    e.finish(kind_name);
  } else {
    r.skip("envelope");
  }
  if (trial_kind(kind)) {
    require(m.envelope.witness.has_value(), r.child("envelope.witness"),
            "experiment kind '" + kind_name + "' needs an envelope witness F");
  } else {
    require(!m.envelope.witness.has_value(), r.child("envelope.witness"),
            "a witness only applies to trial and growth experiments");
  }
  if (kind == ExperimentKind::Ids || kind == ExperimentKind::E0) {
    require(m.envelope.alpha == 0.0, r.child("envelope.alpha"), "IDS and E0 estimates need the ergodic model (alpha = 0)");
  }

  if (r.has("single_site")) {
    Reader s(r.at("single_site"), r.child("single_site"));
    m.single_site.type = s.string("type", "cube");
    if (m.single_site.type == "cube") {
      m.single_site.u0 = s.number("u0", 1.0);
      m.single_site.delta = s.number("delta", 1.0);
      require(m.single_site.u0 > 0.0, s.child("u0"), "u0 must be positive");
      require(m.single_site.delta > 0.0 && m.single_site.delta <= 1.0, s.child("delta"), "delta must lie in ]0, 1]");
    } else if (m.single_site.type == "tabulated") {
      m.single_site.resolution = s.integer("resolution", 0);
      m.single_site.samples = s.numbers("samples", {});
      require(m.single_site.resolution >= 1, s.child("resolution"), "resolution must be positive");
      std::size_t expected = 1;
      for (int k = 0; k < m.dim; ++k) expected *= static_cast<std::size_t>(m.single_site.resolution);
      require(m.single_site.samples.size() == expected, s.child("samples"),
              "expected resolution^dim = " + std::to_string(expected) + " samples");
      require(std::all_of(m.single_site.samples.begin(), m.single_site.samples.end(), [](double v) { return v >= 0.0; }),
              s.child("samples"), "samples must be non-negative");
      m.single_site.u0 = *std::max_element(m.single_site.samples.begin(), m.single_site.samples.end());
    } else {
      throw ConfigError(s.child("type"), "expected 'cube' or 'tabulated'");
    }
    s.finish(kind_name);
  } else {
    r.skip("single_site");
  }

  if (r.has("disorder")) {
    Reader d(r.at("disorder"), r.child("disorder"));
    m.disorder.kind = d.string("kind", "uniform01");
    if (m.disorder.kind == "bernoulli") {
      m.disorder.p = d.number("p", 0.5);
      require(m.disorder.p >= 0.0 && m.disorder.p <= 1.0, d.child("p"), "p must lie in [0, 1]");
    } else if (m.disorder.kind == "bounded-density") {
      m.disorder.bins = d.numbers("bins", {});
      require(!m.disorder.bins.empty(), d.child("bins"), "at least one bin is required");
      require(std::all_of(m.disorder.bins.begin(), m.disorder.bins.end(), [](double v) { return v >= 0.0; }),
              d.child("bins"), "bins must be non-negative");
    } else if (m.disorder.kind != "uniform01") {
      throw ConfigError(d.child("kind"), "expected 'uniform01', 'bernoulli' or 'bounded-density'");
    }
    d.finish(kind_name);
  } else {
    r.skip("disorder");
  }
  r.finish(kind_name);
  return m;
}

NumericsBlock read_numerics(Reader& r, ExperimentKind kind, const std::string& kind_name) {
  NumericsBlock n;
  n.mesh = r.number("mesh", 0.0);
  require(n.mesh >= 0.0 && n.mesh <= 1.0, r.child("mesh"), "mesh must lie in ]0, 1] (0 selects the default)");
  if (n.mesh > 0.0) {
    const double per_unit = 1.0 / n.mesh;
    require(std::abs(per_unit - std::round(per_unit)) < 1e-9, r.child("mesh"), "1/mesh must be an integer");
  }
  n.max_unknowns = r.unsigned_integer("max_unknowns", n.max_unknowns);
  require(n.max_unknowns >= 1, r.child("max_unknowns"), "budget must be positive");

  const bool sided = kind == ExperimentKind::Ids || kind == ExperimentKind::E0 || kind == ExperimentKind::Wegner ||
                     localize_kind(kind);
  if (sided) {
    n.side = r.number("side", kind == ExperimentKind::Ids ? 32.0 : 64.0);
    require(n.side > 0.0, r.child("side"), "side must be positive");
  }
  if (kind == ExperimentKind::Ids) {
    const std::string bc = r.string("boundary", "dirichlet");
    require(bc == "dirichlet" || bc == "neumann", r.child("boundary"), "expected 'dirichlet' or 'neumann'");
    n.boundary = boundary_from_string(bc);
  }
  if (kind == ExperimentKind::CountVsAlpha || kind == ExperimentKind::Wegner || localize_kind(kind)) {
    n.buffer = r.number("buffer", 8.0);
    require(n.buffer >= 0.0, r.child("buffer"), "buffer must be non-negative");
  }
  if (kind == ExperimentKind::CountVsAlpha) {
    n.floor_side = r.number("floor_side", 16.0);
    require(n.floor_side > 0.0, r.child("floor_side"), "floor side must be positive");
    n.nu_tolerance = r.number("nu_tolerance", 1e-3);
    require(n.nu_tolerance > 0.0 && n.nu_tolerance < 0.5, r.child("nu_tolerance"), "tolerance must lie in ]0, 0.5[");
  }
  if (localize_kind(kind)) {
    n.window_fraction = r.number("window_fraction", 0.2);
    require(n.window_fraction > 0.0 && n.window_fraction <= 1.0, r.child("window_fraction"), "must lie in ]0, 1]");
    if (r.has("fit")) {
      Reader f(r.at("fit"), r.child("fit"));
      n.fit.inner_radius = f.number("inner_radius", n.fit.inner_radius);
      n.fit.outer_layers = f.integer("outer_layers", n.fit.outer_layers);
      n.fit.relative_floor = f.number("relative_floor", n.fit.relative_floor);
      require(n.fit.inner_radius >= 0.0, f.child("inner_radius"), "must be non-negative");
      require(n.fit.outer_layers >= 0, f.child("outer_layers"), "must be non-negative");
      require(n.fit.relative_floor >= 0.0 && n.fit.relative_floor < 1.0, f.child("relative_floor"), "must lie in [0, 1[");
      f.finish(kind_name);
    } else {
      r.skip("fit");
    }
    n.sule_eps = r.number("sule_eps", 0.5);
    n.sule_slack = r.number("sule_slack", 0.8);
    require(n.sule_eps >= 0.0, r.child("sule_eps"), "must be non-negative");
    require(n.sule_slack > 0.0 && n.sule_slack <= 1.0, r.child("sule_slack"), "must lie in ]0, 1]");
    if (r.has("radius")) {
      Reader c(r.at("radius"), r.child("radius"));
      n.radius.power_branch_constant = c.number("power_branch_constant", 1.0);
      n.radius.inverse_branch_constant = c.number("inverse_branch_constant", 1.0);
      require(n.radius.power_branch_constant > 0.0, c.child("power_branch_constant"), "must be positive");
      require(n.radius.inverse_branch_constant > 0.0, c.child("inverse_branch_constant"), "must be positive");
      c.finish(kind_name);
    } else {
      r.skip("radius");
    }
    n.radius_safety = r.number("radius_safety", 4.0);
    require(n.radius_safety > 0.0, r.child("radius_safety"), "must be positive");
    n.moment_order = r.number("moment_order", 2.0);
    require(n.moment_order >= 0.0, r.child("moment_order"), "must be non-negative");
  }
  r.finish(kind_name);
  return n;
}

CampaignBlock read_campaign(Reader& r, ExperimentKind kind, int dim, const std::string& kind_name) {
  CampaignBlock c;
  c.realizations = r.unsigned_integer("realizations", 10);
  require(c.realizations >= 1 && c.realizations <= 1'000'000, r.child("realizations"), "must lie in [1, 1e6]");
  c.seed = r.unsigned_integer("seed", 0);

  switch (kind) {
    case ExperimentKind::Ids:
      c.energies = r.numbers("energies", {-0.5});
      require(!c.energies.empty(), r.child("energies"), "at least one energy is required");
      require(std::all_of(c.energies.begin(), c.energies.end(), [](double e) { return e < 0.0; }), r.child("energies"),
              "energies must be negative");
      break;
    case ExperimentKind::E0:
      break;
    case ExperimentKind::CountVsAlpha:
      c.energy = r.number("energy", -0.5);
      require(c.energy < 0.0, r.child("energy"), "energy must be negative");
      c.alphas = r.numbers("alphas", {0.5, 0.4, 0.3});
      require(!c.alphas.empty(), r.child("alphas"), "at least one alpha is required");
      require(std::all_of(c.alphas.begin(), c.alphas.end(), [](double a) { return a > 0.0; }), r.child("alphas"),
              "alphas must be positive");
      c.nu0 = r.optional_number("nu0");
      if (c.nu0) require(*c.nu0 > 0.0 && *c.nu0 < 1.0, r.child("nu0"), "nu0 must lie in ]0, 1[");
      c.nu0_side = r.number("nu0_side", 64.0);
      c.nu0_realizations = r.unsigned_integer("nu0_realizations", 20);
      require(c.nu0_side > 0.0, r.child("nu0_side"), "must be positive");
      require(c.nu0_realizations >= 1, r.child("nu0_realizations"), "must be positive");
      break;
    case ExperimentKind::Trial:
    case ExperimentKind::Growth:
      c.sides = r.numbers("sides", {64.0, 128.0, 256.0});
      require(!c.sides.empty(), r.child("sides"), "at least one side is required");
      require(std::all_of(c.sides.begin(), c.sides.end(), [](double s) { return s > 0.0; }), r.child("sides"),
              "sides must be positive");
      if (kind == ExperimentKind::Growth) {
        require(std::is_sorted(c.sides.begin(), c.sides.end()), r.child("sides"), "nested boxes need increasing sides");
      } else {
        c.mu = r.optional_number("mu");
      }
      break;
    case ExperimentKind::Wegner: {
      c.reference_energy = r.number("reference_energy", -1.0);
      c.energy = r.number("energy", c.reference_energy);
      c.etas = r.numbers("etas", default_etas(c.reference_energy));
      require(!c.etas.empty(), r.child("etas"), "at least one eta is required");
      if (r.has("centers")) {
        const json& list = r.at("centers");
        require(list.is_array() && !list.empty(), r.child("centers"), "expected a non-empty array");
        for (std::size_t i = 0; i < list.size(); ++i) {
          Reader e(list[i], r.child("centers") + "[" + std::to_string(i) + "]");
          WegnerCenter wc;
          wc.label = e.string("label", "custom");
          const std::vector<double> x = e.numbers("center", {});
          require(x.size() == static_cast<std::size_t>(dim), e.child("center"), "expected one coordinate per dimension");
          for (std::size_t k = 0; k < x.size() && k < kMaxDim; ++k) wc.center[k] = x[k];
          require(wc.label.find_first_of(",\n\"") == std::string::npos, e.child("label"), "labels may not hold , or quotes");
          e.finish(kind_name);
          c.centers.push_back(wc);
        }
      } else {
        r.skip("centers");
      }
      break;
    }
    case ExperimentKind::Localize:
    case ExperimentKind::Dynamics:
      c.alphas = r.numbers("alphas", {0.0, 0.25, 0.5, 0.75, 1.0});
      require(!c.alphas.empty(), r.child("alphas"), "at least one alpha is required");
      require(std::all_of(c.alphas.begin(), c.alphas.end(), [](double a) { return a >= 0.0; }), r.child("alphas"),
              "alphas must be non-negative");
      c.times = r.numbers("times", kind == ExperimentKind::Dynamics ? default_times() : std::vector<double>{});
      require(std::all_of(c.times.begin(), c.times.end(), [](double t) { return t >= 0.0; }), r.child("times"),
              "times must be non-negative");
      if (kind == ExperimentKind::Dynamics) require(!c.times.empty(), r.child("times"), "a time grid is required");
      break;
  }
  r.finish(kind_name);
  return c;
}

OutputBlock read_output(Reader& r, ExperimentKind kind, const std::string& kind_name) {
  OutputBlock o;
  o.directory = r.string("directory", "run");
  require(!o.directory.empty(), r.child("directory"), "directory must not be empty");
  if (r.has("formats")) {
    const json& list = r.at("formats");
    require(list.is_array(), r.child("formats"), "expected an array of strings");
    o.formats.clear();
    for (const json& f : list) {
      require(f.is_string() && (f == "csv" || f == "json"), r.child("formats"), "formats are 'csv' and 'json'");
      if (std::find(o.formats.begin(), o.formats.end(), f.get<std::string>()) == o.formats.end()) {
        o.formats.push_back(f.get<std::string>());
      }
    }
  } else {
    r.skip("formats");
  }
  if (localize_kind(kind)) o.eigenvectors = r.boolean("eigenvectors", false);
  r.finish(kind_name);
  return o;
}

void validate_cross(const ExperimentConfig& cfg) {
  ModelSpec spec;
  try {
    spec = model_spec(cfg.model);
  } catch (const Error& e) {
    throw ConfigError("model", e.what());
  }
  if (trial_kind(cfg.kind)) {
    const double mean = spec.distribution.mean();
    if (cfg.campaign.mu) {
      require(*cfg.campaign.mu > 0.0 && *cfg.campaign.mu < mean, "campaign.mu", "mu must lie in ]0, E[omega][");
    }
    const auto& w = *cfg.model.envelope.witness;
    for (double s : cfg.campaign.sides) {
      require(s > 2.0 * w.r0, "campaign.sides", "every side must exceed 2 r0");
    }
  }
  if (cfg.kind == ExperimentKind::Wegner) {
    WegnerConfig wc;
    wc.model = spec;
    wc.reference_energy = cfg.campaign.reference_energy;
    wc.energy = cfg.campaign.energy;
    wc.etas = cfg.campaign.etas;
    try {
      validate_wegner(wc);
    } catch (const PreconditionError& e) {
      throw ConfigError("campaign", e.what());
    }
  }
}

}  // namespace

std::string to_string(ExperimentKind kind) { return kKindNames[static_cast<int>(kind)]; }

ExperimentKind kind_from_string(const std::string& name) {
  for (int k = 0; k < 8; ++k) {
    if (name == kKindNames[k]) return static_cast<ExperimentKind>(k);
  }
  throw ConfigError("kind", "unknown experiment kind '" + name + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("manifest_version") && doc.contains("config")) doc = doc.at("config");

  Reader top(doc, "");
  ExperimentConfig cfg;
  const std::string kind_name = top.string("kind", "");
  if (kind_name.empty()) throw ConfigError("kind", "missing experiment kind");
  cfg.kind = kind_from_string(kind_name);
  const auto block = [&](const char* key) -> json {
    return top.has(key) ? top.at(key) : (top.skip(key), json::object());
  };
  {
    const json j = block("model");
    Reader r(j, "model");
    cfg.model = read_model(r, cfg.kind, kind_name);
  }
  {
    const json j = block("numerics");
    Reader r(j, "numerics");
    cfg.numerics = read_numerics(r, cfg.kind, kind_name);
  }
  {
    const json j = block("campaign");
    Reader r(j, "campaign");
    cfg.campaign = read_campaign(r, cfg.kind, cfg.model.dim, kind_name);
  }
  {
    const json j = block("output");
    Reader r(j, "output");
    cfg.output = read_output(r, cfg.kind, kind_name);
  }
  top.finish(kind_name);
  validate_cross(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open configuration file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string resolved_json(const ExperimentConfig& cfg) {
  const ExperimentKind kind = cfg.kind;
  json model{{"dim", cfg.model.dim}, {"coupling", cfg.model.coupling}};
  if (!alpha_grid_kind(kind)) {
    json env{{"alpha", cfg.model.envelope.alpha}};
    if (cfg.model.envelope.witness) {
      const auto& w = *cfg.model.envelope.witness;
      env["witness"] = {{"scale", w.scale}, {"exponent", w.exponent}, {"r0", w.r0}};
    }
    model["envelope"] = env;
  }
  if (cfg.model.single_site.type == "cube") {
    model["single_site"] = {{"type", "cube"}, {"u0", cfg.model.single_site.u0}, {"delta", cfg.model.single_site.delta}};
  } else {
    model["single_site"] = {{"type", "tabulated"},
                            {"resolution", cfg.model.single_site.resolution},
                            {"samples", cfg.model.single_site.samples}};
  }
  json dis{{"kind", cfg.model.disorder.kind}};
  if (cfg.model.disorder.kind == "bernoulli") dis["p"] = cfg.model.disorder.p;
  if (cfg.model.disorder.kind == "bounded-density") dis["bins"] = cfg.model.disorder.bins;
  model["disorder"] = dis;

  const NumericsBlock& n = cfg.numerics;
  json num{{"mesh", resolved_mesh(cfg)}, {"max_unknowns", n.max_unknowns}};
  if (kind == ExperimentKind::Ids || kind == ExperimentKind::E0 || kind == ExperimentKind::Wegner || localize_kind(kind)) {
    num["side"] = n.side;
  }
  if (kind == ExperimentKind::Ids) num["boundary"] = to_string(n.boundary);
  if (kind == ExperimentKind::CountVsAlpha || kind == ExperimentKind::Wegner || localize_kind(kind)) num["buffer"] = n.buffer;
  if (kind == ExperimentKind::CountVsAlpha) {
    num["floor_side"] = n.floor_side;
    num["nu_tolerance"] = n.nu_tolerance;
  }
  if (localize_kind(kind)) {
    num["window_fraction"] = n.window_fraction;
    num["fit"] = {{"inner_radius", n.fit.inner_radius},
                  {"outer_layers", n.fit.outer_layers},
                  {"relative_floor", n.fit.relative_floor}};
    num["sule_eps"] = n.sule_eps;
    num["sule_slack"] = n.sule_slack;
    num["radius"] = {{"power_branch_constant", n.radius.power_branch_constant},
                     {"inverse_branch_constant", n.radius.inverse_branch_constant}};
    num["radius_safety"] = n.radius_safety;
    num["moment_order"] = n.moment_order;
  }

  const CampaignBlock& c = cfg.campaign;
  json camp{{"realizations", c.realizations}, {"seed", c.seed}};
  switch (kind) {
    case ExperimentKind::Ids:
      camp["energies"] = c.energies;
      break;
    case ExperimentKind::E0:
      break;
    case ExperimentKind::CountVsAlpha:
      camp["energy"] = c.energy;
      camp["alphas"] = c.alphas;
      camp["nu0"] = c.nu0 ? json(*c.nu0) : json(nullptr);
      camp["nu0_side"] = c.nu0_side;
      camp["nu0_realizations"] = c.nu0_realizations;
      break;
    case ExperimentKind::Trial:
      camp["sides"] = c.sides;
      camp["mu"] = c.mu ? json(*c.mu) : json(nullptr);
      break;
    case ExperimentKind::Growth:
      camp["sides"] = c.sides;
      break;
    case ExperimentKind::Wegner: {
      camp["reference_energy"] = c.reference_energy;
      camp["energy"] = c.energy;
      camp["etas"] = c.etas;
      if (!c.centers.empty()) {
        json list = json::array();
        for (const WegnerCenter& w : c.centers) {
          list.push_back({{"label", w.label},
                          {"center", std::vector<double>(w.center.begin(), w.center.begin() + cfg.model.dim)}});
        }
        camp["centers"] = list;
      } else {
        camp["centers"] = nullptr;
      }
      break;
    }
    case ExperimentKind::Localize:
    case ExperimentKind::Dynamics:
      camp["alphas"] = c.alphas;
      camp["times"] = c.times;
      break;
  }

  json out{{"directory", cfg.output.directory.string()}, {"formats", cfg.output.formats}};
  if (localize_kind(kind)) out["eigenvectors"] = cfg.output.eigenvectors;

  const json doc{{"kind", to_string(kind)}, {"model", model}, {"numerics", num}, {"campaign", camp}, {"output", out}};
  return doc.dump(2);
}

ModelSpec model_spec(const ModelBlock& block) {
  ModelSpec spec;
  spec.dim = block.dim;
  spec.coupling = block.coupling;
  if (block.envelope.witness) {
    const double alpha = block.envelope.alpha;
    const auto w = *block.envelope.witness;
    GeneralEnvelope g;
    g.gamma = [alpha](const Point& x, int dim) { return std::pow(japanese_bracket(x, dim), -alpha); };
    g.witness = [w](double r) { return w.scale * std::pow(r, w.exponent); };
    g.r0 = w.r0;
    std::ostringstream d;
    d << "<x>^-" << alpha << " with F(r) = " << w.scale << " r^" << w.exponent;
    g.description = d.str();
    spec.envelope = Envelope::general(std::move(g));
  } else {
    spec.envelope = Envelope::power_law(block.envelope.alpha);
  }
  if (block.single_site.type == "cube") {
    spec.single_site = SingleSitePotential::cube(block.single_site.u0, block.single_site.delta);
  } else {
    spec.single_site = SingleSitePotential::tabulated(block.dim, block.single_site.resolution, block.single_site.samples);
  }
  if (block.disorder.kind == "bernoulli") {
    spec.distribution = Distribution::bernoulli(block.disorder.p);
  } else if (block.disorder.kind == "bounded-density") {
    spec.distribution = Distribution::bounded_density(block.disorder.bins);
  } else {
    spec.distribution = Distribution::uniform01();
  }
  return spec;
}

double resolved_mesh(const ExperimentConfig& config) {
  return config.numerics.mesh > 0.0 ? config.numerics.mesh : default_mesh(config.model.dim);
}

}  // namespace decaylab::harness
