#include "cli_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qmnls/errors.hpp"

namespace qmnls::cli {

namespace {

using nlohmann::json;

class Reader {
public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(label() + "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key) { return as_number(key, take(key, true)); }
  double number(const std::string& key, double fallback) {
    const json* v = take(key, false);
    return v ? as_number(key, v) : fallback;
  }

  std::size_t count(const std::string& key) { return as_count(key, take(key, true)); }
  std::size_t count(const std::string& key, std::size_t fallback) {
    const json* v = take(key, false);
    return v ? as_count(key, v) : fallback;
  }

  bool flag(const std::string& key, bool fallback) {
    const json* v = take(key, false);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(label(key) + "expected true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& key) { return as_text(key, take(key, true)); }
  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = take(key, false);
    return v ? as_text(key, v) : fallback;
  }

  std::vector<double> numbers(const std::string& key) { return as_numbers(key, take(key, true)); }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const json* v = take(key, false);
    return v ? as_numbers(key, v) : fallback;
  }

  std::vector<std::string> texts(const std::string& key, std::vector<std::string> fallback) {
    const json* v = take(key, false);
    if (!v) return fallback;
    if (!v->is_array()) throw ConfigError(label(key) + "expected a list of strings");
    std::vector<std::string> out;
    for (const auto& e : *v) {
      if (!e.is_string()) throw ConfigError(label(key) + "expected a list of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  Reader object(const std::string& key) { return Reader(*take(key, true), where_ + key + "."); }
  const json* optional_object(const std::string& key) { return take(key, false); }
  std::string path(const std::string& key) const { return where_ + key + "."; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError(label(key) + "unknown key");
  }

  std::string label(const std::string& key = "") const {
    if (key.empty()) return where_.empty() ? "config: " : where_.substr(0, where_.size() - 1) + ": ";
    return where_ + key + ": ";
  }

private:
  const json* take(const std::string& key, bool required) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) {
      if (required) throw ConfigError(label(key) + "missing required key");
      return nullptr;
    }
    return &*it;
  }

  double as_number(const std::string& key, const json* v) const {
    if (!v->is_number()) throw ConfigError(label(key) + "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(label(key) + "must be finite");
    return x;
  }

  std::size_t as_count(const std::string& key, const json* v) const {
    if (v->is_number_unsigned()) return v->get<std::size_t>();
    throw ConfigError(label(key) + "expected a non-negative integer");
  }

  std::string as_text(const std::string& key, const json* v) const {
    if (!v->is_string()) throw ConfigError(label(key) + "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> as_numbers(const std::string& key, const json* v) const {
    if (!v->is_array()) throw ConfigError(label(key) + "expected a list of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) throw ConfigError(label(key) + "expected a list of numbers");
      out.push_back(e.get<double>());
      if (!std::isfinite(out.back())) throw ConfigError(label(key) + "entries must be finite");
    }
    return out;
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON (") + e.what() + ")");
  }
}

template <class F>
void checked(const std::string& what, F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    throw ConfigError(what + ": " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

InitialDatum parse_datum(Reader r) {
  const std::string type = r.text("type");
  InitialDatum d;
  if (type == "gaussian") {
    GaussianDatum g;
    g.amplitude = r.number("amplitude", g.amplitude);
    g.width = r.number("width", g.width);
    g.center = r.number("center", g.center);
    if (!(g.width > 0.0)) throw ConfigError(r.label("width") + "must be > 0");
    d = g;
  } else if (type == "plane_wave") {
    PlaneWaveModulatedDatum p;
    p.amplitude = r.number("amplitude", p.amplitude);
    p.wavenumber = r.number("wavenumber", p.wavenumber);
    p.width = r.number("width", p.width);
    if (!(p.width > 0.0)) throw ConfigError(r.label("width") + "must be > 0");
    d = p;
  } else if (type == "special_profile") {
    d = SpecialLimitProfileDatum{r.number("s", 0.0)};
  } else if (type == "file") {
    d = FileDatum{r.text("path")};
  } else {
    throw ConfigError(r.label("type") + "unknown datum type '" + type + "'");
  }
  r.finish();
  return d;
}

void read_run_fields(Reader& r, RunConfig& c, bool with_orders) {
  c.n = r.count("n");
  c.length = r.number("length");
  c.eps = r.number("eps");
  c.dt = r.number("dt");
  c.t_final = r.number("t_final");
  c.datum = parse_datum(r.object("datum"));
  c.diag_stride = r.count("diag_stride", c.diag_stride);
  c.checkpoint_stride = r.count("checkpoint_stride", c.checkpoint_stride);
  c.dealias = r.flag("dealias", c.dealias);
  if (with_orders) c.sobolev_orders = r.numbers("sobolev_orders", {});
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig parse_run_config(const std::string& text) {
  const json j = parse_json(text);
  Reader r(j, "");
  RunConfig c;
  read_run_fields(r, c, true);
  r.finish();
  checked("evolve config", [&] { c.validate(); });
  return c;
}

SweepConfig parse_sweep_config(const std::string& text) {
  const json j = parse_json(text);
  Reader r(j, "");
  SweepConfig c;
  c.s = r.number("s");
  c.t_final = r.number("t_final");
  c.eps_list = r.numbers("eps_list");
  c.dt = r.number("dt");
  c.n = r.count("n");
  c.length = r.number("length");
  if (r.has("datum")) c.datum = parse_datum(r.object("datum"));
  c.diag_stride = r.count("diag_stride", c.diag_stride);
  c.dealias = r.flag("dealias", c.dealias);
  r.finish();
  checked("sweep config", [&] { c.validate(); });
  return c;
}

SolitonConfig parse_soliton_config(const std::string& text) {
  const json j = parse_json(text);
  Reader r(j, "");
  SolitonConfig c;
  c.problem.eps = r.number("eps", c.problem.eps);
  c.problem.tau = r.number("tau", c.problem.tau);
  c.problem.n = r.count("n", c.problem.n);
  c.problem.length = r.number("length", c.problem.length);
  c.tol = r.number("tol", c.tol);
  c.max_iter = r.count("max_iter", c.max_iter);
  if (r.has("init")) {
    Reader init = r.object("init");
    c.init_amplitude = init.number("amplitude", c.init_amplitude);
    c.init_width = init.number("width", c.init_width);
    init.finish();
    if (c.init_amplitude == 0.0) throw ConfigError(init.label("amplitude") + "must be nonzero");
    if (!(c.init_width > 0.0)) throw ConfigError(init.label("width") + "must be > 0");
  }
  for (double d : r.numbers("nonexistence_dims", {})) {
    if (d < 1.0 || d != std::floor(d)) throw ConfigError(r.label("nonexistence_dims") + "entries must be integers >= 1");
    c.nonexistence_dims.push_back(static_cast<int>(d));
  }
  c.scaling_s = r.numbers("scaling_s", {});
  c.trilinear_samples = r.count("trilinear_samples", c.trilinear_samples);
  r.finish();
  checked("soliton config", [&] { c.problem.validate(); });
  if (!(c.tol > 0.0)) throw ConfigError(r.label("tol") + "must be > 0");
  if (c.max_iter == 0) throw ConfigError(r.label("max_iter") + "must be >= 1");
  return c;
}

AuditConfig parse_audit_config(const std::string& text) {
  const json j = parse_json(text);
  Reader r(j, "");
  AuditConfig c;
  c.audits = r.texts("audits", c.audits);
  const std::set<std::string> known = {"root", "lower", "upper", "ratio91", "phi", "tail", "smoothing"};
  for (const auto& a : c.audits)
    if (!known.count(a)) throw ConfigError(r.label("audits") + "unknown audit '" + a + "'");
  c.eps = r.number("eps", c.eps);
  c.xi_grid = r.numbers("xi_grid", c.xi_grid);
  c.tau_fraction = r.number("tau_fraction", c.tau_fraction);
  c.root_samples = r.count("root_samples", c.root_samples);
  c.root_seed = r.count("root_seed", c.root_seed);
  c.phi_beta = r.number("phi_beta", c.phi_beta);
  c.phi_gamma = r.number("phi_gamma", c.phi_gamma);
  c.phi_a = r.numbers("phi_a", c.phi_a);
  c.tail_A = r.numbers("tail_A", c.tail_A);
  c.tail_a = r.numbers("tail_a", c.tail_a);
  if (r.has("smoothing")) {
    Reader s = r.object("smoothing");
    c.smoothing.eps = s.number("eps", c.smoothing.eps);
    c.smoothing.b = s.number("b", c.smoothing.b);
    c.smoothing.gamma = s.number("gamma", c.smoothing.gamma);
    c.smoothing.a = s.number("a", c.smoothing.a);
    c.smoothing.s = s.number("s", c.smoothing.s);
    c.smoothing_samples = s.count("samples", c.smoothing_samples);
    c.smoothing_xi_max = s.number("xi_max", c.smoothing_xi_max);
    s.finish();
    checked("audit config: smoothing", [&] { validate(c.smoothing); });
    if (!(c.smoothing_xi_max > 0.1)) throw ConfigError(s.label("xi_max") + "must be > 0.1");
  }
  r.finish();

  if (!(c.eps > 0.0)) throw ConfigError(r.label("eps") + "must be > 0");
  if (c.xi_grid.empty() || std::any_of(c.xi_grid.begin(), c.xi_grid.end(), [](double x) { return !(x > 1.0); }))
    throw ConfigError(r.label("xi_grid") + "entries must be > 1");
  if (!(c.tau_fraction > 0.5 && c.tau_fraction < 2.0)) throw ConfigError(r.label("tau_fraction") + "must lie in (0.5, 2)");
  if (c.root_samples == 0) throw ConfigError(r.label("root_samples") + "must be >= 1");
  if (!(c.phi_beta >= c.phi_gamma && c.phi_gamma >= 0.0 && c.phi_beta + c.phi_gamma > 1.0))
    throw ConfigError(r.label("phi_beta") + "needs phi_beta >= phi_gamma >= 0 and phi_beta + phi_gamma > 1");
  if (std::any_of(c.tail_A.begin(), c.tail_A.end(), [](double x) { return !(x > 0.0); }))
    throw ConfigError(r.label("tail_A") + "entries must be > 0");
  if (std::any_of(c.tail_a.begin(), c.tail_a.end(), [](double x) { return !(x > 0.0 && x < 1.0); }))
    throw ConfigError(r.label("tail_a") + "entries must lie in (0, 1)");
  if (c.smoothing_samples == 0) throw ConfigError("smoothing.samples: must be >= 1");
  return c;
}

GrowthConfig parse_growth_config(const std::string& text) {
  const json j = parse_json(text);
  Reader r(j, "");
  GrowthConfig c;
  read_run_fields(r, c.run, false);
  c.s_values = r.numbers("s_values", c.s_values);
  c.margin = r.number("margin", c.margin);
  r.finish();
  checked("growth config", [&] { c.run.validate(); });
  if (c.s_values.empty()) throw ConfigError(r.label("s_values") + "must not be empty");
  for (double s : c.s_values)
    if (s < 0.0) throw ConfigError(r.label("s_values") + "entries must be >= 0");
  if (!(c.margin >= 0.0)) throw ConfigError(r.label("margin") + "must be >= 0");
  return c;
}

LimitConfig parse_limit_config(const std::string& text) {
  const json j = parse_json(text);
  Reader r(j, "");
  LimitConfig c;
  c.s = r.number("s", c.s);
  c.profile = r.text("profile", c.profile);
  c.lambdas = r.numbers("lambdas", c.lambdas);
  r.finish();
  if (c.profile != "special") throw ConfigError(r.label("profile") + "only 'special' is available");
  for (double l : c.lambdas)
    if (l < 0.0) throw ConfigError(r.label("lambdas") + "entries must be >= 0");
  return c;
}

}  // namespace qmnls::cli
