#pragma once

// Run configuration: a JSON document whose keys mirror RunConfig. Unknown or
// misplaced keys are errors, reported with their field path.

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "twisted_dirac/eta.hpp"
#include "twisted_dirac/spectral_models.hpp"
#include "twisted_dirac/torus_operator.hpp"

namespace twisted_dirac::cli {

using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct FluxMode {
  Mode q{0, 0, 0};
  double re = 0.0;
  double im = 0.0;
  friend bool operator==(const FluxMode&, const FluxMode&) = default;
};

struct RunConfig {
  SpectralModel model;
  EtaMethod method = EtaMethod::hurwitz;
  int cutoff = 400;
  double tol = 1e-6;
  double zero_tol = kDefaultZeroTol;
  std::vector<double> flux_sweep;
  std::vector<double> u_sweep;
  std::vector<int> cutoffs;
  int torus_cutoff = 8;
  std::vector<FluxMode> torus_modes;
  double h_norm = 1.0;
  // not part of the semantic hash
  std::string format = "json";
  std::string out;
  int workers = 1;

  EngineOptions engine() const {
    EngineOptions e;
    e.method = method;
    e.cutoff = cutoff;
    e.zero_tol = zero_tol;
    e.heat.target_error = tol;
    e.heat.zero_tol = zero_tol;
    return e;
  }

  TorusFlux torus_flux() const {
    std::map<Mode, Complex> c;
    for (const auto& m : torus_modes) c[m.q] += Complex(m.re, m.im);
    return TorusFlux(std::move(c));
  }
};

namespace detail {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items())
      if (!ok.count(k)) throw ConfigError(sub(k), "unknown key");
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const json& at(const char* key) const { return j_.at(key); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(sub(key), "expected a number");
    return v.get<double>();
  }
  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(sub(key), "expected an integer");
    return v.get<int>();
  }
  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(sub(key), "expected a string");
    return v.get<std::string>();
  }
  std::string required_text(const char* key) const {
    if (!has(key)) throw ConfigError(sub(key), "missing");
    return text(key, "");
  }
  template <class T>
  std::vector<T> list(const char* key) const {
    if (!has(key)) return {};
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(sub(key), "expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const bool ok = std::is_integral_v<T> ? v[i].is_number_integer() : v[i].is_number();
      if (!ok) throw ConfigError(sub(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<T>());
    }
    return out;
  }
  Vec3 vec3(const char* key, Vec3 fallback) const {
    if (!has(key)) return fallback;
    const auto v = list<double>(key);
    if (v.size() != 3) throw ConfigError(sub(key), "expected three numbers");
    return {v[0], v[1], v[2]};
  }

 private:
  const json& j_;
  std::string path_;
};

inline Geometry parse_geometry(const json& j, const std::string& path) {
  Reader r(j, path);
  const std::string kind = r.required_text("kind");
  if (kind == "circle" || kind == "sphere3") {
    r.allow({"kind", "radius"});
    const double radius = r.number("radius", 1.0);
    return kind == "circle" ? Geometry{Circle{radius}} : Geometry{Sphere3{radius}};
  }
  if (kind == "torus3") {
    r.allow({"kind", "lengths", "spin_structure"});
    return Torus3{r.vec3("lengths", {1, 1, 1}), r.vec3("spin_structure", {0.5, 0.5, 0.5})};
  }
  if (kind == "lens") {
    r.allow({"kind", "p", "radius"});
    return Lens{r.integer("p", 2), r.number("radius", 1.0)};
  }
  throw ConfigError(r.sub("kind"), "unknown geometry '" + kind + "' (circle, sphere3, torus3, lens)");
}

inline FlatCharacter parse_bundle(const json& j, const std::string& path, const Geometry& g) {
  Reader r(j, path);
  const std::string kind = r.required_text("kind");
  if (kind == "trivial") {
    r.allow({"kind", "rank"});
    return TrivialBundle{r.integer("rank", 1)};
  }
  if (kind == "circle_holonomy") {
    r.allow({"kind", "a"});
    return CircleHolonomy{r.number("a", 0.0)};
  }
  if (kind == "torus_holonomy") {
    r.allow({"kind", "theta"});
    return TorusHolonomy{r.vec3("theta", {0, 0, 0})};
  }
  if (kind == "lens_character") {
    r.allow({"kind", "k"});
    const auto* lens = std::get_if<Lens>(&g);
    if (!lens) throw ConfigError(r.sub("kind"), "lens_character requires lens geometry");
    return LensCharacter{lens->p, r.integer("k", 0)};
  }
  throw ConfigError(r.sub("kind"),
                    "unknown bundle '" + kind + "' (trivial, circle_holonomy, torus_holonomy, lens_character)");
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  detail::Reader top(j, "");
  top.allow({"model", "engine", "sweep", "torus_flux", "psc", "output", "workers"});
  RunConfig c;
  if (!top.has("model")) throw ConfigError("model", "missing");
  {
    detail::Reader m(top.at("model"), "model");
    m.allow({"geometry", "bundle", "flux"});
    if (!m.has("geometry")) throw ConfigError("model.geometry", "missing");
    c.model.geometry = detail::parse_geometry(m.at("geometry"), "model.geometry");
    c.model.bundle = m.has("bundle") ? detail::parse_bundle(m.at("bundle"), "model.bundle", c.model.geometry)
                                     : FlatCharacter{TrivialBundle{1}};
    c.model.flux_shift = m.number("flux", 0.0);
    try {
      c.model.validate();
    } catch (const InvalidInput& e) {
      throw ConfigError("model", e.what());
    }
  }
  if (top.has("engine")) {
    detail::Reader e(top.at("engine"), "engine");
    e.allow({"method", "cutoff", "tol", "zero_tol"});
    const std::string method = e.text("method", "hurwitz");
    if (method == "hurwitz") c.method = EtaMethod::hurwitz;
    else if (method == "heat_kernel") c.method = EtaMethod::heat_kernel;
    else throw ConfigError("engine.method", "expected 'hurwitz' or 'heat_kernel'");
    c.cutoff = e.integer("cutoff", c.cutoff);
    c.tol = e.number("tol", c.tol);
    c.zero_tol = e.number("zero_tol", c.zero_tol);
  }
  if (top.has("sweep")) {
    detail::Reader s(top.at("sweep"), "sweep");
    s.allow({"flux", "u", "cutoffs"});
    c.flux_sweep = s.list<double>("flux");
    c.u_sweep = s.list<double>("u");
    c.cutoffs = s.list<int>("cutoffs");
  }
  if (top.has("torus_flux")) {
    detail::Reader t(top.at("torus_flux"), "torus_flux");
    t.allow({"cutoff", "modes"});
    c.torus_cutoff = t.integer("cutoff", c.torus_cutoff);
    if (t.has("modes")) {
      const auto& modes = t.at("modes");
      if (!modes.is_array()) throw ConfigError("torus_flux.modes", "expected an array");
      for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::string path = "torus_flux.modes[" + std::to_string(i) + "]";
        detail::Reader mr(modes[i], path);
        mr.allow({"q", "re", "im"});
        const auto q = mr.list<int>("q");
        if (q.size() != 3) throw ConfigError(path + ".q", "expected three integers");
        c.torus_modes.push_back({Mode{q[0], q[1], q[2]}, mr.number("re", 0.0), mr.number("im", 0.0)});
      }
    }
    try {
      (void)c.torus_flux();
    } catch (const InvalidInput& e) {
      throw ConfigError("torus_flux.modes", e.what());
    }
  }
  if (top.has("psc")) {
    detail::Reader p(top.at("psc"), "psc");
    p.allow({"h_norm"});
    c.h_norm = p.number("h_norm", c.h_norm);
  }
  if (top.has("output")) {
    detail::Reader o(top.at("output"), "output");
    o.allow({"format", "path"});
    c.format = o.text("format", c.format);
    c.out = o.text("path", c.out);
  }
  c.workers = top.integer("workers", c.workers);

  if (c.cutoff < 1) throw ConfigError("engine.cutoff", "must be >= 1");
  if (!(c.tol > 0.0)) throw ConfigError("engine.tol", "must be positive");
  if (!(c.zero_tol > 0.0)) throw ConfigError("engine.zero_tol", "must be positive");
  if (c.torus_cutoff < 1) throw ConfigError("torus_flux.cutoff", "must be >= 1");
  if (c.format != "json" && c.format != "csv") throw ConfigError("output.format", "expected 'json' or 'csv'");
  if (c.workers < 1) throw ConfigError("workers", "must be >= 1");
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Canonical form and hash.

inline json model_to_json(const SpectralModel& m) {
  json g = std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Circle>) return {{"kind", "circle"}, {"radius", x.radius}};
        else if constexpr (std::is_same_v<T, Sphere3>) return {{"kind", "sphere3"}, {"radius", x.radius}};
        else if constexpr (std::is_same_v<T, Torus3>)
          return {{"kind", "torus3"}, {"lengths", x.lengths}, {"spin_structure", x.spin_structure}};
        else return {{"kind", "lens"}, {"p", x.p}, {"radius", x.radius}};
      },
      m.geometry);
  json b = std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TrivialBundle>) return {{"kind", "trivial"}, {"rank", x.rank}};
        else if constexpr (std::is_same_v<T, CircleHolonomy>) return {{"kind", "circle_holonomy"}, {"a", x.a}};
        else if constexpr (std::is_same_v<T, TorusHolonomy>) return {{"kind", "torus_holonomy"}, {"theta", x.theta}};
        else return {{"kind", "lens_character"}, {"k", x.k}};
      },
      m.bundle);
  return {{"geometry", g}, {"bundle", b}, {"flux", m.flux_shift}};
}

/// Every semantically meaningful field with defaults filled in; key order is
/// canonical (sorted), so equal configurations dump identically.
inline json canonical_json(const RunConfig& c) {
  json modes = json::array();
  for (const auto& m : c.torus_modes) modes.push_back({{"q", m.q}, {"re", m.re}, {"im", m.im}});
  return {
      {"model", model_to_json(c.model)},
      {"engine", {{"method", to_string(c.method)}, {"cutoff", c.cutoff}, {"tol", c.tol}, {"zero_tol", c.zero_tol}}},
      {"sweep", {{"flux", c.flux_sweep}, {"u", c.u_sweep}, {"cutoffs", c.cutoffs}}},
      {"torus_flux", {{"cutoff", c.torus_cutoff}, {"modes", modes}}},
      {"psc", {{"h_norm", c.h_norm}}},
  };
}

/// FNV-1a (64 bit) of the canonical dump, as 16 hex digits.
inline std::string config_hash(const RunConfig& c) {
  const std::string text = canonical_json(c).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace twisted_dirac::cli
