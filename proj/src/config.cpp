#include "tpns/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "tpns/error.hpp"

namespace tpns {

const char* to_string(ProblemKind k) { return k == ProblemKind::MmsExample1 ? "mms_example1" : "wellbore"; }

void RunConfig::validate() const {
  model.validate();
  step_config().validate();
  if (workers < 1) throw InvariantViolation("workers must be at least 1");
  if (!(h > 0.0 && H >= h && T > 0.0)) throw InvariantViolation("need 0 < h <= H and T > 0");
  step_count(T, dt);
  if (layout.porous_nx < 1 || layout.porous_ny < 1 || layout.conduit_nx < 1 || layout.conduit_ny < 1)
    throw InvariantViolation("subdomain counts must be at least 1");
  if (layout.overlap < 0.0) throw InvariantViolation("overlap must be non-negative");
  for (const auto& r : rows)
    if (!(r.h > 0.0 && r.H >= r.h)) throw InvariantViolation("sweep rows need 0 < h <= H");
  for (std::size_t i = 0; i < k_F_values.size(); ++i)
    if (!(k_F_values[i] > 0.0) || (i > 0 && !(k_F_values[i] > k_F_values[i - 1])))
      throw InvariantViolation("k_F_values must be positive and strictly increasing");
  wellbore_config().validate();
}

StepConfig RunConfig::step_config() const {
  StepConfig s = step;
  s.dt = dt;
  s.workers = workers;
  return s;
}

WellboreConfig RunConfig::wellbore_config() const {
  WellboreConfig w = wellbore;
  w.params = model;
  return w;
}

std::vector<SweepCase> RunConfig::sweep_cases() const {
  std::vector<SweepCase> out;
  for (const auto& r : rows) out.push_back({r.h, r.H, dt_from_h ? r.h * r.h : dt, layout});
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(int line) { return "line " + std::to_string(line) + ": "; }

bool plain_number(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

double to_double(const std::string& s, int line) {
  double v = 0.0;
  if (plain_number(s, v)) return v;
  const auto slash = s.find('/');
  double a = 0.0, b = 0.0;
  if (slash != std::string::npos && plain_number(trim(s.substr(0, slash)), a) &&
      plain_number(trim(s.substr(slash + 1)), b) && b != 0.0)
    return a / b;
  throw TypeMismatch(where(line) + "expected a number, got '" + s + "'");
}

long long to_integer(const std::string& s, int line) {
  long long v = 0;
  const char* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw TypeMismatch(where(line) + "expected an integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& s, int line) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw TypeMismatch(where(line) + "expected true or false, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string boolean(bool b) { return b ? "true" : "false"; }

struct Key {
  std::function<void(RunConfig&, const std::string&, int)> set;
  std::function<std::string(const RunConfig&)> get;
};

/// Keys in serialization order, grouped by section.
using KeyTable = std::vector<std::pair<std::string, std::vector<std::pair<std::string, Key>>>>;

Key real(double RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v, int l) { c.*m = to_double(v, l); },
          [m](const RunConfig& c) { return num(c.*m); }};
}

template <class Get>
Key real_at(Get ref) {
  return {[ref](RunConfig& c, const std::string& v, int l) { ref(c) = to_double(v, l); },
          [ref](const RunConfig& c) { return num(ref(c)); }};
}

template <class Get>
Key integer_at(Get ref) {
  return {[ref](RunConfig& c, const std::string& v, int l) {
            const long long x = to_integer(v, l);
            if (x < 0 || x > 1'000'000) throw TypeMismatch(where(l) + "integer out of range");
            ref(c) = static_cast<int>(x);
          },
          [ref](const RunConfig& c) { return std::to_string(ref(c)); }};
}

template <class Get>
Key flag_at(Get ref) {
  return {[ref](RunConfig& c, const std::string& v, int l) { ref(c) = to_bool(v, l); },
          [ref](const RunConfig& c) { return boolean(ref(c)); }};
}

Key model_key(double ModelParams::*m) {
  return real_at([m](auto& c) -> auto& { return c.model.*m; });
}

const KeyTable& keys() {
  static const KeyTable table = [] {
    KeyTable t;
    t.push_back({"problem",
                 {{"kind",
                   {[](RunConfig& c, const std::string& v, int l) {
                      if (v == "mms_example1") c.problem = ProblemKind::MmsExample1;
                      else if (v == "wellbore") c.problem = ProblemKind::Wellbore;
                      else throw TypeMismatch(where(l) + "kind must be mms_example1 or wellbore");
                    },
                    [](const RunConfig& c) { return std::string(to_string(c.problem)); }}},
                  {"output_dir",
                   {[](RunConfig& c, const std::string& v, int) { c.output_dir = v; },
                    [](const RunConfig& c) { return c.output_dir; }}},
                  {"workers", integer_at([](auto& c) -> auto& { return c.workers; })},
                  {"seed",
                   {[](RunConfig& c, const std::string& v, int l) {
                      const long long x = to_integer(v, l);
                      if (x < 0) throw TypeMismatch(where(l) + "seed must be non-negative");
                      c.seed = static_cast<std::uint64_t>(x);
                    },
                    [](const RunConfig& c) { return std::to_string(c.seed); }}}}});
    t.push_back({"model",
                 {{"phi_F", model_key(&ModelParams::phi_F)},
                  {"phi_f", model_key(&ModelParams::phi_f)},
                  {"phi_m", model_key(&ModelParams::phi_m)},
                  {"C_F", model_key(&ModelParams::C_F)},
                  {"C_f", model_key(&ModelParams::C_f)},
                  {"C_m", model_key(&ModelParams::C_m)},
                  {"k_F", model_key(&ModelParams::k_F)},
                  {"k_f", model_key(&ModelParams::k_f)},
                  {"k_m", model_key(&ModelParams::k_m)},
                  {"sigma", model_key(&ModelParams::sigma)},
                  {"sigma_star", model_key(&ModelParams::sigma_star)},
                  {"mu_tilde", model_key(&ModelParams::mu_tilde)},
                  {"nu", model_key(&ModelParams::nu)},
                  {"rho", model_key(&ModelParams::rho)},
                  {"alpha", model_key(&ModelParams::alpha)},
                  {"eta", model_key(&ModelParams::eta)}}});
    t.push_back({"discretization",
                 {{"h", real(&RunConfig::h)},
                  {"H", real(&RunConfig::H)},
                  {"dt", real(&RunConfig::dt)},
                  {"T", real(&RunConfig::T)},
                  {"porous_nx", integer_at([](auto& c) -> auto& { return c.layout.porous_nx; })},
                  {"porous_ny", integer_at([](auto& c) -> auto& { return c.layout.porous_ny; })},
                  {"conduit_nx", integer_at([](auto& c) -> auto& { return c.layout.conduit_nx; })},
                  {"conduit_ny", integer_at([](auto& c) -> auto& { return c.layout.conduit_ny; })},
                  {"overlap", real_at([](auto& c) -> auto& { return c.layout.overlap; })}}});
    t.push_back({"solver",
                 {{"algorithm",
                   {[](RunConfig& c, const std::string& v, int l) {
                      if (v == "traditional") c.algorithm = Algorithm::Traditional;
                      else if (v == "local-parallel") c.algorithm = Algorithm::LocalParallel;
                      else throw TypeMismatch(where(l) + "algorithm must be traditional or local-parallel");
                    },
                    [](const RunConfig& c) { return std::string(to_string(c.algorithm)); }}},
                  {"picard_tol", real_at([](auto& c) -> auto& { return c.step.picard_tol; })},
                  {"picard_max", integer_at([](auto& c) -> auto& { return c.step.picard_max; })},
                  {"skew", flag_at([](auto& c) -> auto& { return c.step.skew; })},
                  {"convection", flag_at([](auto& c) -> auto& { return c.step.convection; })},
                  {"pressure_pin", flag_at([](auto& c) -> auto& { return c.step.pressure_pin; })}}});
    t.push_back({"sweep",
                 {{"rows",
                   {[](RunConfig& c, const std::string& v, int l) {
                      c.rows.clear();
                      for (const auto& item : split_list(v)) {
                        const auto colon = item.find(':');
                        if (colon == std::string::npos) throw TypeMismatch(where(l) + "rows are h:H pairs");
                        c.rows.push_back({to_double(trim(item.substr(0, colon)), l),
                                          to_double(trim(item.substr(colon + 1)), l)});
                      }
                    },
                    [](const RunConfig& c) {
                      std::string s;
                      for (const auto& r : c.rows) s += (s.empty() ? "" : ", ") + num(r.h) + ":" + num(r.H);
                      return s;
                    }}},
                  {"dt_from_h", flag_at([](auto& c) -> auto& { return c.dt_from_h; })}}});
    t.push_back({"wellbore",
                 {{"conduit_x0", real_at([](auto& c) -> auto& { return c.wellbore.conduit.x0; })},
                  {"conduit_y0", real_at([](auto& c) -> auto& { return c.wellbore.conduit.y0; })},
                  {"conduit_x1", real_at([](auto& c) -> auto& { return c.wellbore.conduit.x1; })},
                  {"conduit_y1", real_at([](auto& c) -> auto& { return c.wellbore.conduit.y1; })},
                  {"p_m_in", real_at([](auto& c) -> auto& { return c.wellbore.p_m_in; })},
                  {"p_f_in", real_at([](auto& c) -> auto& { return c.wellbore.p_f_in; })},
                  {"p_F_in", real_at([](auto& c) -> auto& { return c.wellbore.p_F_in; })},
                  {"outlet_lo", real_at([](auto& c) -> auto& { return c.wellbore.outlet_lo; })},
                  {"outlet_hi", real_at([](auto& c) -> auto& { return c.wellbore.outlet_hi; })},
                  {"H", real_at([](auto& c) -> auto& { return c.wellbore.H; })},
                  {"h", real_at([](auto& c) -> auto& { return c.wellbore.h; })},
                  {"dt", real_at([](auto& c) -> auto& { return c.wellbore.dt; })},
                  {"T", real_at([](auto& c) -> auto& { return c.wellbore.T; })},
                  {"stokes", flag_at([](auto& c) -> auto& { return c.wellbore.stokes; })},
                  {"snap", flag_at([](auto& c) -> auto& { return c.wellbore.snap; })},
                  {"porous_nx", integer_at([](auto& c) -> auto& { return c.wellbore.layout.porous_nx; })},
                  {"porous_ny", integer_at([](auto& c) -> auto& { return c.wellbore.layout.porous_ny; })},
                  {"conduit_nx", integer_at([](auto& c) -> auto& { return c.wellbore.layout.conduit_nx; })},
                  {"conduit_ny", integer_at([](auto& c) -> auto& { return c.wellbore.layout.conduit_ny; })},
                  {"overlap", real_at([](auto& c) -> auto& { return c.wellbore.layout.overlap; })},
                  {"k_F_values",
                   {[](RunConfig& c, const std::string& v, int l) {
                      c.k_F_values.clear();
                      for (const auto& item : split_list(v)) c.k_F_values.push_back(to_double(item, l));
                    },
                    [](const RunConfig& c) {
                      std::string s;
                      for (double k : c.k_F_values) s += (s.empty() ? "" : ", ") + num(k);
                      return s;
                    }}}}});
    return t;
  }();
  return table;
}

const Key* find_key(const std::string& section, const std::string& key) {
  for (const auto& [name, entries] : keys()) {
    if (name != section) continue;
    for (const auto& [k, desc] : entries)
      if (k == key) return &desc;
  }
  return nullptr;
}

bool known_section(const std::string& s) {
  for (const auto& [name, entries] : keys())
    if (name == s) return true;
  return false;
}

struct Entry {
  std::string section, key, value;
  int line = 0;
};

} // namespace

RunConfig parse_config(const std::string& text) {
  std::vector<Entry> entries;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(where(line) + "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!known_section(section)) throw UnknownKey(where(line) + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(where(line) + "expected key = value");
    if (section.empty()) throw ParseError(where(line) + "key outside of any section");
    Entry e{section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (e.key.empty()) throw ParseError(where(line) + "empty key");
    if (!find_key(e.section, e.key)) throw UnknownKey(where(line) + "unknown key " + e.section + "." + e.key);
    if (!seen.insert(e.section + "." + e.key).second)
      throw ParseError(where(line) + "duplicate key " + e.section + "." + e.key);
    entries.push_back(std::move(e));
  }

  RunConfig cfg;
  // The problem kind selects the coefficient defaults, so it is applied first.
  for (const auto& e : entries)
    if (e.section == "problem" && e.key == "kind") find_key(e.section, e.key)->set(cfg, e.value, e.line);
  if (cfg.problem == ProblemKind::Wellbore) cfg.model = wellbore_params();
  for (const auto& e : entries) find_key(e.section, e.key)->set(cfg, e.value, e.line);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [section, entries] : keys()) {
    if (!out.empty()) out += "\n";
    out += "[" + section + "]\n";
    for (const auto& [k, desc] : entries) out += k + " = " + desc.get(cfg) + "\n";
  }
  return out;
}

} // namespace tpns
