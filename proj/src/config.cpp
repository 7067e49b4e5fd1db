#include "nevdim/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace nevdim {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

double to_double(const std::string& key, const std::string& t) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) config_error(key + ": '" + t + "' is not a number");
  return v;
}

long long to_integer(const std::string& key, const std::string& t) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) config_error(key + ": '" + t + "' is not an integer");
  return v;
}

std::vector<double> doubles(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& t : tokens(s)) out.push_back(to_double(key, t));
  return out;
}

std::vector<cplx> complexes(const std::string& key, const std::string& s) {
  const auto v = doubles(key, s);
  if (v.empty() || v.size() % 2 != 0) config_error(key + ": expected re im pairs");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < v.size(); i += 2) out.emplace_back(v[i], v[i + 1]);
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
  return s;
}

std::string join_c(const std::vector<cplx>& v) {
  std::vector<double> flat;
  for (cplx c : v) {
    flat.push_back(c.real());
    flat.push_back(c.imag());
  }
  return join(flat);
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <class T>
Field real_field(const char* sec, const char* key, T RunConfig::*member) {
  return {sec, key, [member](const RunConfig& c) { return fmt(c.*member); },
          [member, key](RunConfig& c, const std::string& v) {
            const auto t = tokens(v);
            if (t.size() != 1) config_error(std::string(key) + ": expected one number");
            c.*member = to_double(key, t[0]);
          }};
}

Field int_field(const char* sec, const char* key, int RunConfig::*member) {
  return {sec, key, [member](const RunConfig& c) { return std::to_string(c.*member); },
          [member, key](RunConfig& c, const std::string& v) {
            const auto t = tokens(v);
            if (t.size() != 1) config_error(std::string(key) + ": expected one integer");
            c.*member = static_cast<int>(to_integer(key, t[0]));
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"function", "name", [](const RunConfig& c) { return c.name; },
       [](RunConfig& c, const std::string& v) {
         const auto t = tokens(v);
         if (t.size() != 1) config_error("name: expected a single word");
         c.name = t[0];
       }},
      {"function", "p", [](const RunConfig& c) { return join_c(c.poly); },
       [](RunConfig& c, const std::string& v) { c.poly = complexes("p", v); }},
      {"function", "moebius",
       [](const RunConfig& c) { return join_c({c.moebius.begin(), c.moebius.end()}); },
       [](RunConfig& c, const std::string& v) {
         const auto m = complexes("moebius", v);
         if (m.size() != 4) config_error("moebius: expected four complex numbers a b c d");
         for (int i = 0; i < 4; ++i) c.moebius[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)];
       }},
      {"function", "z0", [](const RunConfig& c) { return join_c({c.z0}); },
       [](RunConfig& c, const std::string& v) {
         const auto z = complexes("z0", v);
         if (z.size() != 1) config_error("z0: expected one complex number");
         c.z0 = z[0];
       }},
      real_field("function", "tol", &RunConfig::tol),
      real_field("census", "radius", &RunConfig::census_radius),
      {"census", "allow_incomplete", [](const RunConfig& c) { return c.allow_incomplete ? "true" : "false"; },
       [](RunConfig& c, const std::string& v) {
         const auto t = tokens(v);
         if (t.size() == 1 && t[0] == "true") {
           c.allow_incomplete = true;
         } else if (t.size() == 1 && t[0] == "false") {
           c.allow_incomplete = false;
         } else {
           config_error("allow_incomplete: expected true or false");
         }
       }},
      real_field("dimension", "R", &RunConfig::R),
      {"dimension", "R_ladder", [](const RunConfig& c) { return join(c.R_ladder); },
       [](RunConfig& c, const std::string& v) { c.R_ladder = doubles("R_ladder", v); }},
      {"dimension", "alphabet_sizes",
       [](const RunConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.alphabet_sizes.size(); ++i) {
           s += (i ? " " : "") + std::to_string(c.alphabet_sizes[i]);
         }
         return s;
       },
       [](RunConfig& c, const std::string& v) {
         c.alphabet_sizes.clear();
         for (const auto& t : tokens(v)) c.alphabet_sizes.push_back(static_cast<int>(to_integer("alphabet_sizes", t)));
       }},
      real_field("dimension", "C", &RunConfig::C),
      real_field("dimension", "C1", &RunConfig::C1),
      int_field("dimension", "box_depth", &RunConfig::box_depth),
      int_field("dimension", "box_symbols", &RunConfig::box_symbols),
      real_field("dimension", "box_R", &RunConfig::box_R),
      {"render", "window",
       [](const RunConfig& c) {
         return join({c.window.x_min, c.window.x_max, c.window.y_min, c.window.y_max});
       },
       [](RunConfig& c, const std::string& v) {
         const auto w = doubles("window", v);
         if (w.size() != 4) config_error("window: expected x_min x_max y_min y_max");
         c.window = {w[0], w[1], w[2], w[3]};
       }},
      int_field("render", "nx", &RunConfig::nx),
      int_field("render", "ny", &RunConfig::ny),
      int_field("render", "N", &RunConfig::N),
      real_field("render", "R", &RunConfig::render_R),
      int_field("synthetic", "m", &RunConfig::synthetic_m),
      real_field("synthetic", "c_mod", &RunConfig::c_mod),
      real_field("synthetic", "c_res", &RunConfig::c_res),
      int_field("synthetic", "j_max", &RunConfig::synthetic_j_max),
      int_field("verify", "samples", &RunConfig::verify_samples),
      real_field("verify", "schwarzian_h", &RunConfig::schwarzian_h),
      {"run", "out", [](const RunConfig& c) { return c.out_dir; },
       [](RunConfig& c, const std::string& v) {
         const auto t = tokens(v);
         if (t.size() != 1) config_error("out: expected a path without spaces");
         c.out_dir = t[0];
       }},
      {"run", "seed", [](const RunConfig& c) { return std::to_string(c.seed); },
       [](RunConfig& c, const std::string& v) {
         const auto t = tokens(v);
         if (t.size() != 1) config_error("seed: expected one integer");
         const long long s = to_integer("seed", t[0]);
         if (s < 0) config_error("seed must be non-negative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      int_field("run", "threads", &RunConfig::threads),
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  return emit_config(*this) == emit_config(o);
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::map<std::string, const Field*> index;
  for (const Field& f : fields()) index[std::string(f.section) + "." + f.key] = &f;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') config_error("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const auto it = index.find(key);
    if (it == index.end()) config_error("line " + std::to_string(lineno) + ": unknown key " + key);
    it->second->set(cfg, trim(line.substr(eq + 1)));
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config " + path);
  return parse_config(in);
}

std::string emit_config(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const Field& f : fields()) {
    if (section != f.section) {
      section = f.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  }
  return out;
}

void validate(const RunConfig& cfg) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) config_error(std::string(what) + " must be positive");
  };
  if (cfg.poly.empty() || cfg.poly.back() == cplx(0.0)) config_error("p: leading coefficient must be non-zero");
  const auto& m = cfg.moebius;
  if (m[0] * m[3] - m[1] * m[2] == cplx(0.0)) config_error("moebius: ad - bc = 0");
  if (m[2] == cplx(0.0)) config_error("moebius: c = 0 puts a pole at the basepoint");
  positive(cfg.tol, "tol");
  positive(cfg.census_radius, "census radius");
  positive(cfg.R, "R");
  for (double r : cfg.R_ladder) positive(r, "R_ladder entries");
  for (int n : cfg.alphabet_sizes) {
    if (n < 1) config_error("alphabet sizes must be >= 1");
  }
  positive(cfg.C, "C");
  positive(cfg.C1, "C1");
  if (cfg.box_depth < 0) config_error("box_depth must be >= 0");
  if (cfg.box_symbols < 1) config_error("box_symbols must be >= 1");
  positive(cfg.box_R, "box_R");
  if (!(cfg.window.x_min <= cfg.window.x_max && cfg.window.y_min <= cfg.window.y_max)) {
    config_error("window: min must not exceed max");
  }
  if (cfg.nx < 1 || cfg.ny < 1) config_error("nx and ny must be >= 1");
  if (cfg.N < 1) config_error("N must be >= 1");
  positive(cfg.render_R, "render R");
  if (cfg.synthetic_m < 0) config_error("synthetic m must be >= 0");
  positive(cfg.c_mod, "c_mod");
  positive(cfg.c_res, "c_res");
  if (cfg.synthetic_j_max < 0) config_error("j_max must be >= 0");
  if (cfg.verify_samples < 1) config_error("verify samples must be >= 1");
  positive(cfg.schwarzian_h, "schwarzian_h");
  if (cfg.threads < 1) config_error("threads must be >= 1");
}

NevanlinnaSpec to_spec(const RunConfig& cfg) {
  validate(cfg);
  NevanlinnaSpec s;
  s.name = cfg.name;
  s.p = Polynomial(cfg.poly);
  s.M = MoebiusMap(cfg.moebius[0], cfg.moebius[1], cfg.moebius[2], cfg.moebius[3]);
  s.z0 = cfg.z0;
  s.tol = cfg.tol;
  return s;
}

DimensionOptions to_dimension_options(const RunConfig& cfg) {
  DimensionOptions o;
  o.R = cfg.R;
  o.alphabet_sizes = cfg.alphabet_sizes;
  o.R_ladder = cfg.R_ladder;
  o.C = cfg.C;
  o.C1 = cfg.C1;
  o.box_depth = cfg.box_depth;
  o.box_symbols = cfg.box_symbols;
  o.box_R = cfg.box_R;
  return o;
}

}  // namespace nevdim
