#include "nevdim/json_out.hpp"

#include <cmath>
#include <cstdio>

namespace nevdim {

namespace {

void write(const Json& j, int indent, int level, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * level), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write(it.value(), indent, level + 1, out);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        write(v, indent, level + 1, out);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json complex_pair(cplx z) { return Json::array({z.real(), z.imag()}); }

Json doubles(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_or_null(x));
  return a;
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  write(j, indent, 0, out);
  out += "\n";
  return out;
}

Json to_json(const FitReport& fit) {
  Json j;
  j["exponent"] = fit.exponent;
  j["constant"] = fit.constant;
  j["j_min"] = fit.j_min;
  j["j_max"] = fit.j_max;
  j["rms"] = fit.rms;
  return j;
}

Json to_json(const AnnulusCheck& a) {
  Json j;
  j["inner"] = a.inner;
  j["outer"] = a.outer;
  j["counted"] = a.counted;
  j["found"] = a.found;
  j["contour_ok"] = a.contour_ok;
  j["complete"] = a.complete();
  return j;
}

Json census_summary(const Census& c) {
  Json j;
  j["spec"] = c.spec_name;
  j["m"] = c.m;
  j["synthetic"] = c.synthetic;
  j["search_radius"] = c.search_radius;
  j["poles"] = c.size();
  j["complete"] = c.complete();
  j["singular_radius"] = number_or_null(c.singular_radius);
  auto fit = [&](auto fn) -> Json {
    try {
      return fn();
    } catch (const Error&) {
      return nullptr;
    }
  };
  j["modulus_exponent"] = fit([&] { return to_json(fit_modulus_exponent(c)); });
  j["residue_exponent"] = fit([&] { return to_json(fit_residue_exponent(c)); });
  j["order"] = fit([&] { return Json(counting_function_order(c)); });
  Json annuli = Json::array();
  for (const AnnulusCheck& a : c.annuli) annuli.push_back(to_json(a));
  j["annuli"] = annuli;
  j["fit_flagged_radii"] = doubles(c.fit_flagged_radii);
  return j;
}

Json to_json(const CheckReport& r) {
  Json j;
  j["pole_index"] = r.pole_index;
  j["R"] = r.R;
  j["status"] = r.status;
  j["pass"] = r.pass;
  j["worst_margin"] = number_or_null(r.worst_margin);
  j["samples"] = r.samples;
  j["failures"] = r.failures;
  return j;
}

Json to_json(const AsymptoticReport& r) {
  Json j;
  j["radii"] = doubles(r.radii);
  j["Z_abs"] = doubles(r.Z_abs);
  j["eps1"] = doubles(r.eps1);
  j["eps2"] = doubles(r.eps2);
  j["decay_exponent"] = number_or_null(r.decay_exponent);
  j["F_constant"] = number_or_null(r.F_constant);
  return j;
}

Json to_json(const McMullenEstimate& e) {
  Json j;
  j["R"] = e.R;
  j["poles_in_annulus"] = e.poles_in_annulus;
  j["density"] = e.density;
  j["B"] = e.B;
  j["B1"] = e.B1;
  j["Delta"] = e.Delta;
  j["d1"] = e.d1;
  j["raw"] = e.raw;
  j["value"] = e.value;
  return j;
}

Json to_json(const BoxCountReport& b) {
  Json j;
  j["label"] = "crude cross-check";
  j["source"] = b.source;
  j["scales"] = doubles(b.scales);
  j["counts"] = doubles(b.counts);
  j["slope"] = number_or_null(b.slope);
  return j;
}

Json to_json(const DimensionReport& r) {
  Json j;
  j["census"] = r.census_name;
  j["synthetic"] = r.synthetic;
  j["m"] = r.m;
  j["theoretical"] = r.theoretical;
  j["bk_upper"] = r.bk_upper;
  Json tail;
  tail["value"] = r.tail_exponent ? Json(*r.tail_exponent) : Json(nullptr);
  tail["R"] = r.options.R;
  tail["error"] = r.tail_error;
  j["empirical_tail_exponent"] = tail;
  Json bowen = Json::array();
  for (const BowenEntry& b : r.bowen) {
    Json e;
    e["N"] = b.N;
    e["root"] = b.error.empty() ? Json(b.root) : Json(nullptr);
    e["error"] = b.error;
    bowen.push_back(e);
  }
  j["bowen_roots"] = bowen;
  Json mc = Json::array();
  for (const McMullenEntry& m : r.mcmullen) {
    Json e = m.error.empty() ? to_json(m.estimate) : Json::object({{"R", m.R}});
    e["error"] = m.error;
    mc.push_back(e);
  }
  j["mcmullen_lower"] = mc;
  if (r.box) {
    j["box_count"] = to_json(*r.box);
  } else {
    Json b;
    b["label"] = "crude cross-check";
    b["slope"] = nullptr;
    b["error"] = r.box_error;
    j["box_count"] = b;
  }
  Json opts;
  opts["R"] = r.options.R;
  opts["alphabet_sizes"] = r.options.alphabet_sizes;
  opts["R_ladder"] = doubles(r.options.R_ladder);
  opts["C"] = r.options.C;
  opts["C1"] = r.options.C1;
  opts["bisection_tol"] = 1e-10;
  opts["tail_half_tol"] = 0.05;
  opts["ordering_tol"] = r.options.ordering_tol;
  opts["box_depth"] = r.options.box_depth;
  opts["box_symbols"] = r.options.box_symbols;
  opts["box_R"] = r.options.box_R;
  j["tolerances"] = opts;
  Json checks = Json::array();
  for (const OrderingCheck& c : r.checks) {
    Json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["detail"] = c.detail;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["checks_pass"] = r.checks_pass();
  return j;
}

Json to_json(const RunConfig& c) {
  Json f;
  f["name"] = c.name;
  Json p = Json::array();
  for (cplx z : c.poly) p.push_back(complex_pair(z));
  f["p"] = p;
  Json m = Json::array();
  for (cplx z : c.moebius) m.push_back(complex_pair(z));
  f["moebius"] = m;
  f["z0"] = complex_pair(c.z0);
  f["tol"] = c.tol;
  Json j;
  j["function"] = f;
  j["census"] = {{"radius", c.census_radius}, {"allow_incomplete", c.allow_incomplete}};
  j["dimension"] = {{"R", c.R},           {"R_ladder", c.R_ladder},   {"alphabet_sizes", c.alphabet_sizes},
                    {"C", c.C},           {"C1", c.C1},               {"box_depth", c.box_depth},
                    {"box_symbols", c.box_symbols}, {"box_R", c.box_R}};
  j["render"] = {{"window", {c.window.x_min, c.window.x_max, c.window.y_min, c.window.y_max}},
                 {"nx", c.nx},
                 {"ny", c.ny},
                 {"N", c.N},
                 {"R", c.render_R}};
  j["synthetic"] = {{"m", c.synthetic_m}, {"c_mod", c.c_mod}, {"c_res", c.c_res}, {"j_max", c.synthetic_j_max}};
  j["verify"] = {{"samples", c.verify_samples}, {"schwarzian_h", c.schwarzian_h}};
  j["run"] = {{"out", c.out_dir}, {"seed", c.seed}, {"threads", c.threads}};
  return j;
}

}  // namespace nevdim
