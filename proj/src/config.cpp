#include <dscatter/config.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dscatter::cfg {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { fail(Errc::parse_error, what); }

void expect_keys(const json& obj, const std::string& where,
                 const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    if (allowed.count(item.key()) == 0) {
      bad("unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) bad(where + " is missing \"" + key + "\"");
  const json& v = obj.at(key);
  if (!v.is_number()) bad(where + "." + key + " must be a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const std::string& where, const std::string& key,
                     double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) bad(where + "." + key + " must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) bad(where + " is missing \"" + key + "\"");
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad(where + "." + key + " must be an integer");
  return v.get<int>();
}

int get_int_or(const json& obj, const std::string& where, const std::string& key,
               int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad(where + "." + key + " must be an integer");
  return v.get<int>();
}

std::string get_string(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) bad(where + " is missing \"" + key + "\"");
  const json& v = obj.at(key);
  if (!v.is_string()) bad(where + "." + key + " must be a string");
  return v.get<std::string>();
}

cdouble parse_complex(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    bad(where + " must be a complex number encoded as [re, im]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> parse_real_vector(const json& v, const std::string& where) {
  if (!v.is_array()) bad(where + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& x : v) {
    if (!x.is_number()) bad(where + " must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

models::CouplingSpec parse_coupling(const json& obj, const std::string& where) {
  expect_keys(obj, where,
              {"family", "v0", "width", "power", "poly", "tab_k", "tab_v", "decay2"});
  models::CouplingSpec c;
  c.family = models::family_from_name(get_string(obj, where, "family"));
  if (obj.contains("v0")) c.V0 = parse_complex(obj.at("v0"), where + ".v0");
  c.width = get_number_or(obj, where, "width", 1.0);
  c.power = get_number_or(obj, where, "power", 1.0);
  if (obj.contains("poly")) c.poly = parse_real_vector(obj.at("poly"), where + ".poly");
  if (obj.contains("tab_k")) c.tab_k = parse_real_vector(obj.at("tab_k"), where + ".tab_k");
  if (obj.contains("tab_v")) c.tab_v = parse_real_vector(obj.at("tab_v"), where + ".tab_v");
  c.declared_decay2 = get_number_or(obj, where, "decay2", -inf);
  c.validate();
  return c;
}

models::EmitterModel parse_emitter(const json& obj) {
  expect_keys(obj, "model", {"kind", "kr", "u", "coupling"});
  if (!obj.contains("kr") || !obj.at("kr").is_array()) bad("model.kr must be a matrix");
  const json& kr = obj.at("kr");
  const int n = static_cast<int>(kr.size());
  if (n == 0) fail(Errc::validation_error, "model.kr must not be empty");
  if (n > 64) fail(Errc::validation_error, "model.kr is limited to 64 emitters");
  models::EmitterModel m;
  m.KR.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = kr.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      fail(Errc::validation_error, "model.kr must be a square matrix of [re, im] entries");
    }
    for (int j = 0; j < n; ++j) {
      m.KR(i, j) = parse_complex(row.at(j), "model.kr entry");
    }
  }
  if (!obj.contains("u") || !obj.at("u").is_array() ||
      static_cast<int>(obj.at("u").size()) != n) {
    fail(Errc::validation_error,
         "model.u must be a length-" + std::to_string(n) + " complex vector");
  }
  m.u.resize(n);
  for (int i = 0; i < n; ++i) m.u(i) = parse_complex(obj.at("u").at(i), "model.u entry");
  if (!obj.contains("coupling")) bad("model is missing \"coupling\"");
  m.coupling = parse_coupling(obj.at("coupling"), "model.coupling");
  m.validate_shape();
  return m;
}

models::SeparableModel parse_separable(const json& obj) {
  expect_keys(obj, "model", {"kind", "g", "form_factor"});
  models::SeparableModel m;
  m.g = get_number(obj, "model", "g");
  if (!obj.contains("form_factor")) bad("model is missing \"form_factor\"");
  m.form_factor = parse_coupling(obj.at("form_factor"), "model.form_factor");
  m.validate_shape();
  return m;
}

disp::Dispersion parse_dispersion(const json& obj) {
  const std::string kind = get_string(obj, "dispersion", "kind");
  if (kind == "power1d") {
    expect_keys(obj, "dispersion", {"kind", "sigma", "d", "m"});
    disp::Power1D d;
    d.sigma = get_int_or(obj, "dispersion", "sigma", 1);
    d.d = get_number_or(obj, "dispersion", "d", 1.0);
    d.m = get_int(obj, "dispersion", "m");
    d.validate();
    return d;
  }
  if (kind == "isotropic") {
    expect_keys(obj, "dispersion", {"kind", "a", "dim"});
    disp::Isotropic d;
    d.a = get_number(obj, "dispersion", "a");
    d.D = get_int(obj, "dispersion", "dim");
    d.validate();
    return d;
  }
  bad("dispersion.kind must be \"power1d\" or \"isotropic\"");
}

num::QuadratureSpec parse_quadrature(const json& obj) {
  expect_keys(obj, "quadrature", {"rel_tol", "abs_tol", "max_subdivisions"});
  num::QuadratureSpec q;
  q.rel_tol = get_number_or(obj, "quadrature", "rel_tol", q.rel_tol);
  q.abs_tol = get_number_or(obj, "quadrature", "abs_tol", q.abs_tol);
  q.max_subdivisions = get_int_or(obj, "quadrature", "max_subdivisions", q.max_subdivisions);
  q.validate();
  return q;
}

lev::SweepOptions parse_sweep(const json& obj) {
  expect_keys(obj, "sweep",
              {"e_min_frac", "e_max_frac", "points", "tol", "max_refine_rounds"});
  lev::SweepOptions s;
  s.e_min_frac = get_number_or(obj, "sweep", "e_min_frac", s.e_min_frac);
  s.e_max_frac = get_number_or(obj, "sweep", "e_max_frac", s.e_max_frac);
  s.points = get_int_or(obj, "sweep", "points", s.points);
  s.tol = get_number_or(obj, "sweep", "tol", s.tol);
  s.max_refine_rounds = get_int_or(obj, "sweep", "max_refine_rounds", s.max_refine_rounds);
  if (!(s.e_min_frac > 0.0) || !(s.e_max_frac > s.e_min_frac)) {
    bad("sweep range must satisfy 0 < e_min_frac < e_max_frac");
  }
  if (s.points < 8 || s.points > 2000000) bad("sweep.points out of range");
  if (!(s.tol > 0.0)) bad("sweep.tol must be positive");
  return s;
}

}  // namespace

std::uint64_t fnv1a_hash(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  expect_keys(root, "config", {"model", "dispersion", "quadrature", "sweep", "energies"});
  if (!root.contains("model")) bad("config is missing \"model\"");
  if (!root.contains("dispersion")) bad("config is missing \"dispersion\"");

  RunConfig rc;
  rc.source_text = json_text;
  rc.hash = fnv1a_hash(json_text);
  rc.dispersion = parse_dispersion(root.at("dispersion"));

  const json& model = root.at("model");
  const std::string kind = get_string(model, "model", "kind");
  if (kind == "emitter") {
    rc.model = parse_emitter(model);
  } else if (kind == "separable") {
    rc.model = parse_separable(model);
  } else {
    bad("model.kind must be \"emitter\" or \"separable\"");
  }

  if (root.contains("quadrature")) rc.quadrature = parse_quadrature(root.at("quadrature"));
  if (root.contains("sweep")) rc.sweep = parse_sweep(root.at("sweep"));
  if (root.contains("energies")) {
    rc.energies = parse_real_vector(root.at("energies"), "energies");
    for (double e : rc.energies) {
      if (!std::isfinite(e)) bad("energies must be finite");
    }
  }
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::parse_error, "cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

json complex_json(cdouble z) { return json::array({z.real(), z.imag()}); }

json coupling_json(const models::CouplingSpec& c) {
  json j;
  j["family"] = models::family_name(c.family);
  j["v0"] = complex_json(c.V0);
  j["width"] = c.width;
  if (c.family == models::Family::lorentzian_power) j["power"] = c.power;
  if (!c.poly.empty()) j["poly"] = c.poly;
  if (c.family == models::Family::tabulated) {
    j["tab_k"] = c.tab_k;
    j["tab_v"] = c.tab_v;
    if (std::isfinite(c.declared_decay2)) j["decay2"] = c.declared_decay2;
  }
  return j;
}

}  // namespace

std::string serialize_config(const RunConfig& config) {
  json root;

  json model;
  if (const auto* em = std::get_if<models::EmitterModel>(&config.model)) {
    model["kind"] = "emitter";
    json kr = json::array();
    for (Eigen::Index i = 0; i < em->KR.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < em->KR.cols(); ++j) row.push_back(complex_json(em->KR(i, j)));
      kr.push_back(row);
    }
    model["kr"] = kr;
    json u = json::array();
    for (Eigen::Index i = 0; i < em->u.size(); ++i) u.push_back(complex_json(em->u(i)));
    model["u"] = u;
    model["coupling"] = coupling_json(em->coupling);
  } else {
    const auto& sep = std::get<models::SeparableModel>(config.model);
    model["kind"] = "separable";
    model["g"] = sep.g;
    model["form_factor"] = coupling_json(sep.form_factor);
  }
  root["model"] = model;

  json dsp;
  if (const auto* d1 = std::get_if<disp::Power1D>(&config.dispersion)) {
    dsp["kind"] = "power1d";
    dsp["sigma"] = d1->sigma;
    dsp["d"] = d1->d;
    dsp["m"] = d1->m;
  } else {
    const auto& iso = std::get<disp::Isotropic>(config.dispersion);
    dsp["kind"] = "isotropic";
    dsp["a"] = iso.a;
    dsp["dim"] = iso.D;
  }
  root["dispersion"] = dsp;

  json quad;
  quad["rel_tol"] = config.quadrature.rel_tol;
  quad["abs_tol"] = config.quadrature.abs_tol;
  quad["max_subdivisions"] = config.quadrature.max_subdivisions;
  root["quadrature"] = quad;

  json sweep;
  sweep["e_min_frac"] = config.sweep.e_min_frac;
  sweep["e_max_frac"] = config.sweep.e_max_frac;
  sweep["points"] = config.sweep.points;
  sweep["tol"] = config.sweep.tol;
  sweep["max_refine_rounds"] = config.sweep.max_refine_rounds;
  root["sweep"] = sweep;

  if (!config.energies.empty()) root["energies"] = config.energies;
  return root.dump(2);
}

}  // namespace dscatter::cfg
