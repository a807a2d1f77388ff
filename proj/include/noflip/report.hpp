#pragma once

// Per-scenario verification report with a fixed 16-field schema, serialized
// to one CSV row or a flat JSON object. Numbers print with 17 significant
// digits via to_chars, so output is locale-independent and bit-faithful.

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <system_error>

#include <json.hpp>

#include "noflip/bloch.hpp"
#include "noflip/constructions.hpp"
#include "noflip/machine.hpp"
#include "noflip/triple.hpp"

namespace noflip {

inline std::string format_double(double v) {
  std::array<char, 64> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  if (res.ec != std::errc{}) throw std::logic_error("format_double: conversion failed");
  return std::string(buf.data(), res.ptr);
}

// ---------------------------------------------------------------------------
// machine (de)serialization: {"mu": .., "nu": .., "gram": [[re, im] x 9]}
// with the gram flattened row-major

inline nlohmann::ordered_json machine_to_json(const machine_model& m) {
  nlohmann::ordered_json gram = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      gram.push_back({m.gram(i, j).real(), m.gram(i, j).imag()});
  nlohmann::ordered_json j;
  j["mu"] = m.mu;
  j["nu"] = m.nu;
  j["gram"] = std::move(gram);
  return j;
}

inline machine_model machine_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("machine json: expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "mu" && key != "nu" && key != "gram")
      throw std::invalid_argument("machine json: unknown key '" + key + "'");
  }
  if (!j.contains("mu") || !j.contains("nu") || !j.contains("gram"))
    throw std::invalid_argument("machine json: requires keys mu, nu, gram");
  if (!j["mu"].is_number() || !j["nu"].is_number())
    throw std::invalid_argument("machine json: mu and nu must be numbers");
  const auto& g = j["gram"];
  if (!g.is_array() || g.size() != 9)
    throw std::invalid_argument("machine json: gram must be 9 [re, im] pairs, row-major");
  cmatrix gram(3);
  for (std::size_t k = 0; k < 9; ++k) {
    const auto& pair = g[k];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
      throw std::invalid_argument("machine json: gram entries must be [re, im] number pairs");
    gram.a[k] = cx{pair[0].get<double>(), pair[1].get<double>()};
  }
  return machine_model::from_gram(j["mu"].get<double>(), j["nu"].get<double>(), gram);
}

// ---------------------------------------------------------------------------
// verification report

struct verification_report {
  double triple_a = 0.0, triple_b = 0.0, triple_c = 0.0, triple_d = 0.0, theta = 0.0;
  double mu = 0.0, nu = 0.0;
  double deviation = 0.0;
  double lambda_i = 0.0, lambda_f = 0.0;
  double entropy_i = 0.0, entropy_f = 0.0, gain = 0.0;
  double n_value = std::numeric_limits<double>::quiet_NaN();  // NaN when b = d = 0
  bool great_circle = false;
  bool feasible = false;
};

inline const std::array<const char*, 16>& report_fields() {
  static const std::array<const char*, 16> names = {
      "triple_a",  "triple_b",  "triple_c", "triple_d", "theta",    "mu",
      "nu",        "deviation", "lambda_i", "lambda_f", "entropy_i", "entropy_f",
      "gain",      "n_value",   "great_circle", "feasible"};
  return names;
}

struct report_options {
  double great_circle_tol = 1e-9;
  double feasibility_tol = 1e-9;
  double cross_check_tol = 1e-9;  // closed form vs explicit construction
};

// Evaluates every construction for the scenario. The closed forms and the
// explicit tensor routes must agree within cross_check_tol or this throws:
// a disagreement is a defect in the build, not a property of the scenario.
inline verification_report make_report(const flip_scenario& sc, const report_options& opt = {}) {
  verification_report r;
  r.triple_a = sc.triple.a;
  r.triple_b = sc.triple.b;
  r.triple_c = sc.triple.c;
  r.triple_d = sc.triple.d;
  r.theta = sc.triple.theta;
  r.mu = sc.machine.mu;
  r.nu = sc.machine.nu;

  r.deviation = signalling_deviation(sc);
  double worst = alice_marginal_final_explicit(sc).entries.max_abs_diff(alice_marginal_final(sc));

  gain_report g = entanglement_gain(sc);
  worst = std::max(worst, g.cross_check);
  r.lambda_i = g.closed.lambda_i;
  r.lambda_f = g.closed.lambda_f;
  r.entropy_i = g.entropy_i;
  r.entropy_f = g.entropy_f;
  r.gain = g.gain_bits;

  if (sc.triple.b * sc.triple.b + sc.triple.d * sc.triple.d > 1e-12) {
    product_result p = product_flip(sc);
    worst = std::max(worst, std::abs(p.n_computed - p.n_closed));
    r.n_value = p.n_computed;
  }

  if (worst > opt.cross_check_tol)
    throw std::logic_error("closed forms and explicit constructions disagree by " +
                           format_double(worst));

  r.great_circle = is_great_circle(sc.triple, opt.great_circle_tol);
  r.feasible = nosignalling_feasibility(sc.triple, opt.feasibility_tol).feasible;
  return r;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_header() {
  std::string line;
  for (std::size_t i = 0; i < report_fields().size(); ++i) {
    if (i) line += ',';
    line += report_fields()[i];
  }
  return line;
}

inline std::string csv_row(const verification_report& r) {
  std::string line;
  const std::array<double, 14> nums = {r.triple_a,  r.triple_b, r.triple_c, r.triple_d, r.theta,
                                       r.mu,        r.nu,       r.deviation, r.lambda_i, r.lambda_f,
                                       r.entropy_i, r.entropy_f, r.gain,     r.n_value};
  for (double v : nums) {
    line += format_double(v);
    line += ',';
  }
  line += r.great_circle ? "true" : "false";
  line += ',';
  line += r.feasible ? "true" : "false";
  return line;
}

// ---------------------------------------------------------------------------
// JSON: flat object, fixed field order, n_value null when undefined

inline nlohmann::ordered_json report_to_json(const verification_report& r) {
  nlohmann::ordered_json j;
  j["triple_a"] = r.triple_a;
  j["triple_b"] = r.triple_b;
  j["triple_c"] = r.triple_c;
  j["triple_d"] = r.triple_d;
  j["theta"] = r.theta;
  j["mu"] = r.mu;
  j["nu"] = r.nu;
  j["deviation"] = r.deviation;
  j["lambda_i"] = r.lambda_i;
  j["lambda_f"] = r.lambda_f;
  j["entropy_i"] = r.entropy_i;
  j["entropy_f"] = r.entropy_f;
  j["gain"] = r.gain;
  if (std::isnan(r.n_value))
    j["n_value"] = nullptr;
  else
    j["n_value"] = r.n_value;
  j["great_circle"] = r.great_circle;
  j["feasible"] = r.feasible;
  return j;
}

inline verification_report report_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("report json: expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* name : report_fields()) known = known || key == name;
    if (!known) throw std::invalid_argument("report json: unknown key '" + key + "'");
  }
  auto need = [&](const char* name) -> const nlohmann::json& {
    if (!j.contains(name))
      throw std::invalid_argument(std::string("report json: missing key '") + name + "'");
    return j.at(name);
  };
  auto num = [&](const char* name) {
    const auto& v = need(name);
    if (!v.is_number()) throw std::invalid_argument(std::string("report json: '") + name + "' must be a number");
    return v.get<double>();
  };
  auto flag = [&](const char* name) {
    const auto& v = need(name);
    if (!v.is_boolean()) throw std::invalid_argument(std::string("report json: '") + name + "' must be a boolean");
    return v.get<bool>();
  };
  verification_report r;
  r.triple_a = num("triple_a");
  r.triple_b = num("triple_b");
  r.triple_c = num("triple_c");
  r.triple_d = num("triple_d");
  r.theta = num("theta");
  r.mu = num("mu");
  r.nu = num("nu");
  r.deviation = num("deviation");
  r.lambda_i = num("lambda_i");
  r.lambda_f = num("lambda_f");
  r.entropy_i = num("entropy_i");
  r.entropy_f = num("entropy_f");
  r.gain = num("gain");
  const auto& nv = need("n_value");
  if (nv.is_null())
    r.n_value = std::numeric_limits<double>::quiet_NaN();
  else if (nv.is_number())
    r.n_value = nv.get<double>();
  else
    throw std::invalid_argument("report json: 'n_value' must be a number or null");
  r.great_circle = flag("great_circle");
  r.feasible = flag("feasible");
  return r;
}

}  // namespace noflip
