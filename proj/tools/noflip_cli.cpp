// Command-line surface for the flip verification toolkit.
//
// Exit codes: 0 success, 1 internal consistency failure (closed form and
// explicit construction disagree), 2 argument or config error, 3 I/O failure.
// Machine-readable payload goes to stdout (or --out); cross-derivation
// diagnostics go to stderr.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "noflip/noflip.hpp"

namespace {

using noflip::cx;

struct triple_args {
  std::optional<double> a, b, c, d, theta;
};

// Each pair may be given as either coordinate; the other follows from
// normalization. Defaults fall back to a = c = 1/sqrt(2), theta = pi/2.
noflip::flip_triple resolve_triple(const triple_args& ta) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  auto resolve_pair = [](std::optional<double> lead, std::optional<double> trail,
                         double fallback) {
    if (lead && trail) return std::pair<double, double>{*lead, *trail};
    if (lead)
      return std::pair<double, double>{*lead, std::sqrt(std::max(0.0, 1.0 - *lead * *lead))};
    if (trail)
      return std::pair<double, double>{std::sqrt(std::max(0.0, 1.0 - *trail * *trail)), *trail};
    return std::pair<double, double>{fallback, std::sqrt(std::max(0.0, 1.0 - fallback * fallback))};
  };
  auto [a, b] = resolve_pair(ta.a, ta.b, inv_sqrt2);
  auto [c, d] = resolve_pair(ta.c, ta.d, inv_sqrt2);
  double theta = ta.theta.value_or(std::acos(-1.0) / 2.0);
  return noflip::flip_triple(a, b, c, d, theta);
}

struct machine_args {
  std::string spec = "trivial";
  std::optional<double> mu, nu;
  std::uint64_t seed = 1;
};

noflip::machine_model resolve_machine(const machine_args& ma) {
  noflip::machine_model m;
  if (ma.spec == "trivial") {
    m = noflip::machine_model::trivial();
  } else if (ma.spec == "identity-gram") {
    m = noflip::machine_model::identity_gram();
  } else if (ma.spec == "witness") {
    m = noflip::machine_model::signalling_witness();
  } else if (ma.spec == "random") {
    std::mt19937_64 rng(noflip::mix_seed(ma.seed, 0));
    m = noflip::random_machine(rng);
  } else if (ma.spec.rfind("file:", 0) == 0) {
    std::string path = ma.spec.substr(5);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw noflip::io_error("cannot read machine file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument("machine file '" + path + "': invalid JSON: " + e.what());
    }
    m = noflip::machine_from_json(j);
  } else {
    throw std::invalid_argument(
        "--machine must be trivial, identity-gram, witness, random or file:PATH");
  }
  // phase overrides leave the gram untouched
  if (ma.mu) m.mu = *ma.mu;
  if (ma.nu) m.nu = *ma.nu;
  return m;
}

void emit(const std::string& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  noflip::write_file(out_path, payload);
}

std::string render_report(const noflip::verification_report& r, const std::string& format) {
  if (format == "csv") return noflip::csv_header() + "\n" + noflip::csv_row(r) + "\n";
  return noflip::report_to_json(r).dump(2) + "\n";
}

noflip::state_vector parse_qubit(const std::string& text, const char* flag) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(piece, &used);
      while (used < piece.size() && std::isspace(static_cast<unsigned char>(piece[used]))) ++used;
      if (used != piece.size()) throw std::invalid_argument("trailing text");
      vals.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(flag) + ": expected re0,im0,re1,im1, got '" + text +
                                  "'");
    }
  }
  if (vals.size() != 4)
    throw std::invalid_argument(std::string(flag) + ": expected exactly 4 comma-separated reals");
  return noflip::qubit_ket(cx{vals[0], vals[1]}, cx{vals[2], vals[3]});
}

int run_verify_signalling(const noflip::flip_scenario& sc, const std::string& format,
                          const std::string& out, double tol) {
  noflip::report_options opt;
  opt.great_circle_tol = tol;
  opt.feasibility_tol = tol;
  noflip::verification_report r = noflip::make_report(sc, opt);

  double final_gap =
      noflip::alice_marginal_final_explicit(sc).entries.max_abs_diff(noflip::alice_marginal_final(sc));
  noflip::nosignalling_residuals res = noflip::constraint_residuals(sc);
  std::cerr << "remote marginal deviation (trace distance): " << noflip::format_double(r.deviation)
            << "\n"
            << "final marginal, closed form vs constructed: max gap "
            << noflip::format_double(final_gap) << "\n"
            << "constraint residuals: psi_diag " << noflip::format_double(res.psi_diag)
            << ", phi_diag " << noflip::format_double(res.phi_diag) << ", cross_phi_psi "
            << noflip::format_double(res.cross_phi_psi) << ", cross_psi_phi "
            << noflip::format_double(res.cross_psi_phi) << "\n";
  emit(render_report(r, format), out);
  return 0;
}

int run_verify_entanglement(const noflip::flip_scenario& sc, const std::string& format,
                            const std::string& out, double tol) {
  noflip::report_options opt;
  opt.great_circle_tol = tol;
  opt.feasibility_tol = tol;
  noflip::verification_report r = noflip::make_report(sc, opt);

  noflip::gain_report g = noflip::entanglement_gain(sc);
  noflip::monotonicity_certificate mc = noflip::monotonicity_terms(sc);
  std::cerr << "largest marginal eigenvalue before: closed "
            << noflip::format_double(g.closed.lambda_i) << ", constructed "
            << noflip::format_double(g.explicit_route.lambda_i) << "\n"
            << "largest marginal eigenvalue after:  closed "
            << noflip::format_double(g.closed.lambda_f) << ", constructed "
            << noflip::format_double(g.explicit_route.lambda_f) << "\n"
            << "entropy gain (bits): " << noflip::format_double(g.gain_bits) << "\n"
            << "monotonicity terms:";
  for (double v : mc.terms) std::cerr << ' ' << noflip::format_double(v);
  std::cerr << "\nterm sum " << noflip::format_double(mc.term_sum)
            << " vs squared difference " << noflip::format_double(mc.squared_difference) << "\n";
  emit(render_report(r, format), out);
  return 0;
}

int run_verify_product(const noflip::flip_scenario& sc, const std::string& format,
                       const std::string& out, double tol) {
  noflip::report_options opt;
  opt.great_circle_tol = tol;
  opt.feasibility_tol = tol;
  noflip::verification_report r = noflip::make_report(sc, opt);

  noflip::product_result p = noflip::product_flip(sc);
  std::cerr << "normalization N: constructed " << noflip::format_double(p.n_computed)
            << ", closed " << noflip::format_double(p.n_closed) << "\n"
            << "entanglement across the A:B cut (bits): before "
            << noflip::format_double(p.entanglement_initial) << ", after "
            << noflip::format_double(p.entanglement_final) << "\n";
  emit(render_report(r, format), out);
  return 0;
}

int run_feasibility(const noflip::flip_triple& t, const std::string& format,
                    const std::string& out, double tol) {
  noflip::feasibility_verdict v = noflip::nosignalling_feasibility(t, tol);
  nlohmann::ordered_json j;
  j["feasible"] = v.feasible;
  if (v.witness) {
    j["witness"] = noflip::machine_to_json(*v.witness);
    double resid = noflip::constraint_residuals({t, *v.witness}).max_residual();
    j["witness_max_residual"] = resid;
    std::cerr << "witness machine keeps the remote marginal fixed; max residual "
              << noflip::format_double(resid) << "\n";
  } else {
    j["witness"] = nullptr;
    std::cerr << "no machine can keep the remote marginal fixed for this triple\n";
  }
  j["violated"] = v.violated;
  std::string payload;
  if (format == "csv") {
    payload = "feasible,violated\n";
    payload += v.feasible ? "true," : "false,";
    for (std::size_t i = 0; i < v.violated.size(); ++i) {
      if (i) payload += ';';
      payload += v.violated[i];
    }
    payload += "\n";
  } else {
    payload = j.dump(2) + "\n";
  }
  emit(payload, out);
  return 0;
}

int run_check_great_circle(const noflip::qubit_triple& qt, const std::string& format,
                           const std::string& out, double tol) {
  double det = noflip::coplanarity_det(qt);
  bool verdict = noflip::is_great_circle(qt, tol);
  std::optional<std::string> degenerate = qt.degenerate_pair();

  nlohmann::ordered_json j;
  j["determinant"] = det;
  j["great_circle"] = verdict;
  if (degenerate) {
    j["degenerate_pair"] = *degenerate;
    j["canonical"] = nullptr;
    std::cerr << "states " << *degenerate
              << " coincide up to phase; canonical parameters are undefined\n";
  } else {
    j["degenerate_pair"] = nullptr;
    noflip::canonical_form cf = noflip::canonicalize_triple(qt);
    nlohmann::ordered_json c;
    c["a"] = cf.triple.a;
    c["b"] = cf.triple.b;
    c["c"] = cf.triple.c;
    c["d"] = cf.triple.d;
    c["theta"] = cf.triple.theta;
    c["reflected"] = cf.reflected;
    j["canonical"] = std::move(c);
    std::cerr << "canonical parameters: a " << noflip::format_double(cf.triple.a) << ", b "
              << noflip::format_double(cf.triple.b) << ", c " << noflip::format_double(cf.triple.c)
              << ", d " << noflip::format_double(cf.triple.d) << ", theta "
              << noflip::format_double(cf.triple.theta) << (cf.reflected ? " (reflected)" : "")
              << "\n";
  }

  std::string payload;
  if (format == "csv") {
    payload = "determinant,great_circle,degenerate_pair\n";
    payload += noflip::format_double(det);
    payload += verdict ? ",true," : ",false,";
    if (degenerate) payload += *degenerate;
    payload += "\n";
  } else {
    payload = j.dump(2) + "\n";
  }
  emit(payload, out);
  return 0;
}

int run_sweep_cmd(const std::string& config_path) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw noflip::io_error("cannot read config '" + config_path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  noflip::sweep_config cfg = noflip::parse_sweep_config_text(text);
  noflip::run_manifest m = noflip::run_sweep(cfg, text);
  std::cerr << "wrote " << m.rows << " rows to " << cfg.out_path << "\n";
  std::cout << noflip::manifest_to_json(m).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical checks that exact flipping of three qubit states off a great circle "
               "would signal and raise entanglement under local operations"};
  app.require_subcommand(1);

  triple_args ta;
  machine_args ma;
  std::string format = "json";
  std::string out_path;
  double tol = noflip::default_tol;

  auto add_common = [&](CLI::App* sub, bool with_machine) {
    sub->add_option("--a", ta.a, "first-state overlap with |0> (derived from --b when omitted)");
    sub->add_option("--b", ta.b, "first-state |1> weight");
    sub->add_option("--c", ta.c, "second-state overlap with |0> (derived from --d when omitted)");
    sub->add_option("--d", ta.d, "second-state |1> weight");
    sub->add_option("--theta", ta.theta, "relative phase in [0, pi], radians (default pi/2)");
    sub->add_option("--tol", tol, "tolerance for great-circle and feasibility checks");
    sub->add_option("--format", format, "payload format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", out_path, "write the payload to a file instead of stdout");
    if (with_machine) {
      sub->add_option("--machine", ma.spec,
                      "machine: trivial, identity-gram, witness, random or file:PATH");
      sub->add_option("--mu", ma.mu, "override the psi flip phase, radians");
      sub->add_option("--nu", ma.nu, "override the phi flip phase, radians");
      sub->add_option("--seed", ma.seed, "seed for --machine random");
    }
  };

  CLI::App* sig = app.add_subcommand("verify-signalling",
                                     "deviation of the remote marginal under a local flip");
  add_common(sig, true);
  CLI::App* ent = app.add_subcommand("verify-entanglement",
                                     "marginal eigenvalues and entropy gain under a local flip");
  add_common(ent, true);
  CLI::App* prod = app.add_subcommand("verify-product",
                                      "product state gaining entanglement under a local flip");
  add_common(prod, true);
  CLI::App* feas = app.add_subcommand("feasibility",
                                      "whether any machine keeps the remote marginal fixed");
  add_common(feas, false);

  CLI::App* gc = app.add_subcommand("check-great-circle",
                                    "coplanarity of three explicit qubit states");
  std::string s0_text, s1_text, s2_text;
  gc->add_option("--s0", s0_text, "first state as re0,im0,re1,im1")->required();
  gc->add_option("--s1", s1_text, "second state as re0,im0,re1,im1")->required();
  gc->add_option("--s2", s2_text, "third state as re0,im0,re1,im1")->required();
  gc->add_option("--tol", tol, "coplanarity tolerance");
  gc->add_option("--format", format, "payload format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  gc->add_option("--out", out_path, "write the payload to a file instead of stdout");

  CLI::App* sweep = app.add_subcommand("sweep", "batch scenarios from a JSON config");
  std::string config_path;
  sweep->add_option("config", config_path, "path to the sweep config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(sweep)) return run_sweep_cmd(config_path);
    if (app.got_subcommand(gc)) {
      noflip::qubit_triple qt(parse_qubit(s0_text, "--s0"), parse_qubit(s1_text, "--s1"),
                              parse_qubit(s2_text, "--s2"));
      return run_check_great_circle(qt, format, out_path, tol);
    }
    noflip::flip_triple t = resolve_triple(ta);
    if (app.got_subcommand(feas)) return run_feasibility(t, format, out_path, tol);
    noflip::flip_scenario sc{t, resolve_machine(ma)};
    if (app.got_subcommand(sig)) return run_verify_signalling(sc, format, out_path, tol);
    if (app.got_subcommand(ent)) return run_verify_entanglement(sc, format, out_path, tol);
    if (app.got_subcommand(prod)) return run_verify_product(sc, format, out_path, tol);
    std::cerr << "no subcommand dispatched\n";
    return 2;
  } catch (const noflip::io_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "internal consistency failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
