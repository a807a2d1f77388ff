#pragma once

// The three verification constructions. Each quantity has two derivations:
// a closed form over the triple parameters and machine overlaps, and an
// explicit route through tensor construction, flip channel and partial trace.
// Callers cross-check the two; they must agree to 1e-9 for a correct build.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "noflip/linalg.hpp"
#include "noflip/machine.hpp"
#include "noflip/triple.hpp"

namespace noflip {

// --------------------------------------------------------------------------
// signalling setup: qutrit A entangled with the qubit B the machine acts on

inline constexpr std::size_t signalling_target = 1;

// (1/sqrt(3)) (|0>|0> + |1>|psi> + |2>|phi>), layout {3, 2}
inline state_vector build_signalling_state(const flip_triple& t) {
  const double r = 1.0 / std::sqrt(3.0);
  std::vector<cx> amps(6, cx{0.0, 0.0});
  const std::array<member_state, 3> tags = {member_state::zero, member_state::psi,
                                            member_state::phi};
  for (std::size_t k = 0; k < 3; ++k) {
    state_vector s = member_ket(t, tags[k]);
    amps[k * 2 + 0] += r * s.amps[0];
    amps[k * 2 + 1] += r * s.amps[1];
  }
  return state_vector(std::move(amps), {3, 2});
}

// the decomposition the machine is defined on: one term per member state
inline std::vector<tagged_term> signalling_terms(const flip_triple& t) {
  const double r = 1.0 / std::sqrt(3.0);
  const std::array<member_state, 3> tags = {member_state::zero, member_state::psi,
                                            member_state::phi};
  std::vector<tagged_term> terms;
  for (std::size_t k = 0; k < 3; ++k) {
    state_vector term = tensor(scale(cx{r, 0.0}, basis_ket(3, k)), member_ket(t, tags[k]));
    terms.push_back({tags[k], std::move(term)});
  }
  return terms;
}

// A-marginal before the flip: diag 1/3, overlaps of the three members off-diagonal
inline cmatrix alice_marginal_initial(const flip_triple& t) {
  cmatrix r(3);
  cx w = t.psi_phi_overlap();
  for (std::size_t i = 0; i < 3; ++i) r(i, i) = cx{1.0 / 3.0, 0.0};
  r(0, 1) = cx{t.a / 3.0, 0.0};
  r(1, 0) = r(0, 1);
  r(0, 2) = cx{t.c / 3.0, 0.0};
  r(2, 0) = r(0, 2);
  r(1, 2) = std::conj(w) / 3.0;
  r(2, 1) = w / 3.0;
  return r;
}

// A-marginal after the flip on B; off-diagonals pick up machine overlaps
inline cmatrix alice_marginal_final(const flip_scenario& sc) {
  cmatrix r(3);
  cx w = sc.triple.psi_phi_overlap();
  cx x = sc.machine.x(), y = sc.machine.y();
  cx rel_phase = std::polar(1.0, sc.machine.mu - sc.machine.nu);
  for (std::size_t i = 0; i < 3; ++i) r(i, i) = cx{1.0 / 3.0, 0.0};
  r(0, 1) = -(sc.triple.a / 3.0) * std::conj(x);
  r(1, 0) = std::conj(r(0, 1));
  r(0, 2) = -(sc.triple.c / 3.0) * std::conj(y);
  r(2, 0) = std::conj(r(0, 2));
  r(1, 2) = (w / 3.0) * rel_phase * sc.machine.m_phi_m_psi();
  r(2, 1) = std::conj(r(1, 2));
  return r;
}

// explicit route: run the channel, trace out everything but A
inline state_vector apply_signalling_flip(const flip_scenario& sc) {
  return apply_flip_channel(signalling_terms(sc.triple), signalling_target, sc);
}

inline density_matrix alice_marginal_final_explicit(const flip_scenario& sc) {
  state_vector out = apply_signalling_flip(sc);
  if (std::abs(out.norm() - 1.0) > default_tol)
    throw std::logic_error("signalling flip output lost normalization");
  return marginal_of_state(out, {0});
}

inline double signalling_deviation(const flip_scenario& sc) {
  return trace_distance(density_matrix(alice_marginal_initial(sc.triple)),
                        density_matrix(alice_marginal_final(sc)));
}

// --------------------------------------------------------------------------
// no-signalling constraints: marginal invariance entry by entry

struct nosignalling_residuals {
  double psi_diag = 0.0;       // a|1 + X|
  double phi_diag = 0.0;       // c|1 + Y|
  double cross_phi_psi = 0.0;  // |<phi|psi> - e^{i(mu-nu)} <psi|phi> <M_phi|M_psi>|
  double cross_psi_phi = 0.0;  // conjugate counterpart

  double max_residual() const {
    return std::max(std::max(psi_diag, phi_diag), std::max(cross_phi_psi, cross_psi_phi));
  }
};

inline nosignalling_residuals constraint_residuals(const flip_scenario& sc) {
  nosignalling_residuals r;
  cx w = sc.triple.psi_phi_overlap();
  cx x = sc.machine.x(), y = sc.machine.y();
  cx rel = std::polar(1.0, sc.machine.mu - sc.machine.nu);
  r.psi_diag = sc.triple.a * std::abs(cx{1.0, 0.0} + x);
  r.phi_diag = sc.triple.c * std::abs(cx{1.0, 0.0} + y);
  r.cross_phi_psi = std::abs(std::conj(w) - rel * w * sc.machine.m_phi_m_psi());
  r.cross_psi_phi = std::abs(w - std::conj(rel) * std::conj(w) * sc.machine.gram(1, 2));
  return r;
}

struct feasibility_verdict {
  bool feasible = false;
  std::optional<machine_model> witness;
  std::vector<std::string> violated;
};

// The four constraints are jointly satisfiable iff b = 0 or d = 0 or
// sin(theta) = 0. The witness is the rank-1 machine with M_psi = M_phi = -M_0
// and mu = nu = 0; away from those loci the cross constraints force the
// imaginary part of <psi|phi> to vanish, which b d sin(theta) != 0 forbids.
inline feasibility_verdict nosignalling_feasibility(const flip_triple& t,
                                                    double tol = default_tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("nosignalling_feasibility: tol must be > 0");
  feasibility_verdict v;
  v.feasible = (t.b <= tol) || (t.d <= tol) || (std::abs(std::sin(t.theta)) <= tol);
  if (v.feasible) {
    machine_model w = machine_model::signalling_witness();
    double resid = constraint_residuals({t, w}).max_residual();
    if (resid > default_tol)
      throw std::logic_error("feasibility witness failed its own constraints, residual " +
                             std::to_string(resid));
    v.witness = std::move(w);
  } else {
    v.violated = {"cross_phi_psi", "cross_psi_phi"};
  }
  return v;
}

// --------------------------------------------------------------------------
// entanglement setup: five qubits, machine on the last; A-marginal eigenvalue
// must not grow under the local flip

inline constexpr std::size_t entanglement_target = 4;

namespace detail {

struct ent_group {
  std::array<std::size_t, 3> strings;  // A B1 B2 bit patterns packed as 3-bit ints
  std::size_t count;
  member_state tag;
  double sign;
};

inline std::array<ent_group, 3> ent_groups() {
  return {{{{0b000, 0b111, 0}, 2, member_state::zero, 1.0},
           {{0b010, 0b100, 0b101}, 3, member_state::psi, -1.0},
           {{0b011, 0b110, 0b001}, 3, member_state::phi, -1.0}}};
}

// tail on B3 B4 for each group: |1 0>, |psi_bar psi>, |phi_bar phi>
inline state_vector ent_tail(const flip_triple& t, member_state tag) {
  if (tag == member_state::zero)
    return tensor(qubit_ket(cx{0.0, 0.0}, cx{1.0, 0.0}), qubit_ket(cx{1.0, 0.0}, cx{0.0, 0.0}));
  return tensor(flip_ket(t, tag), member_ket(t, tag));
}

}  // namespace detail

// (1/sqrt(8)) { (|000>+|111>)|10> - (|010>+|100>+|101>)|psi_bar psi>
//               - (|011>+|110>+|001>)|phi_bar phi> }, layout {2,2,2,2,2}
inline state_vector build_entanglement_state(const flip_triple& t) {
  const double r = 1.0 / std::sqrt(8.0);
  std::vector<cx> amps(32, cx{0.0, 0.0});
  for (const auto& g : detail::ent_groups()) {
    state_vector tail = detail::ent_tail(t, g.tag);
    for (std::size_t s = 0; s < g.count; ++s)
      for (std::size_t k = 0; k < 4; ++k)
        amps[g.strings[s] * 4 + k] += g.sign * r * tail.amps[k];
  }
  return state_vector(std::move(amps), {2, 2, 2, 2, 2});
}

inline std::vector<tagged_term> entanglement_terms(const flip_triple& t) {
  const double r = 1.0 / std::sqrt(8.0);
  std::vector<tagged_term> terms;
  for (const auto& g : detail::ent_groups()) {
    state_vector tail = detail::ent_tail(t, g.tag);
    std::vector<cx> amps(32, cx{0.0, 0.0});
    for (std::size_t s = 0; s < g.count; ++s)
      for (std::size_t k = 0; k < 4; ++k)
        amps[g.strings[s] * 4 + k] += g.sign * r * tail.amps[k];
    terms.push_back({g.tag, state_vector(std::move(amps), {2, 2, 2, 2, 2})});
  }
  return terms;
}

struct lambda_pair_t {
  double lambda_i = 0.0;
  double lambda_f = 0.0;
};

// Z = Re[e^{i(mu-nu)} <psi|phi>^2 <M_phi|M_psi>]
inline double z_value(const flip_scenario& sc) {
  cx w = sc.triple.psi_phi_overlap();
  return (std::polar(1.0, sc.machine.mu - sc.machine.nu) * w * w * sc.machine.m_phi_m_psi())
      .real();
}

// closed-form A-marginals of the five-qubit construction
inline cmatrix entanglement_marginal_initial(const flip_triple& t) {
  cmatrix r(2);
  double s = std::norm(t.psi_phi_overlap());
  double off = (t.a * t.a + t.c * t.c + 2.0 * s) / 8.0;
  r(0, 0) = r(1, 1) = cx{0.5, 0.0};
  r(0, 1) = r(1, 0) = cx{off, 0.0};
  return r;
}

inline cmatrix entanglement_marginal_final(const flip_scenario& sc) {
  cmatrix r(2);
  double a2 = sc.triple.a * sc.triple.a, c2 = sc.triple.c * sc.triple.c;
  cx off = (2.0 * z_value(sc) - a2 * std::conj(sc.machine.x()) - c2 * sc.machine.y()) / 8.0;
  r(0, 0) = r(1, 1) = cx{0.5, 0.0};
  r(0, 1) = off;
  r(1, 0) = std::conj(off);
  return r;
}

// closed forms: largest A-marginal eigenvalues before and after the flip
inline lambda_pair_t lambda_pair(const flip_scenario& sc) {
  const flip_triple& t = sc.triple;
  double s = std::norm(t.psi_phi_overlap());
  double a2 = t.a * t.a, c2 = t.c * t.c;
  lambda_pair_t lp;
  lp.lambda_i = 0.5 + (2.0 * s + a2 + c2) / 8.0;
  cx off = 2.0 * z_value(sc) - a2 * std::conj(sc.machine.x()) - c2 * sc.machine.y();
  lp.lambda_f = 0.5 + std::abs(off) / 8.0;
  return lp;
}

inline state_vector apply_entanglement_flip(const flip_scenario& sc) {
  return apply_flip_channel(entanglement_terms(sc.triple), entanglement_target, sc);
}

// explicit route through the 96-dim construction
inline lambda_pair_t lambda_pair_explicit(const flip_scenario& sc) {
  lambda_pair_t lp;
  density_matrix rho_i = marginal_of_state(build_entanglement_state(sc.triple), {0});
  lp.lambda_i = hermitian_eigenvalues(rho_i.entries).back();
  state_vector out = apply_entanglement_flip(sc);
  if (std::abs(out.norm() - 1.0) > default_tol)
    throw std::logic_error("entanglement flip output lost normalization");
  density_matrix rho_f = marginal_of_state(out, {0});
  lp.lambda_f = hermitian_eigenvalues(rho_f.entries).back();
  return lp;
}

struct gain_report {
  lambda_pair_t closed;
  lambda_pair_t explicit_route;
  double entropy_i = 0.0;  // bits, from the explicit marginals
  double entropy_f = 0.0;
  double gain_bits = 0.0;
  double cross_check = 0.0;  // max |closed - explicit|
};

inline gain_report entanglement_gain(const flip_scenario& sc) {
  gain_report g;
  g.closed = lambda_pair(sc);
  g.explicit_route = lambda_pair_explicit(sc);
  g.entropy_i = binary_entropy(g.explicit_route.lambda_i);
  g.entropy_f = binary_entropy(g.explicit_route.lambda_f);
  g.gain_bits = g.entropy_f - g.entropy_i;
  g.cross_check = std::max(std::abs(g.closed.lambda_i - g.explicit_route.lambda_i),
                           std::abs(g.closed.lambda_f - g.explicit_route.lambda_f));
  return g;
}

// --------------------------------------------------------------------------
// eigenvalue-monotonicity certificate: six manifestly nonnegative terms whose
// sum equals (2|<psi|phi>|^2 + a^2 + c^2)^2 - |2Z - a^2 X* - c^2 Y|^2

struct monotonicity_certificate {
  cx x, y;
  double z = 0.0;
  double s = 0.0;  // |<psi|phi>|^2
  std::array<double, 6> terms{};
  double term_sum = 0.0;
  double squared_difference = 0.0;  // the identity's left side, for cross-check
};

inline monotonicity_certificate monotonicity_terms(const flip_scenario& sc) {
  monotonicity_certificate m;
  const flip_triple& t = sc.triple;
  m.x = sc.machine.x();
  m.y = sc.machine.y();
  m.z = z_value(sc);
  m.s = std::norm(t.psi_phi_overlap());
  double a2 = t.a * t.a, c2 = t.c * t.c;
  m.terms[0] = a2 * a2 * (1.0 - std::norm(m.x));
  m.terms[1] = c2 * c2 * (1.0 - std::norm(m.y));
  m.terms[2] = 2.0 * a2 * c2 * (1.0 - (m.x * m.y).real());
  m.terms[3] = 4.0 * a2 * (m.s + m.z * m.x.real());
  m.terms[4] = 4.0 * c2 * (m.s + m.z * m.y.real());
  m.terms[5] = 4.0 * (m.s * m.s - m.z * m.z);
  for (double v : m.terms) m.term_sum += v;
  double lhs = 2.0 * m.s + a2 + c2;
  cx off = 2.0 * m.z - a2 * std::conj(m.x) - c2 * m.y;
  m.squared_difference = lhs * lhs - std::norm(off);
  return m;
}

// --------------------------------------------------------------------------
// product setup: three qubits, A:B product before the flip, machine on B2

inline constexpr std::size_t product_target = 2;

namespace detail {

inline double product_prefactor(const flip_triple& t) {
  double bd2 = t.b * t.b + t.d * t.d;
  if (bd2 <= 1e-12)
    throw std::invalid_argument("product construction undefined when b and d both vanish");
  return 1.0 / std::sqrt(2.0 * bd2);
}

}  // namespace detail

// (1/sqrt(b^2+d^2)) { |0> (|0 psi> - |psi 0>)/sqrt(2)
//                   + |1> (|0 phi> - |phi 0>)/sqrt(2) }, layout {2,2,2};
// equals (b|0> + d e^{i theta}|1>) x singlet up to the same normalization
inline state_vector build_product_state(const flip_triple& t) {
  const double pref = detail::product_prefactor(t);
  state_vector zero = qubit_ket(cx{1.0, 0.0}, cx{0.0, 0.0});
  state_vector psi = member_ket(t, member_state::psi);
  state_vector phi = member_ket(t, member_state::phi);
  std::vector<cx> amps(8, cx{0.0, 0.0});
  auto put = [&](std::size_t a_bit, const state_vector& b1, const state_vector& b2, double sign) {
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        amps[a_bit * 4 + j * 2 + k] += sign * pref * b1.amps[j] * b2.amps[k];
  };
  put(0, zero, psi, 1.0);
  put(0, psi, zero, -1.0);
  put(1, zero, phi, 1.0);
  put(1, phi, zero, -1.0);
  return state_vector(std::move(amps), {2, 2, 2});
}

inline std::vector<tagged_term> product_terms(const flip_triple& t) {
  const double pref = detail::product_prefactor(t);
  state_vector zero = qubit_ket(cx{1.0, 0.0}, cx{0.0, 0.0});
  state_vector psi = member_ket(t, member_state::psi);
  state_vector phi = member_ket(t, member_state::phi);
  auto make = [&](std::size_t a_bit, const state_vector& b1, const state_vector& b2, double sign) {
    std::vector<cx> amps(8, cx{0.0, 0.0});
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        amps[a_bit * 4 + j * 2 + k] = sign * pref * b1.amps[j] * b2.amps[k];
    return state_vector(std::move(amps), {2, 2, 2});
  };
  std::vector<tagged_term> terms;
  terms.push_back({member_state::psi, make(0, zero, psi, 1.0)});
  terms.push_back({member_state::zero, make(0, psi, zero, -1.0)});
  terms.push_back({member_state::phi, make(1, zero, phi, 1.0)});
  terms.push_back({member_state::zero, make(1, phi, zero, -1.0)});
  return terms;
}

struct product_result {
  state_vector final_state;           // normalized, layout {2,2,2,3}
  double raw_norm = 0.0;              // channel output norm before renormalizing
  double n_computed = 0.0;            // raw_norm^2 * (b^2 + d^2)
  double n_closed = 0.0;              // 2 + a^2 Re X + c^2 Re Y
  double entanglement_initial = 0.0;  // A-marginal entropy before, bits
  double entanglement_final = 0.0;    // and after
};

inline product_result product_flip(const flip_scenario& sc) {
  const flip_triple& t = sc.triple;
  product_result r;
  state_vector initial = build_product_state(t);
  r.entanglement_initial = von_neumann_entropy(marginal_of_state(initial, {0}));
  state_vector raw = apply_flip_channel(product_terms(t), product_target, sc);
  r.raw_norm = raw.norm();
  if (r.raw_norm <= 1e-12)
    throw std::logic_error("product flip output vanished; cannot normalize");
  double bd2 = t.b * t.b + t.d * t.d;
  r.n_computed = r.raw_norm * r.raw_norm * bd2;
  r.n_closed = 2.0 + t.a * t.a * sc.machine.x().real() + t.c * t.c * sc.machine.y().real();
  r.final_state = raw.normalized();
  r.entanglement_final = von_neumann_entropy(marginal_of_state(r.final_state, {0}));
  return r;
}

}  // namespace noflip
