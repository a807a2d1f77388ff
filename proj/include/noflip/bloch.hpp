#pragma once

// Bloch-sphere geometry of qubit pure states: Pauli expectation map,
// coplanarity / great-circle tests, canonicalization of raw triples to the
// (a, b, c, d, theta) form, and synthesis of the flip unitary of a great circle.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "noflip/linalg.hpp"
#include "noflip/triple.hpp"

namespace noflip {

struct bloch_vec {
  double x = 0.0, y = 0.0, z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

// (x, y, z) = Pauli expectation values; invariant under global phase.
inline bloch_vec bloch_vector(const state_vector& psi, double tol = default_tol) {
  if (psi.dim() != 2) throw std::invalid_argument("bloch_vector: state is not a qubit");
  if (!psi.is_normalized(tol))
    throw std::invalid_argument("bloch_vector: state is not normalized");
  cx a0 = psi.amps[0], a1 = psi.amps[1];
  cx cross = std::conj(a0) * a1;
  return bloch_vec{2.0 * std::real(cross), 2.0 * std::imag(cross),
                   std::norm(a0) - std::norm(a1)};
}

struct qubit_triple {
  state_vector s0, s1, s2;

  qubit_triple(state_vector a, state_vector b, state_vector c)
      : s0(std::move(a)), s1(std::move(b)), s2(std::move(c)) {
    for (const state_vector* s : {&s0, &s1, &s2}) {
      if (s->dim() != 2) throw std::invalid_argument("qubit_triple: all states must be qubits");
      if (!s->is_normalized())
        throw std::invalid_argument("qubit_triple: all states must be normalized");
    }
  }

  // Degenerate triples are allowed; callers that need distinctness ask here.
  std::optional<std::string> degenerate_pair(double tol = default_tol) const {
    auto same = [&](const state_vector& u, const state_vector& v) {
      return 1.0 - std::abs(inner(u, v)) <= tol;
    };
    if (same(s0, s1)) return "s0,s1";
    if (same(s0, s2)) return "s0,s2";
    if (same(s1, s2)) return "s1,s2";
    return std::nullopt;
  }
};

// 3x3 determinant of the stacked Bloch vectors. Zero iff the three states lie
// on one great circle; equals 4 a b c d sin(theta) for a triple in canonical form.
inline double coplanarity_det(const qubit_triple& t) {
  bloch_vec r0 = bloch_vector(t.s0);
  bloch_vec r1 = bloch_vector(t.s1);
  bloch_vec r2 = bloch_vector(t.s2);
  return r0.x * (r1.y * r2.z - r1.z * r2.y) - r0.y * (r1.x * r2.z - r1.z * r2.x) +
         r0.z * (r1.x * r2.y - r1.y * r2.x);
}

inline bool is_great_circle(const qubit_triple& t, double tol = default_tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("is_great_circle: tolerance must be positive");
  return std::abs(coplanarity_det(t)) <= tol;
}

inline qubit_triple member_triple(const flip_triple& t) {
  return qubit_triple(member_ket(t, member_state::zero), member_ket(t, member_state::psi),
                      member_ket(t, member_state::phi));
}

// For canonical parameters the determinant reduces to 4 a b c d sin(theta).
inline bool is_great_circle(const flip_triple& t, double tol = default_tol) {
  return is_great_circle(member_triple(t), tol);
}

// Result of canonicalization. `rotation` is the 2x2 unitary U with
// U s0 ~ |0>, U s1 ~ a|0> + b|1>, U s2 ~ c|0> + d e^{i theta}|1> (each up to
// global phase). When the raw third-state phase lands in (pi, 2pi) the triple
// is reflected through y -> -y (complex conjugation after rotating), which is
// recorded in `reflected`; only |sin theta| enters any criterion.
struct canonical_form {
  flip_triple triple;
  cmatrix rotation;
  bool reflected = false;
};

inline canonical_form canonicalize_triple(const qubit_triple& raw, double deg_tol = 1e-12) {
  const double pi = std::acos(-1.0);
  state_vector s0 = raw.s0.normalized();
  state_vector s1 = raw.s1.normalized();
  state_vector s2 = raw.s2.normalized();

  // rows <s0| and <s0_perp|, so u0 * s0 = |0> exactly
  cmatrix u0(2);
  u0(0, 0) = std::conj(s0.amps[0]);
  u0(0, 1) = std::conj(s0.amps[1]);
  u0(1, 0) = -s0.amps[1];
  u0(1, 1) = s0.amps[0];

  state_vector t1 = apply(u0, s1);
  double a = std::abs(t1.amps[0]);
  double b = std::abs(t1.amps[1]);
  if (b <= deg_tol)
    throw std::invalid_argument("canonicalize_triple: degenerate pair s0,s1 (identical up to phase)");
  if (a <= deg_tol)
    throw std::invalid_argument(
        "canonicalize_triple: s1 orthogonal to s0; canonical form requires a > 0");

  // diag(1, e^{i delta}) aligns psi's |1> component once psi's global phase
  // makes its |0> component real positive
  double delta = std::arg(t1.amps[0]) - std::arg(t1.amps[1]);
  cmatrix u(2);
  u(0, 0) = u0(0, 0);
  u(0, 1) = u0(0, 1);
  cx ph = std::polar(1.0, delta);
  u(1, 0) = ph * u0(1, 0);
  u(1, 1) = ph * u0(1, 1);

  state_vector t2 = apply(u, s2);
  double c = std::abs(t2.amps[0]);
  double d = std::abs(t2.amps[1]);
  if (d <= deg_tol)
    throw std::invalid_argument("canonicalize_triple: degenerate pair s0,s2 (identical up to phase)");
  if (c <= deg_tol)
    throw std::invalid_argument(
        "canonicalize_triple: s2 orthogonal to s0; canonical form requires c > 0");

  double theta_raw = std::arg(t2.amps[1]) - std::arg(t2.amps[0]);
  while (theta_raw > pi) theta_raw -= 2.0 * pi;
  while (theta_raw < -pi) theta_raw += 2.0 * pi;

  bool reflected = theta_raw < 0.0;
  double theta = reflected ? -theta_raw : theta_raw;
  theta = std::min(theta, pi);

  return canonical_form{flip_triple(a, b, c, d, theta), std::move(u), reflected};
}

// Reconstructs the raw states a canonical form came from: applies the member
// kets, undoes the reflection, then the rotation. Outputs match the original
// states up to global phase.
inline qubit_triple synthesize_from(const canonical_form& cf) {
  cmatrix u_inv = cf.rotation.dagger();
  auto back = [&](member_state which) {
    state_vector m = member_ket(cf.triple, which);
    if (cf.reflected)
      for (cx& z : m.amps) z = std::conj(z);
    return apply(u_inv, m);
  };
  return qubit_triple(back(member_state::zero), back(member_state::psi),
                      back(member_state::phi));
}

// U = n . sigma: unitary, Hermitian, and maps every state on the great circle
// orthogonal to n to an orthogonal state.
inline cmatrix great_circle_flipper(const bloch_vec& n, double tol = default_tol) {
  if (std::abs(n.norm() - 1.0) > tol)
    throw std::invalid_argument("great_circle_flipper: axis must be a unit vector");
  cmatrix u(2);
  u(0, 0) = cx{n.z, 0.0};
  u(0, 1) = cx{n.x, -n.y};
  u(1, 0) = cx{n.x, n.y};
  u(1, 1) = cx{-n.z, 0.0};
  return u;
}

}  // namespace noflip
