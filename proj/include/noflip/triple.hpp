#pragma once

// Canonical parameterization of three qubit states:
//   |0>,  |psi> = a|0> + b|1>,  |phi> = c|0> + d e^{i theta}|1>
// with a^2 + b^2 = 1 = c^2 + d^2, a > 0, c > 0, b >= 0, d >= 0,
// theta in [0, pi]. The boundary values theta in {0, pi} and b = 0 / d = 0
// are the great-circle cases and are accepted.

#include <cmath>
#include <stdexcept>

#include "noflip/linalg.hpp"

namespace noflip {

enum class member_state { zero, psi, phi };

inline const char* member_name(member_state m) {
  switch (m) {
    case member_state::zero: return "zero";
    case member_state::psi: return "psi";
    case member_state::phi: return "phi";
  }
  return "?";
}

struct flip_triple {
  double a, b, c, d, theta;

  flip_triple(double a_, double b_, double c_, double d_, double theta_)
      : a(a_), b(b_), c(c_), d(d_), theta(theta_) {
    constexpr double norm_tol = 1e-10;
    if (std::abs(a * a + b * b - 1.0) > norm_tol)
      throw std::invalid_argument("flip_triple: a^2 + b^2 != 1");
    if (std::abs(c * c + d * d - 1.0) > norm_tol)
      throw std::invalid_argument("flip_triple: c^2 + d^2 != 1");
    if (!(a > 0.0) || !(c > 0.0))
      throw std::invalid_argument("flip_triple: requires a > 0 and c > 0");
    if (b < 0.0 || d < 0.0)
      throw std::invalid_argument("flip_triple: requires b >= 0 and d >= 0");
    if (!(theta >= 0.0 && theta <= std::acos(-1.0)))
      throw std::invalid_argument("flip_triple: theta outside [0, pi]");
  }

  // b and d derived as +sqrt(1 - a^2), +sqrt(1 - c^2)
  static flip_triple from_ac(double a, double c, double theta) {
    if (!(a > 0.0 && a <= 1.0) || !(c > 0.0 && c <= 1.0))
      throw std::invalid_argument("flip_triple: a and c must lie in (0, 1]");
    return flip_triple(a, std::sqrt(std::max(0.0, 1.0 - a * a)), c,
                       std::sqrt(std::max(0.0, 1.0 - c * c)), theta);
  }

  // <psi|phi> = a c + b d e^{i theta}
  cx psi_phi_overlap() const { return cx{a * c, 0.0} + b * d * std::polar(1.0, theta); }
};

inline state_vector member_ket(const flip_triple& t, member_state which) {
  switch (which) {
    case member_state::zero: return qubit_ket({1.0, 0.0}, {0.0, 0.0});
    case member_state::psi: return qubit_ket({t.a, 0.0}, {t.b, 0.0});
    case member_state::phi: return qubit_ket({t.c, 0.0}, t.d * std::polar(1.0, t.theta));
  }
  throw std::logic_error("member_ket: bad tag");
}

// The exactly flipped partners: |1>, b|0> - a|1>, d e^{-i theta}|0> - c|1>.
// Each is orthogonal to the corresponding member ket.
inline state_vector flip_ket(const flip_triple& t, member_state which) {
  switch (which) {
    case member_state::zero: return qubit_ket({0.0, 0.0}, {1.0, 0.0});
    case member_state::psi: return qubit_ket({t.b, 0.0}, {-t.a, 0.0});
    case member_state::phi: return qubit_ket(t.d * std::polar(1.0, -t.theta), {-t.c, 0.0});
  }
  throw std::logic_error("flip_ket: bad tag");
}

}  // namespace noflip
