// Walks the reference scenario a = b = c = d = 1/sqrt(2), theta = pi/2 with
// the trivial machine and prints every quantity twice: closed form next to
// the value dug out of the explicit tensor construction.

#include <noflip/noflip.hpp>

#include <cmath>
#include <iostream>

int main() {
  using namespace noflip;

  double r = 1.0 / std::sqrt(2.0);
  flip_triple t(r, r, r, r, std::acos(-1.0) / 2.0);
  flip_scenario sc{t, machine_model::trivial()};

  std::cout << "triple: a=b=c=d=" << format_double(r) << ", theta=pi/2\n";
  std::cout << "coplanarity determinant: "
            << format_double(coplanarity_det(member_triple(t)))
            << " (zero would mean a shared great circle)\n\n";

  double dev = signalling_deviation(sc);
  std::cout << "remote marginal moves by " << format_double(dev)
            << " in trace distance; sqrt(5)/3 = " << format_double(std::sqrt(5.0) / 3.0)
            << "\n";

  nosignalling_residuals res = constraint_residuals(sc);
  std::cout << "constraint residuals: " << format_double(res.psi_diag) << ", "
            << format_double(res.phi_diag) << ", " << format_double(res.cross_phi_psi)
            << ", " << format_double(res.cross_psi_phi) << "\n\n";

  gain_report g = entanglement_gain(sc);
  std::cout << "largest marginal eigenvalue: " << format_double(g.closed.lambda_i) << " -> "
            << format_double(g.closed.lambda_f) << " (closed), "
            << format_double(g.explicit_route.lambda_i) << " -> "
            << format_double(g.explicit_route.lambda_f) << " (constructed)\n";
  std::cout << "entanglement entropy: " << format_double(g.entropy_i) << " -> "
            << format_double(g.entropy_f) << " bits, gain " << format_double(g.gain_bits)
            << "\n\n";

  monotonicity_certificate mc = monotonicity_terms(sc);
  std::cout << "certificate terms:";
  for (double v : mc.terms) std::cout << ' ' << format_double(v);
  std::cout << "\nsum " << format_double(mc.term_sum) << " vs squared difference "
            << format_double(mc.squared_difference) << "\n\n";

  product_result p = product_flip(sc);
  std::cout << "product start entanglement " << format_double(p.entanglement_initial)
            << " bits; after the flip " << format_double(p.entanglement_final)
            << " bits (N = " << format_double(p.n_computed) << ", closed "
            << format_double(p.n_closed) << ")\n";
  return 0;
}
