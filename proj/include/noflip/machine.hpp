#pragma once

// The hypothetical exact flipping machine: free phases mu, nu and three
// machine states M_0, M_psi, M_phi. Only the pairwise overlaps of the machine
// states are physical, so the model stores their Gram matrix together with a
// concrete realization as unit vectors in a 3-dimensional machine space.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "noflip/linalg.hpp"
#include "noflip/triple.hpp"

namespace noflip {

namespace detail {

// Unitary whose first row is v0^dagger, completed to an orthonormal basis.
inline cmatrix completion_rotation(const std::array<std::vector<cx>, 3>& candidates) {
  const std::size_t n = 3;
  std::vector<std::vector<cx>> basis;
  basis.push_back(candidates[0]);
  double n0 = 0.0;
  for (const cx& z : basis[0]) n0 += std::norm(z);
  n0 = std::sqrt(n0);
  for (cx& z : basis[0]) z /= n0;

  std::array<std::vector<cx>, 3> units = {std::vector<cx>{1, 0, 0}, std::vector<cx>{0, 1, 0},
                                          std::vector<cx>{0, 0, 1}};
  for (std::size_t cand = 0; cand < units.size() && basis.size() < n; ++cand) {
    std::vector<cx> w = units[cand];
    for (const auto& bvec : basis) {
      cx ov{0.0, 0.0};
      for (std::size_t k = 0; k < n; ++k) ov += std::conj(bvec[k]) * w[k];
      for (std::size_t k = 0; k < n; ++k) w[k] -= ov * bvec[k];
    }
    double nw = 0.0;
    for (const cx& z : w) nw += std::norm(z);
    nw = std::sqrt(nw);
    if (nw < 0.3) continue;
    for (cx& z : w) z /= nw;
    basis.push_back(std::move(w));
  }
  if (basis.size() != n) throw std::logic_error("completion_rotation: basis completion failed");

  cmatrix q(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) q(r, k) = std::conj(basis[r][k]);
  return q;
}

}  // namespace detail

struct machine_model {
  double mu = 0.0;
  double nu = 0.0;
  cmatrix gram;         // 3x3, gram(i,j) = <M_i|M_j>, order M_0, M_psi, M_phi
  cmatrix realization;  // 3x3, column j is the unit vector realizing machine state j

  machine_model() : gram(cmatrix::identity(3)), realization(cmatrix::identity(3)) {}

  // Factor a Hermitian unit-diagonal PSD Gram matrix into three unit vectors.
  // Eigendecomposition handles rank-deficient inputs; eigenvalues in
  // [-1e-9, 0) are clamped to 0. Gauge: M_0 becomes the first basis vector.
  static machine_model from_gram(double mu, double nu, const cmatrix& gram) {
    validate_gram(gram);
    eig_result eig = hermitian_eig(gram);
    std::array<std::vector<cx>, 3> w;
    for (auto& col : w) col.assign(3, cx{0.0, 0.0});
    for (std::size_t k = 0; k < 3; ++k) {
      double lam = eig.values[k];
      if (lam < 0.0) lam = 0.0;  // validate_gram already rejected anything below -1e-9
      double root = std::sqrt(lam);
      for (std::size_t i = 0; i < 3; ++i) w[i][k] = root * std::conj(eig.vectors(i, k));
    }
    return from_raw_vectors(mu, nu, w, gram);
  }

  static machine_model from_vectors(double mu, double nu, const std::array<std::vector<cx>, 3>& v) {
    cmatrix gram(3);
    for (std::size_t i = 0; i < 3; ++i) {
      if (v[i].size() != 3) throw std::invalid_argument("machine_model: vectors must be 3-dim");
      for (std::size_t j = 0; j < 3; ++j) {
        cx s{0.0, 0.0};
        for (std::size_t k = 0; k < 3; ++k) s += std::conj(v[i][k]) * v[j][k];
        gram(i, j) = s;
      }
    }
    for (std::size_t i = 0; i < 3; ++i)
      if (std::abs(gram(i, i) - cx{1.0, 0.0}) > default_tol)
        throw std::invalid_argument("machine_model: machine states must be unit vectors");
    return from_raw_vectors(mu, nu, v, gram);
  }

  static machine_model trivial() { return from_gram(0.0, 0.0, all_ones_gram()); }

  static machine_model identity_gram() { return from_gram(0.0, 0.0, cmatrix::identity(3)); }

  // Rank-1 machine saturating the diagonal no-signalling constraints:
  // M_psi = -e^{-i mu} M_0, M_phi = -e^{-i nu} M_0, in the mu = nu = 0 gauge.
  static machine_model signalling_witness() {
    cmatrix g(3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        g(i, j) = cx{(i == 0) == (j == 0) ? 1.0 : -1.0, 0.0};
    return from_gram(0.0, 0.0, g);
  }

  state_vector machine_ket(member_state which) const {
    std::size_t j = static_cast<std::size_t>(which);
    return state_vector({realization(0, j), realization(1, j), realization(2, j)}, {3});
  }

  cx phase(member_state which) const {
    switch (which) {
      case member_state::zero: return cx{1.0, 0.0};
      case member_state::psi: return std::polar(1.0, mu);
      case member_state::phi: return std::polar(1.0, nu);
    }
    throw std::logic_error("machine_model: bad tag");
  }

  // X = e^{i mu} <M_0|M_psi>, Y = e^{i nu} <M_0|M_phi>
  cx x() const { return std::polar(1.0, mu) * gram(0, 1); }
  cx y() const { return std::polar(1.0, nu) * gram(0, 2); }
  cx m_phi_m_psi() const { return gram(2, 1); }

  static cmatrix all_ones_gram() {
    cmatrix g(3);
    for (cx& z : g.a) z = cx{1.0, 0.0};
    return g;
  }

  static void validate_gram(const cmatrix& gram) {
    if (gram.n != 3) throw std::invalid_argument("machine_model: gram must be 3x3");
    if (gram.hermiticity_defect() > 1e-9)
      throw std::invalid_argument("machine_model: gram is not Hermitian");
    for (std::size_t i = 0; i < 3; ++i) {
      if (std::abs(gram(i, i) - cx{1.0, 0.0}) > default_tol)
        throw std::invalid_argument("machine_model: gram diagonal must be 1");
      for (std::size_t j = 0; j < 3; ++j)
        if (std::abs(gram(i, j)) > 1.0 + 1e-12)
          throw std::invalid_argument("machine_model: gram overlap magnitude exceeds 1");
    }
    double min_eig = hermitian_eigenvalues(gram).front();
    if (min_eig < -default_tol)
      throw std::invalid_argument("machine_model: gram not PSD, smallest eigenvalue " +
                                  std::to_string(min_eig));
  }

 private:
  static machine_model from_raw_vectors(double mu, double nu,
                                        const std::array<std::vector<cx>, 3>& w,
                                        const cmatrix& gram) {
    machine_model m;
    m.mu = mu;
    m.nu = nu;
    m.gram = gram;
    cmatrix q = detail::completion_rotation(w);
    m.realization = cmatrix(3);
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t r = 0; r < 3; ++r) {
        cx s{0.0, 0.0};
        for (std::size_t k = 0; k < 3; ++k) s += q(r, k) * w[j][k];
        m.realization(r, j) = s;
      }
    // realized Gram must reproduce the input
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        cx s{0.0, 0.0};
        for (std::size_t k = 0; k < 3; ++k)
          s += std::conj(m.realization(k, i)) * m.realization(k, j);
        if (std::abs(s - gram(i, j)) > default_tol)
          throw std::logic_error("machine_model: realization does not reproduce gram");
      }
    return m;
  }
};

struct flip_scenario {
  flip_triple triple;
  machine_model machine;
};

// ---------------------------------------------------------------------------
// Linear extension of the machine to composite states.
//
// The machine is defined on exactly three qubit states, which are not
// orthogonal, so a decomposition of a composite state over them is not unique.
// The caller therefore supplies the decomposition explicitly: a list of terms
// whose target slot each carries one tagged member state. apply_flip_channel
// maps each term |x> -> phase(x) |x_bar> (x) |M_x| and sums, appending a
// 3-dimensional machine factor to the layout. The sum is not normalized;
// the machine action need not be unitary.

struct tagged_term {
  member_state tag;
  state_vector term;
};

namespace detail {

struct target_split {
  std::size_t stride_after = 1;
  std::size_t rest_dim = 1;
};

inline target_split split_for(const std::vector<std::size_t>& layout, std::size_t target) {
  if (target >= layout.size())
    throw std::invalid_argument("apply_flip_channel: target factor out of range");
  if (layout[target] != 2)
    throw std::invalid_argument("apply_flip_channel: target factor must be 2-dimensional");
  target_split s;
  std::size_t total = 1;
  for (std::size_t f = 0; f < layout.size(); ++f) {
    total *= layout[f];
    if (f > target) s.stride_after *= layout[f];
  }
  s.rest_dim = total / 2;
  return s;
}

}  // namespace detail

inline state_vector apply_flip_channel(const std::vector<tagged_term>& terms, std::size_t target,
                                       const flip_scenario& sc, double tol = default_tol) {
  if (terms.empty()) throw std::invalid_argument("apply_flip_channel: no terms");
  const std::vector<std::size_t>& layout = terms.front().term.layout;
  detail::target_split sp = detail::split_for(layout, target);

  std::vector<std::size_t> out_layout = layout;
  out_layout.push_back(3);
  std::vector<cx> out(terms.front().term.dim() * 3, cx{0.0, 0.0});

  for (const tagged_term& tt : terms) {
    if (tt.term.layout != layout)
      throw std::invalid_argument("apply_flip_channel: terms disagree on layout");

    state_vector m = member_ket(sc.triple, tt.tag);
    cx m0 = m.amps[0], m1 = m.amps[1];

    // extract the bystander: term = bystander (x)_target member
    std::vector<cx> rest(sp.rest_dim);
    bool use_low = std::abs(m0) >= std::abs(m1);
    double err = 0.0, scale_ref = 0.0;
    for (std::size_t r = 0; r < sp.rest_dim; ++r) {
      std::size_t before = r / sp.stride_after;
      std::size_t after = r % sp.stride_after;
      std::size_t i_low = (before * 2) * sp.stride_after + after;
      std::size_t i_high = (before * 2 + 1) * sp.stride_after + after;
      cx low = tt.term.amps[i_low], high = tt.term.amps[i_high];
      cx v = use_low ? low / m0 : high / m1;
      rest[r] = v;
      cx resid = use_low ? high - m1 * v : low - m0 * v;
      err = std::max(err, std::abs(resid));
      scale_ref = std::max({scale_ref, std::abs(low), std::abs(high)});
    }
    if (err > tol * std::max(1.0, scale_ref))
      throw std::invalid_argument(
          std::string("apply_flip_channel: target slot of a term tagged '") +
          member_name(tt.tag) + "' does not carry that member state; the machine is undefined there");

    state_vector flipped = flip_ket(sc.triple, tt.tag);
    state_vector mk = sc.machine.machine_ket(tt.tag);
    cx ph = sc.machine.phase(tt.tag);

    for (std::size_t r = 0; r < sp.rest_dim; ++r) {
      if (rest[r] == cx{0.0, 0.0}) continue;
      std::size_t before = r / sp.stride_after;
      std::size_t after = r % sp.stride_after;
      for (std::size_t bit = 0; bit < 2; ++bit) {
        cx amp = ph * rest[r] * flipped.amps[bit];
        if (amp == cx{0.0, 0.0}) continue;
        std::size_t base = ((before * 2 + bit) * sp.stride_after + after) * 3;
        for (std::size_t k = 0; k < 3; ++k) out[base + k] += amp * mk.amps[k];
      }
    }
  }
  return state_vector(std::move(out), std::move(out_layout));
}

}  // namespace noflip
