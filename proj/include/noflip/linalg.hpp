#pragma once

// Dense complex linear algebra for small Hilbert spaces (total dimension <= 128),
// with composite-system bookkeeping via explicit factor layouts.
//
// Index convention used everywhere: first factor slowest (row-major), i.e. for
// layout [d0, d1] the amplitude of |i>|j> sits at index i*d1 + j.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace noflip {

using cx = std::complex<double>;

inline constexpr double default_tol = 1e-9;

// ---------------------------------------------------------------------------
// state_vector

struct state_vector {
  std::vector<cx> amps;
  std::vector<std::size_t> layout;

  state_vector() = default;

  state_vector(std::vector<cx> a, std::vector<std::size_t> dims)
      : amps(std::move(a)), layout(std::move(dims)) {
    std::size_t prod = 1;
    for (std::size_t d : layout) prod *= d;
    if (layout.empty() || prod != amps.size())
      throw std::invalid_argument("state_vector: layout inconsistent with amplitude count");
  }

  std::size_t dim() const { return amps.size(); }

  double norm_sq() const {
    double s = 0.0;
    for (const cx& z : amps) s += std::norm(z);
    return s;
  }

  double norm() const { return std::sqrt(norm_sq()); }

  bool is_normalized(double tol = default_tol) const {
    return std::abs(norm_sq() - 1.0) <= tol;
  }

  state_vector normalized() const {
    double n = norm();
    if (n <= 0.0)
      throw std::invalid_argument("state_vector: cannot normalize the zero vector");
    state_vector out = *this;
    for (cx& z : out.amps) z /= n;
    return out;
  }
};

inline state_vector basis_ket(std::size_t dim, std::size_t which) {
  if (which >= dim) throw std::out_of_range("basis_ket: index out of range");
  std::vector<cx> a(dim, cx{0.0, 0.0});
  a[which] = cx{1.0, 0.0};
  return state_vector(std::move(a), {dim});
}

inline state_vector qubit_ket(cx a0, cx a1) {
  return state_vector({a0, a1}, {2});
}

inline cx inner(const state_vector& u, const state_vector& v) {
  if (u.dim() != v.dim()) throw std::invalid_argument("inner: dimension mismatch");
  cx s{0.0, 0.0};
  for (std::size_t i = 0; i < u.dim(); ++i) s += std::conj(u.amps[i]) * v.amps[i];
  return s;
}

// Result layout is the concatenation of the input layouts; first factor slowest.
inline state_vector tensor(const state_vector& u, const state_vector& v) {
  std::vector<cx> a(u.dim() * v.dim());
  for (std::size_t i = 0; i < u.dim(); ++i)
    for (std::size_t j = 0; j < v.dim(); ++j)
      a[i * v.dim() + j] = u.amps[i] * v.amps[j];
  std::vector<std::size_t> dims = u.layout;
  dims.insert(dims.end(), v.layout.begin(), v.layout.end());
  return state_vector(std::move(a), std::move(dims));
}

inline state_vector add(const state_vector& u, const state_vector& v) {
  if (u.layout != v.layout) throw std::invalid_argument("add: layout mismatch");
  state_vector out = u;
  for (std::size_t i = 0; i < out.dim(); ++i) out.amps[i] += v.amps[i];
  return out;
}

inline state_vector scale(cx factor, const state_vector& u) {
  state_vector out = u;
  for (cx& z : out.amps) z *= factor;
  return out;
}

// ---------------------------------------------------------------------------
// cmatrix: square complex matrix, row-major

struct cmatrix {
  std::size_t n = 0;
  std::vector<cx> a;

  cmatrix() = default;
  explicit cmatrix(std::size_t size) : n(size), a(size * size, cx{0.0, 0.0}) {}

  cx& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const cx& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  static cmatrix identity(std::size_t size) {
    cmatrix m(size);
    for (std::size_t i = 0; i < size; ++i) m(i, i) = cx{1.0, 0.0};
    return m;
  }

  cx trace() const {
    cx t{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
    return t;
  }

  cmatrix dagger() const {
    cmatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  // max |a_ij - conj(a_ji)|
  double hermiticity_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return worst;
  }

  double max_abs_diff(const cmatrix& other) const {
    if (other.n != n) throw std::invalid_argument("max_abs_diff: dimension mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(a[i] - other.a[i]));
    return worst;
  }
};

inline cmatrix matmul(const cmatrix& x, const cmatrix& y) {
  if (x.n != y.n) throw std::invalid_argument("matmul: dimension mismatch");
  cmatrix m(x.n);
  for (std::size_t i = 0; i < x.n; ++i)
    for (std::size_t k = 0; k < x.n; ++k) {
      cx xik = x(i, k);
      if (xik == cx{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < x.n; ++j) m(i, j) += xik * y(k, j);
    }
  return m;
}

inline state_vector apply(const cmatrix& m, const state_vector& v) {
  if (m.n != v.dim()) throw std::invalid_argument("apply: dimension mismatch");
  std::vector<cx> out(m.n, cx{0.0, 0.0});
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) out[i] += m(i, j) * v.amps[j];
  return state_vector(std::move(out), v.layout);
}

// ---------------------------------------------------------------------------
// density_matrix: Hermitian, unit trace; PSD checked where eigenvalues are needed

struct density_matrix {
  cmatrix entries;

  density_matrix() = default;

  explicit density_matrix(cmatrix m, double herm_tol = 1e-10, double trace_tol = default_tol)
      : entries(std::move(m)) {
    if (entries.hermiticity_defect() > herm_tol)
      throw std::invalid_argument("density_matrix: not Hermitian within tolerance");
    if (std::abs(entries.trace() - cx{1.0, 0.0}) > trace_tol)
      throw std::invalid_argument("density_matrix: trace differs from 1 beyond tolerance");
  }

  std::size_t dim() const { return entries.n; }
  cx operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
};

inline density_matrix pure_density(const state_vector& psi, double tol = default_tol) {
  if (!psi.is_normalized(tol))
    throw std::invalid_argument("pure_density: input state is not normalized");
  cmatrix m(psi.dim());
  for (std::size_t i = 0; i < psi.dim(); ++i)
    for (std::size_t j = 0; j < psi.dim(); ++j)
      m(i, j) = psi.amps[i] * std::conj(psi.amps[j]);
  return density_matrix(std::move(m));
}

// ---------------------------------------------------------------------------
// partial trace

namespace detail {

inline void check_layout(std::size_t dim, const std::vector<std::size_t>& layout) {
  std::size_t prod = 1;
  for (std::size_t d : layout) prod *= d;
  if (layout.empty() || prod != dim)
    throw std::invalid_argument("partial_trace: layout inconsistent with matrix dimension");
}

// digits[f] of a flat index under the first-factor-slowest convention
inline void decode(std::size_t index, const std::vector<std::size_t>& layout,
                   std::vector<std::size_t>& digits) {
  digits.resize(layout.size());
  for (std::size_t f = layout.size(); f-- > 0;) {
    digits[f] = index % layout[f];
    index /= layout[f];
  }
}

inline std::size_t encode(const std::vector<std::size_t>& digits,
                          const std::vector<std::size_t>& layout) {
  std::size_t index = 0;
  for (std::size_t f = 0; f < layout.size(); ++f) index = index * layout[f] + digits[f];
  return index;
}

}  // namespace detail

// Traces out every factor not listed in `keep`. Kept factors stay in their
// original relative order.
inline density_matrix partial_trace(const density_matrix& rho,
                                    const std::vector<std::size_t>& layout,
                                    const std::vector<std::size_t>& keep) {
  detail::check_layout(rho.dim(), layout);
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  std::vector<bool> kept(layout.size(), false);
  for (std::size_t f : keep) {
    if (f >= layout.size()) throw std::invalid_argument("partial_trace: keep index out of range");
    if (kept[f]) throw std::invalid_argument("partial_trace: duplicate keep index");
    kept[f] = true;
  }

  std::vector<std::size_t> keep_sorted;
  std::vector<std::size_t> traced;
  for (std::size_t f = 0; f < layout.size(); ++f) (kept[f] ? keep_sorted : traced).push_back(f);

  std::size_t keep_dim = 1, traced_dim = 1;
  for (std::size_t f : keep_sorted) keep_dim *= layout[f];
  for (std::size_t f : traced) traced_dim *= layout[f];

  std::vector<std::size_t> keep_layout, traced_layout;
  for (std::size_t f : keep_sorted) keep_layout.push_back(layout[f]);
  for (std::size_t f : traced) traced_layout.push_back(layout[f]);

  std::vector<std::size_t> kd, td, full(layout.size());
  cmatrix out(keep_dim);
  for (std::size_t i = 0; i < keep_dim; ++i) {
    detail::decode(i, keep_layout, kd);
    for (std::size_t j = 0; j < keep_dim; ++j) {
      std::vector<std::size_t> jd;
      detail::decode(j, keep_layout, jd);
      cx sum{0.0, 0.0};
      for (std::size_t t = 0; t < traced_dim; ++t) {
        detail::decode(t, traced_layout, td);
        for (std::size_t k = 0; k < keep_sorted.size(); ++k) full[keep_sorted[k]] = kd[k];
        for (std::size_t k = 0; k < traced.size(); ++k) full[traced[k]] = td[k];
        std::size_t row = detail::encode(full, layout);
        for (std::size_t k = 0; k < keep_sorted.size(); ++k) full[keep_sorted[k]] = jd[k];
        std::size_t col = detail::encode(full, layout);
        sum += rho.entries(row, col);
      }
      out(i, j) = sum;
    }
  }
  return density_matrix(std::move(out));
}

// Reduced density matrix of a pure state, without materializing the full
// outer product. Equals partial_trace(pure_density(psi), psi.layout, keep).
inline density_matrix marginal_of_state(const state_vector& psi,
                                        const std::vector<std::size_t>& keep,
                                        double tol = default_tol) {
  if (!psi.is_normalized(tol))
    throw std::invalid_argument("marginal_of_state: input state is not normalized");
  return partial_trace(pure_density(psi, tol), psi.layout, keep);
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver: cyclic Jacobi with complex rotations.
// Convergence: off-diagonal Frobenius mass < 1e-13, hard cap 100 sweeps.

struct eig_result {
  std::vector<double> values;  // ascending
  cmatrix vectors;             // columns are the matching eigenvectors
};

inline eig_result hermitian_eig(const cmatrix& input, double herm_tol = 1e-10) {
  if (input.hermiticity_defect() > herm_tol)
    throw std::invalid_argument("hermitian_eig: matrix not Hermitian within tolerance");
  const std::size_t n = input.n;
  cmatrix m = input;
  cmatrix v = cmatrix::identity(n);

  auto off_mass = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(m(i, j));
    return std::sqrt(s);
  };

  constexpr double off_target = 1e-13;
  constexpr int max_sweeps = 100;

  for (int sweep = 0; sweep < max_sweeps && off_mass() >= off_target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        cx z = m(p, q);
        double r = std::abs(z);
        if (r < 1e-300) continue;
        cx w = z / r;  // phase of the pivot
        double app = std::real(m(p, p));
        double aqq = std::real(m(q, q));
        double tau = (aqq - app) / (2.0 * r);
        double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double cth = 1.0 / std::sqrt(1.0 + t * t);
        double sth = t * cth;

        // J = [[c, s*w], [-s*conj(w), c]] applied on columns (p,q), J^dagger on rows
        for (std::size_t k = 0; k < n; ++k) {
          cx mkp = m(k, p), mkq = m(k, q);
          m(k, p) = cth * mkp - sth * std::conj(w) * mkq;
          m(k, q) = sth * w * mkp + cth * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          cx mpk = m(p, k), mqk = m(q, k);
          m(p, k) = cth * mpk - sth * w * mqk;
          m(q, k) = sth * std::conj(w) * mpk + cth * mqk;
        }
        m(p, q) = cx{0.0, 0.0};
        m(q, p) = cx{0.0, 0.0};
        m(p, p) = cx{std::real(m(p, p)), 0.0};
        m(q, q) = cx{std::real(m(q, q)), 0.0};
        for (std::size_t k = 0; k < n; ++k) {
          cx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = cth * vkp - sth * std::conj(w) * vkq;
          v(k, q) = sth * w * vkp + cth * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::real(m(i, i)) < std::real(m(j, j));
  });

  eig_result res;
  res.values.resize(n);
  res.vectors = cmatrix(n);
  for (std::size_t c = 0; c < n; ++c) {
    res.values[c] = std::real(m(order[c], order[c]));
    for (std::size_t k = 0; k < n; ++k) res.vectors(k, c) = v(k, order[c]);
  }
  return res;
}

inline std::vector<double> hermitian_eigenvalues(const cmatrix& m, double herm_tol = 1e-10) {
  return hermitian_eig(m, herm_tol).values;
}

inline double min_eigenvalue(const density_matrix& rho) {
  return hermitian_eigenvalues(rho.entries).front();
}

// ---------------------------------------------------------------------------
// entropy and trace distance

// -sum lambda log2 lambda with 0*log0 := 0; eigenvalues in [-1e-9, 0) clamp to 0.
inline double von_neumann_entropy(const density_matrix& rho, double eig_tol = default_tol) {
  std::vector<double> eigs = hermitian_eigenvalues(rho.entries);
  double h = 0.0;
  for (double lam : eigs) {
    if (lam < -eig_tol)
      throw std::invalid_argument("von_neumann_entropy: eigenvalue " + std::to_string(lam) +
                                  " below -tolerance");
    if (lam <= 0.0) continue;
    h -= lam * std::log2(lam);
  }
  return h;
}

inline double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

inline double trace_distance(const density_matrix& rho, const density_matrix& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  cmatrix diff(rho.dim());
  for (std::size_t i = 0; i < diff.a.size(); ++i) diff.a[i] = rho.entries.a[i] - sigma.entries.a[i];
  double s = 0.0;
  for (double lam : hermitian_eigenvalues(diff)) s += std::abs(lam);
  return 0.5 * s;
}

}  // namespace noflip
