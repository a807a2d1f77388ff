#pragma once

// Derivative-free search for the machine minimizing the signalling deviation
// of a fixed triple. The infimum is 0 exactly when the triple sits on a great
// circle; a restarted Nelder-Mead over a 10-parameter chart of machine
// configurations estimates it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "noflip/constructions.hpp"
#include "noflip/machine.hpp"
#include "noflip/sampling.hpp"
#include "noflip/triple.hpp"

namespace noflip {

struct nm_config {
  std::size_t max_evals = 2000;
  double simplex_tol = 1e-9;  // stop when vertex spread falls below this
  double initial_step = 0.3;
};

struct nm_result {
  std::vector<double> point;
  double value = 0.0;
  std::size_t evals = 0;
};

// Standard simplex method: reflection 1, expansion 2, contraction 0.5, shrink 0.5.
template <typename F>
nm_result nelder_mead(F&& f, const std::vector<double>& start, const nm_config& cfg) {
  const std::size_t n = start.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");

  struct vertex {
    std::vector<double> x;
    double fx;
  };
  std::vector<vertex> simplex;
  simplex.reserve(n + 1);
  std::size_t evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };

  simplex.push_back({start, eval(start)});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = start;
    x[i] += cfg.initial_step;
    simplex.push_back({std::move(x), 0.0});
    simplex.back().fx = eval(simplex.back().x);
  }

  auto by_value = [](const vertex& u, const vertex& v) { return u.fx < v.fx; };
  std::sort(simplex.begin(), simplex.end(), by_value);

  auto diameter = [&]() {
    double d = 0.0;
    for (std::size_t v = 1; v <= n; ++v)
      for (std::size_t i = 0; i < n; ++i)
        d = std::max(d, std::abs(simplex[v].x[i] - simplex[0].x[i]));
    return d;
  };

  std::vector<double> centroid(n), cand(n);
  while (evals < cfg.max_evals && diameter() >= cfg.simplex_tol) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t v = 0; v < n; ++v) s += simplex[v].x[i];
      centroid[i] = s / static_cast<double>(n);
    }
    const vertex& worst = simplex[n];

    for (std::size_t i = 0; i < n; ++i) cand[i] = centroid[i] + (centroid[i] - worst.x[i]);
    double f_r = eval(cand);

    if (f_r < simplex[0].fx) {
      std::vector<double> expanded(n);
      for (std::size_t i = 0; i < n; ++i)
        expanded[i] = centroid[i] + 2.0 * (centroid[i] - worst.x[i]);
      double f_e = eval(expanded);
      simplex[n] = (f_e < f_r) ? vertex{std::move(expanded), f_e} : vertex{cand, f_r};
    } else if (f_r < simplex[n - 1].fx) {
      simplex[n] = {cand, f_r};
    } else {
      bool outside = f_r < worst.fx;
      std::vector<double> contracted(n);
      const std::vector<double>& toward = outside ? cand : worst.x;
      for (std::size_t i = 0; i < n; ++i) contracted[i] = centroid[i] + 0.5 * (toward[i] - centroid[i]);
      double f_c = eval(contracted);
      if (f_c < (outside ? f_r : worst.fx)) {
        simplex[n] = {std::move(contracted), f_c};
      } else {
        for (std::size_t v = 1; v <= n; ++v) {
          for (std::size_t i = 0; i < n; ++i)
            simplex[v].x[i] = simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
          simplex[v].fx = eval(simplex[v].x);
        }
      }
    }
    std::sort(simplex.begin(), simplex.end(), by_value);
  }

  return {simplex[0].x, simplex[0].fx, evals};
}

// --------------------------------------------------------------------------
// machine chart: p = {mu, nu, (t1, t2, p1, p2) for M_psi, same for M_phi}.
// M_0 is gauged to the first basis vector; the remaining two unit vectors use
// a phase-fixed spherical chart, so every Gram matrix of three unit vectors
// is reachable while all 10 coordinates stay unconstrained.

inline machine_model machine_from_chart(const std::vector<double>& p) {
  if (p.size() != 10) throw std::invalid_argument("machine_from_chart: expected 10 parameters");
  auto vec = [](double t1, double t2, double p1, double p2) {
    return std::vector<cx>{cx{std::cos(t1), 0.0}, std::polar(std::sin(t1) * std::cos(t2), p1),
                           std::polar(std::sin(t1) * std::sin(t2), p2)};
  };
  std::array<std::vector<cx>, 3> v = {
      std::vector<cx>{cx{1.0, 0.0}, cx{0.0, 0.0}, cx{0.0, 0.0}},
      vec(p[2], p[3], p[4], p[5]), vec(p[6], p[7], p[8], p[9])};
  return machine_model::from_vectors(p[0], p[1], v);
}

struct search_config {
  std::uint64_t seed = 1;
  std::size_t restarts = 32;
  std::size_t max_evals = 2000;  // per restart
  double simplex_tol = 1e-9;
};

struct restart_record {
  std::size_t restart = 0;
  double best = 0.0;
  std::size_t evals = 0;
};

struct search_result {
  double infimum = 0.0;
  machine_model argmin;
  std::vector<restart_record> trace;
};

// Best-of over seeded restarts; ties keep the lowest restart index, so the
// result is independent of evaluation order.
inline search_result minimize_deviation(const flip_triple& t, const search_config& cfg = {}) {
  if (cfg.restarts == 0) throw std::invalid_argument("minimize_deviation: restarts must be >= 1");
  auto objective = [&t](const std::vector<double>& p) {
    return signalling_deviation({t, machine_from_chart(p)});
  };

  const double pi = std::acos(-1.0);
  search_result best;
  bool have_best = false;
  std::vector<double> best_point;

  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    std::mt19937_64 rng(mix_seed(cfg.seed, r));
    std::uniform_real_distribution<double> full(0.0, 2.0 * pi), half(0.0, 0.5 * pi);
    std::vector<double> start = {full(rng), full(rng), half(rng), half(rng), full(rng),
                                 full(rng),  half(rng), half(rng), full(rng), full(rng)};
    nm_result res = nelder_mead(objective, start, {cfg.max_evals, cfg.simplex_tol, 0.3});
    best.trace.push_back({r, res.value, res.evals});
    if (!have_best || res.value < best.infimum) {
      have_best = true;
      best.infimum = res.value;
      best_point = std::move(res.point);
    }
  }

  best.argmin = machine_from_chart(best_point);
  best.infimum = signalling_deviation({t, best.argmin});
  return best;
}

}  // namespace noflip
