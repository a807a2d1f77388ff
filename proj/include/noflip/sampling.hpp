#pragma once

// Seeded generators for triples, machines and states. Every row or restart
// derives its own stream from (seed, index) so results never depend on
// evaluation order.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "noflip/linalg.hpp"
#include "noflip/machine.hpp"
#include "noflip/triple.hpp"

namespace noflip {

// splitmix64 finalizer; decorrelates streams for nearby (seed, index) pairs
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// a, c uniform in (0, 1], theta uniform in [0, pi]
inline flip_triple random_triple(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double a = 0.0, c = 0.0;
  while (!(a > 0.0)) a = 1.0 - u01(rng);
  while (!(c > 0.0)) c = 1.0 - u01(rng);
  double theta = u01(rng) * std::acos(-1.0);
  return flip_triple::from_ac(a, c, theta);
}

// exact member of one of the three degenerate families: theta in {0, pi},
// b = 0, or d = 0
inline flip_triple random_great_circle_triple(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double pi = std::acos(-1.0);
  double a = 0.0, c = 0.0;
  while (!(a > 0.0)) a = 1.0 - u01(rng);
  while (!(c > 0.0)) c = 1.0 - u01(rng);
  double theta = u01(rng) * pi;
  switch (rng() % 4) {
    case 0: return flip_triple::from_ac(a, c, 0.0);
    case 1: return flip_triple::from_ac(a, c, pi);
    case 2: return flip_triple::from_ac(1.0, c, theta);
    default: return flip_triple::from_ac(a, 1.0, theta);
  }
}

inline std::vector<cx> random_unit_cvec(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cx> v(dim);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (cx& z : v) {
      z = cx{g(rng), g(rng)};
      n2 += std::norm(z);
    }
  } while (n2 < 1e-12);
  double inv = 1.0 / std::sqrt(n2);
  for (cx& z : v) z *= inv;
  return v;
}

inline state_vector random_qubit(std::mt19937_64& rng) {
  return state_vector(random_unit_cvec(2, rng), {2});
}

// three independent Haar-ish unit vectors in the 3-dim machine space,
// phases uniform in [0, 2 pi)
inline machine_model random_machine(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0));
  double mu = angle(rng), nu = angle(rng);
  std::array<std::vector<cx>, 3> v = {random_unit_cvec(3, rng), random_unit_cvec(3, rng),
                                      random_unit_cvec(3, rng)};
  return machine_model::from_vectors(mu, nu, v);
}

}  // namespace noflip
