#include <catch2/catch_amalgamated.hpp>

#include <noflip/bloch.hpp>
#include <noflip/sampling.hpp>

#include "oracles.hpp"

#include <cmath>
#include <optional>
#include <random>

using namespace noflip;

namespace {

const double pi = std::acos(-1.0);

state_vector plus_ket() {
  double r = std::sqrt(0.5);
  return qubit_ket(cx{r, 0.0}, cx{r, 0.0});
}

state_vector plus_i_ket() {
  double r = std::sqrt(0.5);
  return qubit_ket(cx{r, 0.0}, cx{0.0, r});
}

// random SU(2) rotation and a random global phase
cmatrix random_unitary2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double t = std::acos(std::clamp(1.0 - 2.0 * u01(rng), -1.0, 1.0)) / 2.0;
  double p1 = 2.0 * pi * u01(rng), p2 = 2.0 * pi * u01(rng), g = 2.0 * pi * u01(rng);
  cx a = std::polar(std::cos(t), p1);
  cx b = std::polar(std::sin(t), p2);
  cmatrix u(2);
  u(0, 0) = a;
  u(0, 1) = -std::conj(b);
  u(1, 0) = b;
  u(1, 1) = std::conj(a);
  cx ph = std::polar(1.0, g);
  for (cx& z : u.a) z *= ph;
  return u;
}

}  // namespace

TEST_CASE("bloch vectors of the axis states") {
  bloch_vec z = bloch_vector(basis_ket(2, 0));
  REQUIRE(z.x == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(z.z == Catch::Approx(1.0));

  bloch_vec mz = bloch_vector(basis_ket(2, 1));
  REQUIRE(mz.z == Catch::Approx(-1.0));

  bloch_vec x = bloch_vector(plus_ket());
  REQUIRE(x.x == Catch::Approx(1.0));
  REQUIRE(std::abs(x.y) < 1e-15);
  REQUIRE(std::abs(x.z) < 1e-15);

  bloch_vec y = bloch_vector(plus_i_ket());
  REQUIRE(y.y == Catch::Approx(1.0));
}

TEST_CASE("bloch vector is unit length and phase invariant") {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 50; ++rep) {
    state_vector s = random_qubit(rng);
    bloch_vec r = bloch_vector(s);
    REQUIRE(r.norm() == Catch::Approx(1.0).margin(1e-12));

    state_vector s2 = scale(std::polar(1.0, 1.3 + rep), s);
    bloch_vec r2 = bloch_vector(s2);
    REQUIRE(std::abs(r.x - r2.x) < 1e-12);
    REQUIRE(std::abs(r.y - r2.y) < 1e-12);
    REQUIRE(std::abs(r.z - r2.z) < 1e-12);
  }
  REQUIRE_THROWS_AS(bloch_vector(basis_ket(3, 0)), std::invalid_argument);
  REQUIRE_THROWS_AS(bloch_vector(qubit_ket(cx{0.5, 0.0}, cx{0.0, 0.0})),
                    std::invalid_argument);
}

TEST_CASE("coplanarity determinant equals 4 a b c d sin(theta)") {
  std::mt19937_64 rng(103);
  for (int rep = 0; rep < 1000; ++rep) {
    flip_triple t = random_triple(rng);
    double det = coplanarity_det(member_triple(t));
    double expect = 4.0 * t.a * t.b * t.c * t.d * std::sin(t.theta);
    REQUIRE(std::abs(det - expect) < 1e-12);
  }
}

TEST_CASE("coplanarity determinant matches the sarrus oracle") {
  std::mt19937_64 rng(107);
  for (int rep = 0; rep < 200; ++rep) {
    qubit_triple qt(random_qubit(rng), random_qubit(rng), random_qubit(rng));
    bloch_vec r0 = bloch_vector(qt.s0), r1 = bloch_vector(qt.s1), r2 = bloch_vector(qt.s2);
    double m[3][3] = {{r0.x, r0.y, r0.z}, {r1.x, r1.y, r1.z}, {r2.x, r2.y, r2.z}};
    REQUIRE(coplanarity_det(qt) == Catch::Approx(oracle::sarrus_det3(m)).margin(1e-13));
  }
}

TEST_CASE("great circle detection on the boundary families") {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    double a = 0.1 + 0.8 * u01(rng);
    double b = std::sqrt(1.0 - a * a);
    double c = 0.1 + 0.8 * u01(rng);
    double d = std::sqrt(1.0 - c * c);
    double th = pi * u01(rng);

    REQUIRE(is_great_circle(flip_triple(a, b, c, d, 0.0)));
    REQUIRE(is_great_circle(flip_triple(a, b, c, d, pi)));
    REQUIRE(is_great_circle(flip_triple(1.0, 0.0, c, d, th)));
    REQUIRE(is_great_circle(flip_triple(a, b, 1.0, 0.0, th)));
  }

  flip_triple off = oracle::reference_triple();
  REQUIRE_FALSE(is_great_circle(off));
  REQUIRE(std::abs(coplanarity_det(member_triple(off)) - 1.0) < 1e-12);

  REQUIRE_THROWS_AS(is_great_circle(off, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(is_great_circle(off, -1.0), std::invalid_argument);
}

TEST_CASE("canonicalization recovers parameters from rotated triples") {
  std::mt19937_64 rng(113);
  for (int rep = 0; rep < 200; ++rep) {
    flip_triple t = random_triple(rng);
    qubit_triple members = member_triple(t);
    cmatrix u = random_unitary2(rng);
    // independent global phases per state hide the original frame entirely
    qubit_triple rotated(
        scale(std::polar(1.0, 6.28 * rep * 0.37), apply(u, members.s0)),
        scale(std::polar(1.0, 1.0 + rep), apply(u, members.s1)),
        scale(std::polar(1.0, 2.0 - rep * 0.5), apply(u, members.s2)));

    canonical_form cf = canonicalize_triple(rotated);
    REQUIRE(cf.triple.a == Catch::Approx(t.a).margin(1e-9));
    REQUIRE(cf.triple.b == Catch::Approx(t.b).margin(1e-9));
    REQUIRE(cf.triple.c == Catch::Approx(t.c).margin(1e-9));
    REQUIRE(cf.triple.d == Catch::Approx(t.d).margin(1e-9));
    REQUIRE(cf.triple.theta == Catch::Approx(t.theta).margin(1e-9));
  }
}

TEST_CASE("canonicalization round-trips through synthesize_from") {
  std::mt19937_64 rng(127);
  for (int rep = 0; rep < 100; ++rep) {
    qubit_triple raw(random_qubit(rng), random_qubit(rng), random_qubit(rng));
    std::optional<canonical_form> cf;
    try {
      cf.emplace(canonicalize_triple(raw));
    } catch (const std::invalid_argument&) {
      continue;  // degenerate or axis-aligned draw
    }
    qubit_triple back = synthesize_from(*cf);
    // states must match the originals up to global phase per member
    auto same_ray = [](const state_vector& p, const state_vector& q) {
      return std::abs(std::abs(inner(p, q)) - 1.0) < 1e-9;
    };
    REQUIRE(same_ray(back.s0, raw.s0));
    REQUIRE(same_ray(back.s1, raw.s1));
    REQUIRE(same_ray(back.s2, raw.s2));

    // and the geometric invariant survives
    REQUIRE(coplanarity_det(back) ==
            Catch::Approx(coplanarity_det(raw)).margin(1e-9));
  }
}

TEST_CASE("reflection flag marks mirrored triples") {
  flip_triple t = oracle::reference_triple();
  qubit_triple members = member_triple(t);
  canonical_form direct = canonicalize_triple(members);
  REQUIRE_FALSE(direct.reflected);
  REQUIRE(direct.triple.theta == Catch::Approx(t.theta).margin(1e-12));

  // conjugating every amplitude mirrors the bloch sphere through the x-z plane
  auto conj_state = [](const state_vector& s) {
    state_vector out = s;
    for (cx& z : out.amps) z = std::conj(z);
    return out;
  };
  qubit_triple mirrored(conj_state(members.s0), conj_state(members.s1),
                        conj_state(members.s2));
  canonical_form refl = canonicalize_triple(mirrored);
  REQUIRE(refl.reflected);
  REQUIRE(refl.triple.theta == Catch::Approx(t.theta).margin(1e-12));
  REQUIRE(refl.triple.a == Catch::Approx(t.a).margin(1e-12));
}

TEST_CASE("canonicalization rejects degenerate and axis-aligned triples") {
  state_vector zero = basis_ket(2, 0);
  state_vector one = basis_ket(2, 1);
  state_vector plus = plus_ket();

  REQUIRE_THROWS_AS(canonicalize_triple(qubit_triple(zero, zero, plus)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(canonicalize_triple(qubit_triple(zero, one, plus)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(canonicalize_triple(qubit_triple(zero, plus, zero)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(canonicalize_triple(qubit_triple(zero, plus, one)),
                    std::invalid_argument);
}

TEST_CASE("degenerate_pair names the clashing members") {
  state_vector zero = basis_ket(2, 0);
  state_vector plus = plus_ket();
  qubit_triple t01(zero, scale(std::polar(1.0, 0.4), zero), plus);
  auto hit = t01.degenerate_pair();
  REQUIRE(hit.has_value());
  REQUIRE(*hit == "s0,s1");

  qubit_triple ok(zero, plus, plus_i_ket());
  REQUIRE_FALSE(ok.degenerate_pair().has_value());
}

TEST_CASE("great_circle_flipper is unitary and inverts circle states") {
  std::mt19937_64 rng(131);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    // random unit normal
    double nx = g(rng), ny = g(rng), nz = g(rng);
    double n = std::sqrt(nx * nx + ny * ny + nz * nz);
    if (n < 1e-6) continue;
    bloch_vec axis{nx / n, ny / n, nz / n};
    cmatrix u = great_circle_flipper(axis);

    REQUIRE(matmul(u.dagger(), u).max_abs_diff(cmatrix::identity(2)) < 1e-12);

    // orthonormal frame spanning the plane normal to the axis
    double px = -axis.y, py = axis.x, pz = 0.0;
    double pn = std::sqrt(px * px + py * py);
    if (pn < 1e-6) {
      px = 1.0;
      py = 0.0;
      pn = 1.0;
    }
    px /= pn;
    py /= pn;
    double qx = axis.y * pz - axis.z * py;
    double qy = axis.z * px - axis.x * pz;
    double qz = axis.x * py - axis.y * px;

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
      double phi = 2.0 * pi * u01(rng);
      double rx = std::cos(phi) * px + std::sin(phi) * qx;
      double ry = std::cos(phi) * py + std::sin(phi) * qy;
      double rz = std::cos(phi) * pz + std::sin(phi) * qz;
      state_vector s = oracle::state_on_bloch(rx, ry, rz);
      REQUIRE(std::abs(inner(s, apply(u, s))) < 1e-12);
    }
  }
  REQUIRE_THROWS_AS(great_circle_flipper(bloch_vec{1.0, 1.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("triple domain validation") {
  double r = std::sqrt(0.5);
  REQUIRE_THROWS_AS(flip_triple(0.0, 1.0, r, r, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(flip_triple(r, r, 0.0, 1.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(flip_triple(r, -r, r, r, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(flip_triple(r, r, r, r, -0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(flip_triple(r, r, r, r, 3.2), std::invalid_argument);
  REQUIRE_THROWS_AS(flip_triple(0.9, 0.9, r, r, 1.0), std::invalid_argument);

  flip_triple t = flip_triple::from_ac(0.6, 0.8, 1.0);
  REQUIRE(t.b == Catch::Approx(0.8));
  REQUIRE(t.d == Catch::Approx(0.6));
  REQUIRE_THROWS_AS(flip_triple::from_ac(1.2, 0.8, 1.0), std::invalid_argument);
}

TEST_CASE("member and flip kets are orthogonal pairs") {
  std::mt19937_64 rng(137);
  for (int rep = 0; rep < 100; ++rep) {
    flip_triple t = random_triple(rng);
    for (member_state which :
         {member_state::zero, member_state::psi, member_state::phi}) {
      state_vector m = member_ket(t, which);
      state_vector f = flip_ket(t, which);
      REQUIRE(m.is_normalized(1e-12));
      REQUIRE(f.is_normalized(1e-12));
      REQUIRE(std::abs(inner(m, f)) < 1e-12);
    }
    cx w = t.psi_phi_overlap();
    cx direct = inner(member_ket(t, member_state::psi), member_ket(t, member_state::phi));
    REQUIRE(std::abs(w - direct) < 1e-13);
  }
}
