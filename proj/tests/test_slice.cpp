#include <random>

#include "doctest.h"
#include "finecalc/contour.hpp"
#include "finecalc/slice.hpp"
#include "support.hpp"

using namespace finecalc;
using test::rel;

TEST_CASE("stem polynomials evaluate by powers") {
  std::mt19937_64 rng(11);
  const Paravector x = random_paravector(rng);
  const Multivector a = random_multivector(rng);
  const Multivector b = random_multivector(rng);
  const StemPolynomial left(Side::left, {a, Multivector(), b});
  const StemPolynomial right(Side::right, {a, Multivector(), b});
  const Multivector x2 = x.mv() * x.mv();
  CHECK(rel(eval(left, x), a + x2 * b) < 1e-15);
  CHECK(rel(eval(right, x), a + b * x2) < 1e-15);
  CHECK(StemPolynomial::monomial(3).degree() == 3);
  CHECK(StemPolynomial::real({1, 2}).intrinsic());
  CHECK_FALSE(left.intrinsic());
}

TEST_CASE("intrinsic product stems multiply pointwise") {
  std::mt19937_64 rng(12);
  const StemPolynomial f = StemPolynomial::real({0.5, -1.0, 2.0});
  const StemPolynomial g(Side::left, {random_multivector(rng), random_multivector(rng)});
  const Paravector x = random_paravector(rng);
  CHECK(rel(eval(product(f, g), x), eval(f, x) * eval(g, x)) < 1e-14);
  CHECK_THROWS_AS(product(g, f), NotIntrinsic);
}

TEST_CASE("axial parts do not depend on the slice") {
  std::mt19937_64 rng(13);
  const StemPolynomial f(Side::left, {random_multivector(rng), random_multivector(rng), random_multivector(rng)});
  const UnitImaginary j1 = UnitImaginary::random(rng);
  const UnitImaginary j2 = UnitImaginary::random(rng);
  const auto p1 = axial_parts(f, 0.4, 1.3, j1);
  const auto p2 = axial_parts(f, 0.4, 1.3, j2);
  CHECK(rel(p1.A, p2.A) < 1e-14);
  CHECK(rel(p1.B, p2.B) < 1e-14);
  // f(x0 + J r) = A + J B for a left stem.
  CHECK(rel(eval(f, j2.point(0.4, 1.3)), p1.A + j2.mv() * p1.B) < 1e-14);
}

TEST_CASE("Cauchy kernel forms agree away from the sphere") {
  std::mt19937_64 rng(14);
  for (int k = 0; k < 10; ++k) {
    const Paravector s = random_paravector(rng, 5, 2.0);
    const Paravector x = random_paravector(rng);
    if (on_sphere(s, x)) continue;
    CHECK(rel(cauchy_kernel_left(s, x, KernelForm::I), cauchy_kernel_left(s, x, KernelForm::II)) < 1e-11);
    CHECK(rel(cauchy_kernel_right(s, x, KernelForm::I), cauchy_kernel_right(s, x, KernelForm::II)) < 1e-11);
    CHECK(rel(cauchy_kernel_left(s, x, KernelForm::II), kernel_left_closed(s, x)) < 1e-13);
    CHECK(rel(cauchy_kernel_right(s, x, KernelForm::II), kernel_right_closed(s, x)) < 1e-13);
  }
}

TEST_CASE("kernels reject points on the sphere of s") {
  const Paravector s = UnitImaginary::e(1).point(0.5, 2.0);
  const Paravector x = UnitImaginary::e(4).point(0.5, 2.0);
  CHECK(on_sphere(s, x));
  CHECK_THROWS_AS(cauchy_kernel_left(s, x, KernelForm::II), OnSpectrumSphere);
  CHECK_THROWS_AS(cauchy_kernel_right(s, x, KernelForm::I), OnSpectrumSphere);
  CHECK_THROWS_AS(q_poly_inv(s, x), OnSpectrumSphere);
}

TEST_CASE("Q_s(p) and its inverse") {
  std::mt19937_64 rng(15);
  const Paravector s = random_paravector(rng);
  const Paravector p = random_paravector(rng);
  const Multivector q = q_poly(s, p);
  // p^2 - 2 s0 p + |s|^2, written out.
  CHECK(rel(q, p.mv() * p.mv() - 2.0 * s.x0 * p.mv() + Multivector(s.modulus_sq())) < 1e-15);
  CHECK((q * q_poly_inv(s, p) - Multivector(1.0)).max_abs() < 1e-12);
}

TEST_CASE("pseudo Q is the scalar form of s^2 - 2 x0 s + |x|^2") {
  std::mt19937_64 rng(16);
  const Paravector s = random_paravector(rng);
  const Paravector x = random_paravector(rng);
  const Multivector direct = s.mv() * s.mv() - 2.0 * x.x0 * s.mv() + Multivector(x.modulus_sq());
  CHECK(rel(pseudo_q(s, x).mv(), direct) < 1e-15);
}

TEST_CASE("scalar Cauchy formula reproduces slice functions") {
  std::mt19937_64 rng(17);
  const StemPolynomial f(Side::left, {random_multivector(rng), random_multivector(rng), Multivector(),
                                      random_multivector(rng)});
  const Contour c(0.0, 3.0, UnitImaginary::random(rng), 128);
  const Paravector x = random_paravector(rng, 5, 0.5);
  CHECK(rel(scalar_cauchy_reproduce(f, x, c), eval(f, x)) < 1e-12);
  const StemPolynomial fr = f.with_side(Side::right);
  CHECK(rel(scalar_cauchy_reproduce(fr, x, c), eval(fr, x)) < 1e-12);
  CHECK_THROWS_AS(scalar_cauchy_reproduce(f, UnitImaginary::e(1).point(0.0, 5.0), c), InvalidConstruction);
}

TEST_CASE("contour nodes, weights and enclosure") {
  const UnitImaginary j = UnitImaginary::e(2);
  const Contour c(1.0, 2.0, j, 64);
  Multivector wsum;
  for (int k = 0; k < c.nodes(); ++k) {
    wsum += c.weight(k).mv();
    CHECK((c.node(k) - Paravector(1.0)).modulus() == doctest::Approx(2.0));
  }
  CHECK(wsum.max_abs() < 1e-13);
  CHECK(c.encloses(1.0, 1.5));
  CHECK_FALSE(c.encloses(1.0, 2.5));
  CHECK(c.node_distance(1.0, 1.5) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK_THROWS_AS(Contour(0.0, -1.0, j, 64), InvalidConstruction);
  CHECK_THROWS_AS(Contour(0.0, 1.0, j, 7), InvalidConstruction);
}
