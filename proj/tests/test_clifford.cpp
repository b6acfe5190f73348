#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "finecalc/clifford.hpp"
#include "finecalc/real.hpp"

using namespace finecalc;

namespace {

// Reference product on index lists: concatenate, bubble sort counting swaps,
// then cancel equal neighbours with e_i e_i = -1.
Multivector naive_product(const Multivector& a, const Multivector& b) {
  Multivector out;
  for (int i = 0; i < kBladeCount; ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; j < kBladeCount; ++j) {
      if (b[j] == 0.0) continue;
      std::vector<int> idx;
      for (int g = 0; g < kMaxGenerators; ++g) {
        if (kBlades.mask_of[i] & (1u << g)) idx.push_back(g);
      }
      for (int g = 0; g < kMaxGenerators; ++g) {
        if (kBlades.mask_of[j] & (1u << g)) idx.push_back(g);
      }
      double sign = 1.0;
      for (std::size_t p = 0; p < idx.size(); ++p) {
        for (std::size_t q = 0; q + 1 < idx.size() - p; ++q) {
          if (idx[q] > idx[q + 1]) {
            std::swap(idx[q], idx[q + 1]);
            sign = -sign;
          }
        }
      }
      unsigned mask = 0;
      for (std::size_t p = 0; p < idx.size();) {
        if (p + 1 < idx.size() && idx[p] == idx[p + 1]) {
          sign = -sign;
          p += 2;
        } else {
          mask |= 1u << idx[p];
          ++p;
        }
      }
      out[kBlades.index_of[mask]] += sign * a[i] * b[j];
    }
  }
  return out;
}

Multivector blade(std::initializer_list<int> gens) {
  Multivector m(1.0);
  for (int g : gens) m = m * Multivector::e(g);
  return m;
}

}  // namespace

TEST_CASE("generators square to -1 and anticommute") {
  for (int i = 1; i <= 5; ++i) {
    CHECK(Multivector::e(i) * Multivector::e(i) == Multivector(-1.0));
    for (int j = i + 1; j <= 5; ++j) {
      CHECK(Multivector::e(i) * Multivector::e(j) == -(Multivector::e(j) * Multivector::e(i)));
    }
  }
}

TEST_CASE("blade squares follow the grade rule") {
  // (e_A)^2 = (-1)^{k(k+1)/2} for a grade-k blade.
  CHECK(blade({1, 2}) * blade({1, 2}) == Multivector(-1.0));
  CHECK(blade({1, 2, 3}) * blade({1, 2, 3}) == Multivector(1.0));
  CHECK(blade({1, 2, 3, 4}) * blade({1, 2, 3, 4}) == Multivector(1.0));
  CHECK(blade({1, 2, 3, 4, 5}) * blade({1, 2, 3, 4, 5}) == Multivector(-1.0));
}

TEST_CASE("storage order is graded lexicographic") {
  CHECK(kBlades.mask_of[0] == 0);
  for (int i = 1; i <= 5; ++i) CHECK(kBlades.mask_of[vector_index(i)] == (1u << (i - 1)));
  CHECK(kBlades.mask_of[6] == 0b00011);
  CHECK(kBlades.mask_of[31] == 0b11111);
  for (int i = 0; i < kBladeCount; ++i) CHECK(kBlades.index_of[kBlades.mask_of[i]] == i);
}

TEST_CASE("table product matches the index-list reference") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 40; ++k) {
    const Multivector a = random_multivector(rng);
    const Multivector b = random_multivector(rng);
    CHECK((a * b - naive_product(a, b)).max_abs() < 1e-14);
  }
}

TEST_CASE("product is associative and distributive") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const Multivector a = random_multivector(rng);
    const Multivector b = random_multivector(rng);
    const Multivector c = random_multivector(rng);
    CHECK(((a * b) * c - a * (b * c)).max_abs() < 1e-13);
    CHECK((a * (b + c) - (a * b + a * c)).max_abs() < 1e-14);
  }
}

TEST_CASE("random_multivector respects the algebra dimension") {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 5; ++n) CHECK(random_multivector(rng, n).lies_in(n));
}

TEST_CASE("regular representation is left multiplication") {
  std::mt19937_64 rng(4);
  const Multivector a = random_multivector(rng);
  const Multivector b = random_multivector(rng);
  Eigen::Matrix<double, kBladeCount, 1> vb;
  for (int i = 0; i < kBladeCount; ++i) vb[i] = b[i];
  const Eigen::Matrix<double, kBladeCount, 1> prod = regular_rep(a) * vb;
  const Multivector ab = a * b;
  for (int i = 0; i < kBladeCount; ++i) CHECK(prod[i] == doctest::Approx(ab[i]).epsilon(1e-13));
}

TEST_CASE("mv_inverse is a two-sided inverse") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const Multivector a = random_multivector(rng);
    const Multivector ai = mv_inverse(a);
    CHECK((a * ai - Multivector(1.0)).max_abs() < 1e-10);
    CHECK((ai * a - Multivector(1.0)).max_abs() < 1e-10);
  }
}

TEST_CASE("zero divisors are rejected") {
  // e123^2 = +1, so (1 + e123)(1 - e123) = 0.
  CHECK_THROWS_AS(mv_inverse(Multivector(1.0) + blade({1, 2, 3})), SingularMultivector);
  CHECK_THROWS_AS(mv_inverse(Multivector()), SingularMultivector);
  CHECK_NOTHROW(mv_inverse(Multivector(1.0) + blade({1, 2, 3, 4, 5})));
}

TEST_CASE("paravector conjugate, modulus and inverse") {
  std::mt19937_64 rng(6);
  const Paravector x = random_paravector(rng);
  const Multivector xx = x.mv() * x.conj().mv();
  CHECK(xx.scalar() == doctest::Approx(x.modulus_sq()));
  for (int i = 1; i < kBladeCount; ++i) CHECK(std::abs(xx[i]) < 1e-15);
  CHECK((x.mv() * pv_inverse(x).mv() - Multivector(1.0)).max_abs() < 1e-15);
  CHECK((pv_inverse(x).mv() - mv_inverse(x.mv())).max_abs() < 1e-13);
  CHECK_THROWS_AS(pv_inverse(Paravector()), ZeroParavector);
  CHECK(as_paravector(x.mv(), 1e-14) == x);
  CHECK_THROWS_AS(as_paravector(blade({1, 2}), 1e-14), InvalidConstruction);
}

TEST_CASE("unit imaginaries square to -1") {
  std::mt19937_64 rng(7);
  for (int n = 1; n <= 5; ++n) {
    const UnitImaginary j = UnitImaginary::random(rng, n);
    CHECK((j.mv() * j.mv() - Multivector(-1.0)).max_abs() < 1e-15);
    CHECK(j.mv().lies_in(n));
  }
  CHECK_THROWS_AS(UnitImaginary({0, 0, 0, 0, 0}), InvalidConstruction);
  const Paravector p = UnitImaginary::e(3).point(2.0, 0.5);
  CHECK(p.x0 == 2.0);
  CHECK(p.xv[2] == 0.5);
}

TEST_CASE("quad arithmetic agrees with double to double precision") {
  std::mt19937_64 rng(8);
  const Multivector a = random_multivector(rng);
  const Multivector b = random_multivector(rng);
  const auto q = BasicMultivector<quad>::cast(a) * BasicMultivector<quad>::cast(b);
  CHECK((Multivector::cast(q) - a * b).max_abs() < 1e-14);
}
