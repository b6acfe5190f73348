#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <random>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "finecalc/errors.hpp"
#include "finecalc/real.hpp"

namespace finecalc {

/// Number of generating units of the largest supported algebra R_5.
inline constexpr int kMaxGenerators = 5;
/// Number of blades of R_5.
inline constexpr int kBladeCount = 1 << kMaxGenerators;

/// Blade e_A identified by the bit set of A: bit (i-1) stands for e_i.
using BladeMask = std::uint8_t;

/// Storage layout and multiplication table for R_5.
///
/// Coefficients are stored in graded-lexicographic order: 1, e1..e5, e12,
/// e13, ..., e45, e123, ..., e12345. The product of two basis blades is
/// again a basis blade up to sign; both are tabulated once here.
struct BladeTable {
  std::array<BladeMask, kBladeCount> mask_of{};
  std::array<std::uint8_t, kBladeCount> index_of{};
  std::array<std::uint8_t, kBladeCount * kBladeCount> product_index{};
  std::array<std::int8_t, kBladeCount * kBladeCount> product_sign{};
};

namespace detail {

// Sign of e_A e_B after moving every generator of B past those of A into
// increasing order, with e_i^2 = -1 for every shared generator.
constexpr int blade_product_sign(unsigned a, unsigned b) {
  int swaps = 0;
  for (unsigned rest = a >> 1; rest != 0; rest >>= 1) {
    swaps += std::popcount(rest & b);
  }
  swaps += std::popcount(a & b);
  return (swaps % 2 == 0) ? 1 : -1;
}

constexpr bool grade_lex_less(unsigned a, unsigned b) {
  const int ga = std::popcount(a);
  const int gb = std::popcount(b);
  if (ga != gb) return ga < gb;
  // Same grade: compare increasing index lists lexicographically.
  while (a != 0 && b != 0) {
    const int ia = std::countr_zero(a);
    const int ib = std::countr_zero(b);
    if (ia != ib) return ia < ib;
    a &= a - 1;
    b &= b - 1;
  }
  return false;
}

constexpr BladeTable make_blade_table() {
  BladeTable t;
  std::array<unsigned, kBladeCount> order{};
  for (unsigned m = 0; m < kBladeCount; ++m) order[m] = m;
  std::sort(order.begin(), order.end(), grade_lex_less);
  for (int i = 0; i < kBladeCount; ++i) {
    t.mask_of[i] = static_cast<BladeMask>(order[i]);
    t.index_of[order[i]] = static_cast<std::uint8_t>(i);
  }
  for (int i = 0; i < kBladeCount; ++i) {
    for (int j = 0; j < kBladeCount; ++j) {
      const unsigned a = t.mask_of[i];
      const unsigned b = t.mask_of[j];
      t.product_index[i * kBladeCount + j] = t.index_of[a ^ b];
      t.product_sign[i * kBladeCount + j] =
          static_cast<std::int8_t>(blade_product_sign(a, b));
    }
  }
  return t;
}

}  // namespace detail

inline constexpr BladeTable kBlades = detail::make_blade_table();

/// Storage index of the blade e_i (1 <= i <= 5).
constexpr int vector_index(int i) { return kBlades.index_of[1u << (i - 1)]; }

/// Storage index of the pseudoscalar e_12345.
inline constexpr int kPseudoscalarIndex = kBladeCount - 1;

/// Human-readable blade name, e.g. "e13"; "1" for the scalar blade.
std::string blade_name(int storage_index);

/// Element of R_5 as 32 dense real coefficients.
template <class Real>
class BasicMultivector {
 public:
  using value_type = Real;

  BasicMultivector() { coeffs_.fill(Real(0)); }
  explicit BasicMultivector(Real scalar) : BasicMultivector() {
    coeffs_[0] = scalar;
  }

  static BasicMultivector unit(int storage_index, Real value = Real(1)) {
    BasicMultivector m;
    m.coeffs_[storage_index] = value;
    return m;
  }
  /// The generator e_i, 1 <= i <= 5.
  static BasicMultivector e(int i) { return unit(vector_index(i)); }
  static BasicMultivector from_mask(BladeMask mask, Real value = Real(1)) {
    return unit(kBlades.index_of[mask], value);
  }

  template <class Other>
  static BasicMultivector cast(const BasicMultivector<Other>& o) {
    BasicMultivector m;
    for (int i = 0; i < kBladeCount; ++i) m.coeffs_[i] = static_cast<Real>(o[i]);
    return m;
  }

  Real& operator[](int storage_index) { return coeffs_[storage_index]; }
  const Real& operator[](int storage_index) const { return coeffs_[storage_index]; }
  Real coeff(BladeMask mask) const { return coeffs_[kBlades.index_of[mask]]; }
  Real scalar() const { return coeffs_[0]; }

  std::span<const Real, kBladeCount> coeffs() const { return coeffs_; }

  BasicMultivector& operator+=(const BasicMultivector& o) {
    for (int i = 0; i < kBladeCount; ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  BasicMultivector& operator-=(const BasicMultivector& o) {
    for (int i = 0; i < kBladeCount; ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  BasicMultivector& operator*=(Real k) {
    for (auto& c : coeffs_) c *= k;
    return *this;
  }

  friend BasicMultivector operator+(BasicMultivector a, const BasicMultivector& b) { return a += b; }
  friend BasicMultivector operator-(BasicMultivector a, const BasicMultivector& b) { return a -= b; }
  friend BasicMultivector operator-(BasicMultivector a) { return a *= Real(-1); }
  friend BasicMultivector operator*(BasicMultivector a, Real k) { return a *= k; }
  friend BasicMultivector operator*(Real k, BasicMultivector a) { return a *= k; }

  /// Clifford product.
  friend BasicMultivector operator*(const BasicMultivector& a, const BasicMultivector& b) {
    BasicMultivector r;
    for (int i = 0; i < kBladeCount; ++i) {
      const Real ai = a.coeffs_[i];
      if (ai == Real(0)) continue;
      const int row = i * kBladeCount;
      for (int j = 0; j < kBladeCount; ++j) {
        const Real bj = b.coeffs_[j];
        if (bj == Real(0)) continue;
        const Real term = ai * bj;
        if (kBlades.product_sign[row + j] > 0) {
          r.coeffs_[kBlades.product_index[row + j]] += term;
        } else {
          r.coeffs_[kBlades.product_index[row + j]] -= term;
        }
      }
    }
    return r;
  }

  friend bool operator==(const BasicMultivector&, const BasicMultivector&) = default;

  /// Euclidean norm of the coefficient vector.
  Real norm() const {
    Real s(0);
    for (const auto& c : coeffs_) s += c * c;
    return sqrt_of(s);
  }
  Real max_abs() const {
    Real m(0);
    for (const auto& c : coeffs_) m = std::max(m, abs_of(c));
    return m;
  }

  /// True when every coefficient outside the blades of R_n vanishes.
  bool lies_in(int n) const {
    const unsigned allowed = (1u << n) - 1u;
    for (int i = 0; i < kBladeCount; ++i) {
      if ((kBlades.mask_of[i] & ~allowed) != 0 && coeffs_[i] != Real(0)) return false;
    }
    return true;
  }
  bool is_real_scalar() const {
    for (int i = 1; i < kBladeCount; ++i) {
      if (coeffs_[i] != Real(0)) return false;
    }
    return true;
  }

 private:
  std::array<Real, kBladeCount> coeffs_;
};

using Multivector = BasicMultivector<double>;

/// Paravector x0 + x1 e1 + ... + x5 e5, i.e. a point of R^6.
template <class Real>
struct BasicParavector {
  Real x0{0};
  std::array<Real, kMaxGenerators> xv{};

  BasicParavector() = default;
  BasicParavector(Real re, std::array<Real, kMaxGenerators> vec) : x0(re), xv(vec) {}
  explicit BasicParavector(Real re) : x0(re) {}

  template <class Other>
  static BasicParavector cast(const BasicParavector<Other>& o) {
    BasicParavector p;
    p.x0 = static_cast<Real>(o.x0);
    for (int i = 0; i < kMaxGenerators; ++i) p.xv[i] = static_cast<Real>(o.xv[i]);
    return p;
  }

  Real re() const { return x0; }
  Real vector_norm_sq() const {
    Real s(0);
    for (const auto& v : xv) s += v * v;
    return s;
  }
  Real vector_norm() const { return sqrt_of(vector_norm_sq()); }
  Real modulus_sq() const { return x0 * x0 + vector_norm_sq(); }
  Real modulus() const { return sqrt_of(modulus_sq()); }

  BasicParavector conj() const {
    BasicParavector c = *this;
    for (auto& v : c.xv) v = -v;
    return c;
  }

  BasicMultivector<Real> mv() const {
    BasicMultivector<Real> m(x0);
    for (int i = 0; i < kMaxGenerators; ++i) m[vector_index(i + 1)] = xv[i];
    return m;
  }

  friend BasicParavector operator+(BasicParavector a, const BasicParavector& b) {
    a.x0 += b.x0;
    for (int i = 0; i < kMaxGenerators; ++i) a.xv[i] += b.xv[i];
    return a;
  }
  friend BasicParavector operator-(BasicParavector a, const BasicParavector& b) {
    a.x0 -= b.x0;
    for (int i = 0; i < kMaxGenerators; ++i) a.xv[i] -= b.xv[i];
    return a;
  }
  friend BasicParavector operator*(Real k, BasicParavector a) {
    a.x0 *= k;
    for (auto& v : a.xv) v *= k;
    return a;
  }
  friend bool operator==(const BasicParavector&, const BasicParavector&) = default;
};

using Paravector = BasicParavector<double>;

/// conj(x) = x0 - x_vec.
template <class Real>
BasicParavector<Real> conj(const BasicParavector<Real>& x) {
  return x.conj();
}

/// x^{-1} = conj(x) / |x|^2.
template <class Real>
BasicParavector<Real> pv_inverse(const BasicParavector<Real>& x) {
  const Real m2 = x.modulus_sq();
  if (m2 == Real(0)) throw ZeroParavector("paravector has zero modulus");
  return (Real(1) / m2) * x.conj();
}

/// Reads a multivector that is a paravector up to `tol` in every
/// non-paravector coefficient. Used where the algebra guarantees the
/// result lies in a slice (e.g. polynomials in a single paravector).
template <class Real>
BasicParavector<Real> as_paravector(const BasicMultivector<Real>& m, Real tol) {
  BasicParavector<Real> p;
  p.x0 = m[0];
  for (int i = 0; i < kMaxGenerators; ++i) p.xv[i] = m[vector_index(i + 1)];
  for (int k = kMaxGenerators + 1; k < kBladeCount; ++k) {
    if (abs_of(m[k]) > tol) {
      throw InvalidConstruction("multivector is not a paravector");
    }
  }
  return p;
}

/// Unit 1-vector I with I^2 = -1.
class UnitImaginary {
 public:
  /// Normalises `direction`; throws InvalidConstruction on a zero vector.
  explicit UnitImaginary(std::array<double, kMaxGenerators> direction);

  static UnitImaginary e(int i);
  /// Uniform on the unit sphere of span{e1..en}.
  static UnitImaginary random(std::mt19937_64& rng, int n = kMaxGenerators);

  const std::array<double, kMaxGenerators>& direction() const { return dir_; }
  Multivector mv() const;
  /// a + I b.
  Paravector point(double a, double b) const;

 private:
  std::array<double, kMaxGenerators> dir_;
};

/// Matrix of left multiplication by `a` in the storage basis.
Eigen::Matrix<double, kBladeCount, kBladeCount> regular_rep(const Multivector& a);

/// Two-sided inverse through the left-regular representation. Throws
/// SingularMultivector when the reciprocal condition estimate of the
/// regular matrix falls below `kSingularityThreshold`.
Multivector mv_inverse(const Multivector& a);

inline constexpr double kSingularityThreshold = 1e-12;

/// Reciprocal condition estimate of a partial-pivot LU. Eigen's estimator
/// returns 1 when a pivot is exactly zero, so the pivot ratio caps it.
template <class Lu>
double lu_rcond(const Lu& lu) {
  const auto piv = lu.matrixLU().diagonal().cwiseAbs();
  const double top = piv.maxCoeff();
  if (!(top > 0.0)) return 0.0;
  return std::min(lu.rcond(), piv.minCoeff() / top);
}

/// Random dense multivector restricted to R_n, coefficients in [-1, 1].
Multivector random_multivector(std::mt19937_64& rng, int n = kMaxGenerators);
/// Random paravector of R_n, coefficients in [-scale, scale].
Paravector random_paravector(std::mt19937_64& rng, int n = kMaxGenerators, double scale = 1.0);

}  // namespace finecalc
