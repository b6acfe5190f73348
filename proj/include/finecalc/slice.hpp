#pragma once

#include <vector>

#include "finecalc/clifford.hpp"
#include "finecalc/contour.hpp"

namespace finecalc {

enum class Side { left, right };

/// Form I writes the kernel through the x-polynomial x^2 - 2 Re(s) x + |s|^2,
/// Form II through the s-polynomial s^2 - 2 Re(x) s + |x|^2.
enum class KernelForm { I, II };

/// Polynomial stem sum_k z^k a_k (left) or sum_k a_k z^k (right) with
/// Clifford coefficients. Every slice hyperholomorphic function used by the
/// library is of this form.
class StemPolynomial {
 public:
  StemPolynomial(Side side, std::vector<Multivector> coefficients);

  /// z^k.
  static StemPolynomial monomial(int k, Side side = Side::left);
  /// Real coefficients c_0..c_K; always intrinsic.
  static StemPolynomial real(const std::vector<double>& coefficients, Side side = Side::left);

  Side side() const { return side_; }
  const std::vector<Multivector>& coefficients() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  /// True iff every coefficient is a real scalar.
  bool intrinsic() const;

  StemPolynomial with_side(Side side) const { return StemPolynomial(side, coeffs_); }

 private:
  Side side_;
  std::vector<Multivector> coeffs_;
};

/// Stem of the pointwise product f g. Requires f intrinsic; the product of a
/// non-intrinsic f with g is not slice hyperholomorphic in general.
StemPolynomial product(const StemPolynomial& f, const StemPolynomial& g);

/// Horner evaluation at a paravector, any floating type.
template <class Real>
BasicMultivector<Real> eval(const StemPolynomial& f, const BasicParavector<Real>& x) {
  const auto& a = f.coefficients();
  const BasicMultivector<Real> xm = x.mv();
  BasicMultivector<Real> acc = BasicMultivector<Real>::cast(a.back());
  for (int k = static_cast<int>(a.size()) - 2; k >= 0; --k) {
    const auto ak = BasicMultivector<Real>::cast(a[k]);
    acc = (f.side() == Side::left) ? xm * acc + ak : acc * xm + ak;
  }
  return acc;
}

/// Values of the axial components at (x0, r) for the slice through J.
struct AxialDecomposition {
  Multivector A;
  Multivector B;
};

/// A = (f(x0+Jr) + f(x0-Jr))/2, B = -J (f(x0+Jr) - f(x0-Jr))/2 for a left
/// stem (J on the right for a right stem).
AxialDecomposition axial_parts(const StemPolynomial& f, double x0, double r, const UnitImaginary& j);

/// Tolerance test for x in [s]: the points (Re, |vector|) are closer than
/// 1e-9 (1 + |s|).
bool on_sphere(const Paravector& s, const Paravector& x);

/// Slice Cauchy kernels; inverses through mv_inverse. Throw OnSpectrumSphere
/// when x is in [s].
Multivector cauchy_kernel_left(const Paravector& s, const Paravector& x, KernelForm form);
Multivector cauchy_kernel_right(const Paravector& s, const Paravector& x, KernelForm form);

/// Q_s(p) = p^2 - 2 s0 p + |s|^2 and its inverse.
Multivector q_poly(const Paravector& s, const Paravector& p);
Multivector q_poly_inv(const Paravector& s, const Paravector& p);

/// s^2 - 2 Re(x) s + |x|^2. It lies in the slice of s, so it is a paravector
/// and inverts in closed form.
template <class Real>
BasicParavector<Real> pseudo_q(const BasicParavector<Real>& s, const BasicParavector<Real>& x) {
  BasicParavector<Real> q;
  const Real sv2 = s.vector_norm_sq();
  q.x0 = s.x0 * s.x0 - sv2 - Real(2) * x.x0 * s.x0 + x.modulus_sq();
  for (int i = 0; i < kMaxGenerators; ++i) q.xv[i] = Real(2) * (s.x0 - x.x0) * s.xv[i];
  return q;
}

/// Form II kernels evaluated without a linear solve, for any floating type.
template <class Real>
BasicMultivector<Real> kernel_left_closed(const BasicParavector<Real>& s, const BasicParavector<Real>& x) {
  return (s - x.conj()).mv() * pv_inverse(pseudo_q(s, x)).mv();
}
template <class Real>
BasicMultivector<Real> kernel_right_closed(const BasicParavector<Real>& s, const BasicParavector<Real>& x) {
  return pv_inverse(pseudo_q(s, x)).mv() * (s - x.conj()).mv();
}

/// (1/2pi) times the contour integral of S_L^{-1}(s,x) ds_J f(s) (left f) or
/// f(s) ds_J S_R^{-1}(s,x) (right f), by the trapezoidal rule.
Multivector scalar_cauchy_reproduce(const StemPolynomial& f, const Paravector& x, const Contour& contour);

}  // namespace finecalc
