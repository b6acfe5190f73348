#include "finecalc/slice.hpp"

#include <cmath>
#include <numbers>

namespace finecalc {

StemPolynomial::StemPolynomial(Side side, std::vector<Multivector> coefficients)
    : side_(side), coeffs_(std::move(coefficients)) {
  if (coeffs_.empty()) coeffs_.emplace_back(0.0);
}

StemPolynomial StemPolynomial::monomial(int k, Side side) {
  std::vector<Multivector> c(k + 1);
  c[k] = Multivector(1.0);
  return StemPolynomial(side, std::move(c));
}

StemPolynomial StemPolynomial::real(const std::vector<double>& coefficients, Side side) {
  std::vector<Multivector> c;
  c.reserve(coefficients.size());
  for (double v : coefficients) c.emplace_back(v);
  return StemPolynomial(side, std::move(c));
}

bool StemPolynomial::intrinsic() const {
  for (const auto& a : coeffs_) {
    if (!a.is_real_scalar()) return false;
  }
  return true;
}

StemPolynomial product(const StemPolynomial& f, const StemPolynomial& g) {
  if (!f.intrinsic()) throw NotIntrinsic("left factor of a stem product must be intrinsic");
  const auto& a = f.coefficients();
  const auto& b = g.coefficients();
  std::vector<Multivector> c(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i].scalar() * b[j];
  }
  return StemPolynomial(g.side(), std::move(c));
}

AxialDecomposition axial_parts(const StemPolynomial& f, double x0, double r, const UnitImaginary& j) {
  const Multivector plus = eval(f, j.point(x0, r));
  const Multivector minus = eval(f, j.point(x0, -r));
  const Multivector jm = j.mv();
  AxialDecomposition d;
  d.A = 0.5 * (plus + minus);
  d.B = (f.side() == Side::left) ? -0.5 * (jm * (plus - minus)) : -0.5 * ((plus - minus) * jm);
  return d;
}

bool on_sphere(const Paravector& s, const Paravector& x) {
  const double gap = std::hypot(x.x0 - s.x0, x.vector_norm() - s.vector_norm());
  return gap < 1e-9 * (1.0 + s.modulus());
}

namespace {

void require_off_sphere(const Paravector& s, const Paravector& x) {
  if (on_sphere(s, x)) throw OnSpectrumSphere("x lies on the sphere [s]");
}

// x^2 - 2 Re(s) x + |s|^2
Multivector x_polynomial(const Paravector& s, const Paravector& x) {
  const Multivector xm = x.mv();
  return xm * xm - 2.0 * s.x0 * xm + Multivector(s.modulus_sq());
}

// s^2 - 2 Re(x) s + |x|^2
Multivector s_polynomial(const Paravector& s, const Paravector& x) {
  const Multivector sm = s.mv();
  return sm * sm - 2.0 * x.x0 * sm + Multivector(x.modulus_sq());
}

}  // namespace

Multivector cauchy_kernel_left(const Paravector& s, const Paravector& x, KernelForm form) {
  require_off_sphere(s, x);
  if (form == KernelForm::I) {
    return -(mv_inverse(x_polynomial(s, x)) * (x - s.conj()).mv());
  }
  return (s - x.conj()).mv() * mv_inverse(s_polynomial(s, x));
}

Multivector cauchy_kernel_right(const Paravector& s, const Paravector& x, KernelForm form) {
  require_off_sphere(s, x);
  if (form == KernelForm::I) {
    return -((x - s.conj()).mv() * mv_inverse(x_polynomial(s, x)));
  }
  return mv_inverse(s_polynomial(s, x)) * (s - x.conj()).mv();
}

Multivector q_poly(const Paravector& s, const Paravector& p) {
  const Multivector pm = p.mv();
  return pm * pm - 2.0 * s.x0 * pm + Multivector(s.modulus_sq());
}

Multivector q_poly_inv(const Paravector& s, const Paravector& p) {
  if (on_sphere(s, p)) throw OnSpectrumSphere("p lies on the sphere [s]");
  return mv_inverse(q_poly(s, p));
}

Multivector scalar_cauchy_reproduce(const StemPolynomial& f, const Paravector& x, const Contour& contour) {
  if (!contour.encloses(x.x0, x.vector_norm())) {
    throw InvalidConstruction("contour does not enclose [x]");
  }
  Multivector sum;
  for (int k = 0; k < contour.nodes(); ++k) {
    const Paravector s = contour.node(k);
    const Multivector w = contour.weight(k).mv();
    if (f.side() == Side::left) {
      sum += cauchy_kernel_left(s, x, KernelForm::II) * w * eval(f, s);
    } else {
      sum += eval(f, s) * w * cauchy_kernel_right(s, x, KernelForm::II);
    }
  }
  return (0.5 / std::numbers::pi) * sum;
}

}  // namespace finecalc
