#include "finecalc/clifford.hpp"

#include <cmath>

namespace finecalc {

std::string blade_name(int storage_index) {
  const unsigned mask = kBlades.mask_of[storage_index];
  if (mask == 0) return "1";
  std::string name = "e";
  for (int i = 0; i < kMaxGenerators; ++i) {
    if (mask & (1u << i)) name += static_cast<char>('1' + i);
  }
  return name;
}

UnitImaginary::UnitImaginary(std::array<double, kMaxGenerators> direction) : dir_(direction) {
  double n2 = 0.0;
  for (double v : dir_) n2 += v * v;
  if (!(n2 > 0.0)) throw InvalidConstruction("unit imaginary needs a nonzero direction");
  const double inv = 1.0 / std::sqrt(n2);
  for (double& v : dir_) v *= inv;
}

UnitImaginary UnitImaginary::e(int i) {
  std::array<double, kMaxGenerators> d{};
  d.at(i - 1) = 1.0;
  return UnitImaginary(d);
}

UnitImaginary UnitImaginary::random(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    std::array<double, kMaxGenerators> d{};
    double n2 = 0.0;
    for (int i = 0; i < n; ++i) {
      d[i] = gauss(rng);
      n2 += d[i] * d[i];
    }
    if (n2 > 1e-6) return UnitImaginary(d);
  }
}

Multivector UnitImaginary::mv() const {
  Multivector m;
  for (int i = 0; i < kMaxGenerators; ++i) m[vector_index(i + 1)] = dir_[i];
  return m;
}

Paravector UnitImaginary::point(double a, double b) const {
  Paravector p(a);
  for (int i = 0; i < kMaxGenerators; ++i) p.xv[i] = b * dir_[i];
  return p;
}

Eigen::Matrix<double, kBladeCount, kBladeCount> regular_rep(const Multivector& a) {
  Eigen::Matrix<double, kBladeCount, kBladeCount> rho;
  rho.setZero();
  // Column j is a * (basis blade j).
  for (int i = 0; i < kBladeCount; ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; j < kBladeCount; ++j) {
      const int k = kBlades.product_index[i * kBladeCount + j];
      rho(k, j) += kBlades.product_sign[i * kBladeCount + j] * a[i];
    }
  }
  return rho;
}

Multivector mv_inverse(const Multivector& a) {
  const auto rho = regular_rep(a);
  Eigen::PartialPivLU<Eigen::Matrix<double, kBladeCount, kBladeCount>> lu(rho);
  const double rcond = lu_rcond(lu);
  if (!(rcond >= kSingularityThreshold)) {
    throw SingularMultivector("regular representation is singular (rcond " +
                              std::to_string(rcond) + ")");
  }
  // rho(a) b = 1 determines b; the image of rho is a unital subalgebra, so b
  // is also a left inverse.
  Eigen::Matrix<double, kBladeCount, 1> unit = Eigen::Matrix<double, kBladeCount, 1>::Zero();
  unit(0) = 1.0;
  const Eigen::Matrix<double, kBladeCount, 1> b = lu.solve(unit);
  Multivector inv;
  for (int i = 0; i < kBladeCount; ++i) inv[i] = b(i);
  return inv;
}

Multivector random_multivector(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const unsigned allowed = (1u << n) - 1u;
  Multivector m;
  for (int i = 0; i < kBladeCount; ++i) {
    if ((kBlades.mask_of[i] & ~allowed) == 0) m[i] = u(rng);
  }
  return m;
}

Paravector random_paravector(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Paravector p(u(rng));
  for (int i = 0; i < n; ++i) p.xv[i] = u(rng);
  return p;
}

}  // namespace finecalc
