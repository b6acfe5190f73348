#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "finecalc/calculus.hpp"
#include "finecalc/real.hpp"
#include "finecalc/slice.hpp"

namespace finecalc {

using QMultivector = BasicMultivector<quad>;
using QParavector = BasicParavector<quad>;

/// Axis-aligned cube in R^6 with the same half-width on every axis.
struct Box {
  Paravector center;
  double half_width = 0.5;
};

/// 2 + e1, half-width 0.5.
Box default_box();
/// {0.02, 0.01, 0.005} scaled by half_width / 0.5.
std::vector<double> default_steps(const Box& box);

/// Offset in units of h along the axes x0..x5.
using Offset = std::array<int, kMaxGenerators + 1>;

/// Finite-difference operator sum_o w_o g(x + h o) / h^order. Clifford
/// weights multiply from the side given by `side`; real weights are two-sided.
struct Stencil {
  std::map<Offset, Multivector> weights;
  int order = 0;
  Side side = Side::left;
  bool clifford = false;

  static Stencil identity();
  /// Cells needed on each side of a probe.
  int reach() const;

  friend bool operator==(const Stencil&, const Stencil&) = default;
};

/// Composition a after b.
Stencil compose(const Stencil& a, const Stencil& b);

/// Central-difference Dirac operator d0 +/- sum e_i d_i, e_i acting on `side`.
Stencil dirac_stencil(bool conjugate, Side side);
/// Second differences summed over the six axes (13 points), raised to power.
Stencil laplacian_stencil(int power);

using QSampler = std::function<QMultivector(const QParavector&)>;

/// A function on R^6 together with a pending stencil. Values are produced on
/// demand at probe points ("pencil" evaluation), so no grid is stored.
class GridFunction {
 public:
  GridFunction(QSampler sampler, Box box, double h, std::string provenance);

  /// Intrinsic stems are evaluated through their complex restriction
  /// u + J v, which is exact and much cheaper than Clifford Horner.
  static GridFunction of_stem(const StemPolynomial& f, const Box& box, double h);
  /// Form II Cauchy kernel S_L^{-1}(s, .) or S_R^{-1}(s, .).
  static GridFunction of_kernel(const Paravector& s, Side side, const Box& box, double h);

  const Box& box() const { return box_; }
  double h() const { return h_; }
  const std::string& provenance() const { return provenance_; }
  const Stencil& stencil() const { return stencil_; }

  GridFunction with_stencil(Stencil st, std::string provenance) const;
  GridFunction with_step(double h) const;

  /// Stencil applied at x, in quad precision.
  QMultivector at_exact(const Paravector& x) const;
  Multivector at(const Paravector& x) const;
  /// The raw sampled function (no stencil).
  QMultivector sample(const Paravector& x) const;

  /// Uniform random points of the box shrunk by the stencil reach.
  std::vector<Paravector> probes(int count, std::uint64_t seed) const;

 private:
  struct Term {
    Offset offset;
    std::vector<std::pair<int, quad>> blades;  // nonzero weight coefficients
  };
  void compile();

  QSampler sampler_;
  Box box_;
  double h_;
  std::string provenance_;
  Stencil stencil_;
  std::shared_ptr<const std::vector<Term>> terms_;
};

/// D g (or conj D g when conjugate). Throws GridTooSmall when no interior remains.
GridFunction apply_dirac(const GridFunction& g, bool conjugate, Side side = Side::left);
/// Delta_6^power g, power 1 or 2. Throws GridTooSmall.
GridFunction apply_laplacian(const GridFunction& g, int power);

struct CurvePoint {
  double h = 0.0;
  double max_residual = 0.0;
  /// log2 of the residual ratio to the previous (coarser) step; NaN for the first.
  double order_estimate = 0.0;
};

struct ResidualCurve {
  std::string identity;
  std::vector<CurvePoint> points;
  /// Least-squares slope of log residual against log h.
  double fitted_order = 0.0;
  /// Max over probes of |(4 E(h/2) - E(h)) / 3| at the two finest steps,
  /// relative like max_residual.
  double extrapolated = 0.0;
  /// Every residual is under kExactnessFloor: the stencil reproduces the
  /// identity exactly and the order estimates are NaN (roundoff carries no rate).
  bool exact = false;

  double min_order() const;
};

struct KernelCheckOptions {
  Box box = default_box();
  std::vector<double> steps;  // empty: default_steps(box)
  int probes = 100;
  std::uint64_t seed = 7;
  Side side = Side::left;
  /// Replaces -4 (D) or 16 (DDelta); used for negative controls.
  std::optional<double> constant;
  Execution exec = Execution::parallel;
};

/// max_probe |D_h S^{-1}(s,x) + 4 Q_{c,s}^{-1}(x)| / |Q_{c,s}^{-1}(x)| per step.
/// The left kernel takes the left Dirac operator, the right kernel the right one.
ResidualCurve check_kernel_identity_D(const Paravector& s, const KernelCheckOptions& opt = {});
/// Same with D_h Delta_h and 16 Q_{c,s}^{-2}(x).
ResidualCurve check_kernel_identity_DDelta(const Paravector& s, const KernelCheckOptions& opt = {});

struct ChainOptions {
  Box box = default_box();
  std::vector<double> steps;
  int probes = 100;
  std::uint64_t seed = 11;
  Execution exec = Execution::parallel;
};

struct ChainReport {
  std::string stem;
  /// D Delta^2 f, Delta (D Delta f), Delta^2 (D f), D (Delta^2 f); residuals
  /// are max |.| over probes divided by max(1, max |f|).
  std::vector<ResidualCurve> curves;
};

ChainReport check_fine_structure_chain(const StemPolynomial& f, const ChainOptions& opt = {});

/// |D_h Dbar_h f - Delta_h f| relative to max(1, max |f|). The two sides
/// use different stencils, so the residual is O(h^2) rather than zero.
ResidualCurve check_dirac_factorization(const StemPolynomial& f, const ChainOptions& opt = {});

/// Relative level under which a stencil residual counts as exactly zero.
inline constexpr double kExactnessFloor = 1e-15;

struct AxialityResult {
  double max_deviation = 0.0;
  double scale = 1.0;

  double relative() const { return max_deviation / scale; }
};

/// Fits A, B from two directions at each probe (x0, r) and measures how far a
/// third direction is from A + omega B. Throws AxisTooClose if the box comes
/// within max(0.05, reach h) of the real axis.
AxialityResult check_axiality(const GridFunction& g, int probes = 50, std::uint64_t seed = 13);

/// CSV with columns h, identity, max_residual, order_estimate.
void write_curves_csv(std::ostream& out, const std::vector<ResidualCurve>& curves);

}  // namespace finecalc
