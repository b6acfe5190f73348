#pragma once

#include <utility>

#include "finecalc/contour.hpp"
#include "finecalc/operator.hpp"
#include "finecalc/resolvent.hpp"
#include "finecalc/slice.hpp"

namespace finecalc {

/// Resolvent under the integral: S -> S_L / S_R, D -> S_D, Delta -> S_Delta,L/R,
/// DDelta -> S_DDelta.
enum class CalculusKind { S, D, Delta, DDelta };

std::string_view calculus_name(CalculusKind kind);

/// Serial is the reference; parallel fans the nodes out with OpenMP and sums
/// the node terms in index order, so both give bitwise equal results.
enum class Execution { serial, parallel };

/// Rejects a contour that misses a sphere of sigma_S(T) or passes closer
/// than 0.1 R to one (ContourTouchesSpectrum).
void require_admissible(const Contour& contour, const ParavectorOperator& t);

/// (1/2pi) sum_k R(s_k) w_k f(s_k) for the left form, (1/2pi) sum_k f(s_k) w_k R(s_k)
/// for the right form. form must equal f.side() (SideMismatch otherwise).
CliffordOperator apply(CalculusKind kind, const StemPolynomial& f, const ParavectorOperator& t,
                       const Contour& contour, Side form = Side::left, Execution exec = Execution::parallel);

struct AdaptiveResult {
  CliffordOperator value;
  int nodes = 0;
  /// False when N reached 4096 without two successive values agreeing.
  bool converged = false;
};

/// Starts from contour.nodes() (at least 256) and doubles N until successive
/// values differ by less than 1e-10 relative to max(norm, 1), or N = 4096.
AdaptiveResult apply_adaptive(CalculusKind kind, const StemPolynomial& f, const ParavectorOperator& t,
                              const Contour& contour, Side form = Side::left,
                              Execution exec = Execution::parallel);

/// ||LHS - RHS|| with scale max(||LHS||, ||RHS||, 1).
struct RuleResidual {
  double residual = 0.0;
  double scale = 1.0;

  double relative() const { return residual / scale; }
};

/// Residual pair of one product rule, one entry per stated variant.
struct ProductRuleResidual {
  RuleResidual first;
  RuleResidual second;
};

/// (fg)_D(T) against f_D(T) g(T) + f(conj T) g_D(T) and against
/// f_D(T) g(conj T) + f(T) g_D(T). f-terms use G2 = G1 scaled by 1.5,
/// g-terms and fg use G1.
ProductRuleResidual product_rule_check_biharmonic(const StemPolynomial& f, const StemPolynomial& g,
                                                  const ParavectorOperator& t, const Contour& g1,
                                                  Execution exec = Execution::parallel);

/// (fg)_DDelta(T) against
///   f(conj T) g_DDelta(T) + f_DDelta(T) g(conj T) + 1/2 f_D(T) g_Delta(T) + 1/2 f_Delta(T) g_D(T)
/// and against
///   f(T) g_DDelta(T) + f_DDelta(T) g(T) + 1/2 f_D(T) g_Delta(conj T) + 1/2 f_Delta(conj T) g_D(T).
ProductRuleResidual product_rule_check_harmonic(const StemPolynomial& f, const StemPolynomial& g,
                                                const ParavectorOperator& t, const Contour& g1,
                                                Execution exec = Execution::parallel);

enum class ProjectorKind { D, DDelta };

/// idempotent: constants -1/(8 pi) (D) and 1/(32 pi) (DDelta), for which the
/// operators are projectors. stated: 1/(32 pi) and 1/(8 pi), which give
/// -P/4 and 4P; kept as a negative control.
enum class ProjectorNormalization { idempotent, stated };

struct ProjectorPair {
  /// c * integral over G1 of S_R(p,T) dp_I p^k.
  CliffordOperator via_g1;
  /// c * integral over G2 of s^k ds_I S_L(s,T).
  CliffordOperator via_g2;
};

/// k = 1 for D, k = 3 for DDelta. G1 and G2 must lie in the same slice, G1
/// inside G2, and both must enclose the same spheres (SpectrumNotSplit).
ProjectorPair riesz_projector(ProjectorKind kind, const ParavectorOperator& t, const Contour& g1, const Contour& g2,
                              ProjectorNormalization norm = ProjectorNormalization::idempotent,
                              Execution exec = Execution::parallel);

/// The constant c in front of the projector integral.
double projector_constant(ProjectorKind kind, ProjectorNormalization norm);

/// Circle centred at 0 of radius factor * max(rho, 1) in slice J.
Contour enclosing_contour(const ParavectorOperator& t, const UnitImaginary& j, int nodes = 256,
                          double factor = 1.5);

}  // namespace finecalc
