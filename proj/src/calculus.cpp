#include "finecalc/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <string>

namespace finecalc {

std::string_view calculus_name(CalculusKind kind) {
  switch (kind) {
    case CalculusKind::S: return "S";
    case CalculusKind::D: return "D";
    case CalculusKind::Delta: return "Delta";
    case CalculusKind::DDelta: return "DDelta";
  }
  return "?";
}

namespace {

void require_clear_of_spectrum(const Contour& contour, const ParavectorOperator& t) {
  for (const auto& sphere : s_spectrum(t)) {
    if (contour.node_distance(sphere.center, sphere.radius) < 0.1 * contour.radius()) {
      throw ContourTouchesSpectrum("a node is closer than 0.1 R to a spectral sphere");
    }
  }
}

// Q_{c,s}(T)^{-1} at every node of a contour. Q_{c,s} depends on T only
// through T + conj T and T conj T, so T and conj T share the table.
class NodeInverses {
 public:
  NodeInverses(const Contour& contour, const ParavectorOperator& t, Execution exec)
      : inv_(contour.nodes(), CliffordOperator(t.rank())) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
    for (int k = 0; k < contour.nodes(); ++k) {
      try {
        inv_[k] = op_inverse(pseudo_q_operator(contour.node(k), t));
      } catch (...) {
#pragma omp critical(finecalc_node_inverse_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  const CliffordOperator& operator[](int k) const { return inv_[k]; }

 private:
  std::vector<CliffordOperator> inv_;
};

// Resolvent of the requested kind and side at one node.
class NodeKernel {
 public:
  NodeKernel(CalculusKind kind, Side side, const ParavectorOperator& t, const NodeInverses& q_inv)
      : kind_(kind), side_(side), rank_(t.rank()), tbar_(conj_operator(t).clifford()), q_inv_(q_inv) {}

  CliffordOperator operator()(int k, const Paravector& s) const {
    const CliffordOperator& q_inv = q_inv_[k];
    switch (kind_) {
      case CalculusKind::S: return s_resolvent(s, q_inv);
      case CalculusKind::D: return -4.0 * q_inv;
      case CalculusKind::Delta:
        return side_ == Side::left ? -8.0 * (s_resolvent(s, q_inv) * q_inv)
                                   : -8.0 * (q_inv * s_resolvent(s, q_inv));
      case CalculusKind::DDelta: return 16.0 * (q_inv * q_inv);
    }
    return q_inv;
  }

 private:
  CliffordOperator s_resolvent(const Paravector& s, const CliffordOperator& q_inv) const {
    const CliffordOperator shifted = s * CliffordOperator::identity(rank_) - tbar_;
    return side_ == Side::left ? shifted * q_inv : q_inv * shifted;
  }

  CalculusKind kind_;
  Side side_;
  int rank_;
  CliffordOperator tbar_;
  const NodeInverses& q_inv_;
};

// Sum over nodes of kernel(s_k) w_k g_k (left) or g_k w_k kernel(s_k) (right),
// where g_k is produced by the caller, divided by 2 pi.
template <class ScalarAt>
CliffordOperator integrate(const NodeKernel& kernel, Side side, const Contour& contour, int rank,
                           ScalarAt scalar_at, Execution exec) {
  const int n = contour.nodes();
  std::vector<CliffordOperator> terms(n, CliffordOperator(rank));
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (int k = 0; k < n; ++k) {
    try {
      const Paravector s = contour.node(k);
      const Multivector w = contour.weight(k).mv();
      const Multivector g = scalar_at(s);
      terms[k] = side == Side::left ? kernel(k, s) * (w * g) : (g * w) * kernel(k, s);
    } catch (...) {
#pragma omp critical(finecalc_integrate_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  CliffordOperator sum(rank);
  for (const auto& term : terms) sum += term;
  return sum *= 0.5 / std::numbers::pi;
}

CliffordOperator apply_with(CalculusKind kind, const StemPolynomial& f, const ParavectorOperator& t,
                            const Contour& contour, const NodeInverses& q_inv, Execution exec) {
  const NodeKernel kernel(kind, Side::left, t, q_inv);
  return integrate(kernel, Side::left, contour, t.rank(), [&](const Paravector& s) { return eval(f, s); }, exec);
}

}  // namespace

void require_admissible(const Contour& contour, const ParavectorOperator& t) {
  for (const auto& sphere : s_spectrum(t)) {
    if (!contour.encloses(sphere.center, sphere.radius)) {
      throw ContourTouchesSpectrum("contour does not enclose the sphere centred at " +
                                   std::to_string(sphere.center) + " of radius " + std::to_string(sphere.radius));
    }
  }
  require_clear_of_spectrum(contour, t);
}

CliffordOperator apply(CalculusKind kind, const StemPolynomial& f, const ParavectorOperator& t,
                       const Contour& contour, Side form, Execution exec) {
  if (form != f.side()) throw SideMismatch("function side does not match the requested calculus form");
  require_admissible(contour, t);
  const NodeInverses q_inv(contour, t, exec);
  const NodeKernel kernel(kind, form, t, q_inv);
  return integrate(kernel, form, contour, t.rank(), [&](const Paravector& s) { return eval(f, s); }, exec);
}

AdaptiveResult apply_adaptive(CalculusKind kind, const StemPolynomial& f, const ParavectorOperator& t,
                              const Contour& contour, Side form, Execution exec) {
  int n = std::max(contour.nodes(), 256);
  AdaptiveResult r{apply(kind, f, t, contour.with_nodes(n), form, exec), n, false};
  while (n < 4096) {
    n *= 2;
    CliffordOperator next = apply(kind, f, t, contour.with_nodes(n), form, exec);
    const double change = (next - r.value).norm() / std::max(next.norm(), 1.0);
    r.value = std::move(next);
    r.nodes = n;
    if (change < 1e-10) {
      r.converged = true;
      break;
    }
  }
  return r;
}

namespace {

RuleResidual rule_residual(const CliffordOperator& lhs, const CliffordOperator& rhs) {
  RuleResidual r;
  r.residual = (lhs - rhs).norm();
  r.scale = std::max({lhs.norm(), rhs.norm(), 1.0});
  return r;
}

}  // namespace

ProductRuleResidual product_rule_check_biharmonic(const StemPolynomial& f, const StemPolynomial& g,
                                                  const ParavectorOperator& t, const Contour& g1, Execution exec) {
  if (!f.intrinsic()) throw NotIntrinsic("product rules need an intrinsic f");
  const Contour g2 = g1.with_radius(1.5 * g1.radius());
  const ParavectorOperator tbar = conj_operator(t);
  const StemPolynomial fg = product(f, g);
  require_admissible(g1, t);
  require_admissible(g2, t);
  const NodeInverses q1(g1, t, exec);
  const NodeInverses q2(g2, t, exec);
  auto f_at = [&](CalculusKind k, const ParavectorOperator& op) { return apply_with(k, f, op, g2, q2, exec); };
  auto g_at = [&](CalculusKind k, const ParavectorOperator& op) { return apply_with(k, g, op, g1, q1, exec); };

  const CliffordOperator fg_d = apply_with(CalculusKind::D, fg, t, g1, q1, exec);
  const CliffordOperator f_d = f_at(CalculusKind::D, t);
  const CliffordOperator f_t = f_at(CalculusKind::S, t);
  const CliffordOperator f_tbar = f_at(CalculusKind::S, tbar);
  const CliffordOperator g_t = g_at(CalculusKind::S, t);
  const CliffordOperator g_tbar = g_at(CalculusKind::S, tbar);
  const CliffordOperator g_d = g_at(CalculusKind::D, t);

  ProductRuleResidual r;
  r.first = rule_residual(fg_d, f_d * g_t + f_tbar * g_d);
  r.second = rule_residual(fg_d, f_d * g_tbar + f_t * g_d);
  return r;
}

ProductRuleResidual product_rule_check_harmonic(const StemPolynomial& f, const StemPolynomial& g,
                                                const ParavectorOperator& t, const Contour& g1, Execution exec) {
  if (!f.intrinsic()) throw NotIntrinsic("product rules need an intrinsic f");
  const Contour g2 = g1.with_radius(1.5 * g1.radius());
  const ParavectorOperator tbar = conj_operator(t);
  const StemPolynomial fg = product(f, g);
  require_admissible(g1, t);
  require_admissible(g2, t);
  const NodeInverses q1(g1, t, exec);
  const NodeInverses q2(g2, t, exec);
  auto f_at = [&](CalculusKind k, const ParavectorOperator& op) { return apply_with(k, f, op, g2, q2, exec); };
  auto g_at = [&](CalculusKind k, const ParavectorOperator& op) { return apply_with(k, g, op, g1, q1, exec); };

  const CliffordOperator fg_dd = apply_with(CalculusKind::DDelta, fg, t, g1, q1, exec);
  const CliffordOperator f_t = f_at(CalculusKind::S, t);
  const CliffordOperator f_tbar = f_at(CalculusKind::S, tbar);
  const CliffordOperator f_d = f_at(CalculusKind::D, t);
  const CliffordOperator f_delta = f_at(CalculusKind::Delta, t);
  const CliffordOperator f_delta_bar = f_at(CalculusKind::Delta, tbar);
  const CliffordOperator f_dd = f_at(CalculusKind::DDelta, t);
  const CliffordOperator g_t = g_at(CalculusKind::S, t);
  const CliffordOperator g_tbar = g_at(CalculusKind::S, tbar);
  const CliffordOperator g_d = g_at(CalculusKind::D, t);
  const CliffordOperator g_delta = g_at(CalculusKind::Delta, t);
  const CliffordOperator g_delta_bar = g_at(CalculusKind::Delta, tbar);
  const CliffordOperator g_dd = g_at(CalculusKind::DDelta, t);

  CliffordOperator one = f_tbar * g_dd + f_dd * g_tbar;
  one += 0.5 * (f_d * g_delta);
  one += 0.5 * (f_delta * g_d);
  CliffordOperator two = f_t * g_dd + f_dd * g_t;
  two += 0.5 * (f_d * g_delta_bar);
  two += 0.5 * (f_delta_bar * g_d);

  ProductRuleResidual r;
  r.first = rule_residual(fg_dd, one);
  r.second = rule_residual(fg_dd, two);
  return r;
}

double projector_constant(ProjectorKind kind, ProjectorNormalization norm) {
  const double pi = std::numbers::pi;
  if (norm == ProjectorNormalization::stated) return kind == ProjectorKind::D ? 1.0 / (32.0 * pi) : 1.0 / (8.0 * pi);
  return kind == ProjectorKind::D ? -1.0 / (8.0 * pi) : 1.0 / (32.0 * pi);
}

namespace {

bool same_slice(const UnitImaginary& a, const UnitImaginary& b) {
  double dot = 0.0;
  for (int i = 0; i < kMaxGenerators; ++i) dot += a.direction()[i] * b.direction()[i];
  return std::abs(std::abs(dot) - 1.0) < 1e-12;
}

}  // namespace

ProjectorPair riesz_projector(ProjectorKind kind, const ParavectorOperator& t, const Contour& g1, const Contour& g2,
                              ProjectorNormalization norm, Execution exec) {
  if (!same_slice(g1.imaginary(), g2.imaginary())) {
    throw InvalidConstruction("G1 and G2 must lie in the same slice");
  }
  if (std::abs(g1.center() - g2.center()) + g1.radius() >= g2.radius()) {
    throw InvalidConstruction("the closure of G1 must lie inside G2");
  }
  for (const auto& sphere : s_spectrum(t)) {
    if (g1.encloses(sphere.center, sphere.radius) != g2.encloses(sphere.center, sphere.radius)) {
      throw SpectrumNotSplit("a spectral sphere lies between G1 and G2");
    }
  }
  require_clear_of_spectrum(g1, t);
  require_clear_of_spectrum(g2, t);

  const CalculusKind calc = kind == ProjectorKind::D ? CalculusKind::D : CalculusKind::DDelta;
  const int power = kind == ProjectorKind::D ? 1 : 3;
  // The integrals carry no 1/(2 pi); integrate() divides by it, so scale back.
  const double c = projector_constant(kind, norm) * 2.0 * std::numbers::pi;
  auto monomial = [power](const Paravector& s) {
    Multivector m(1.0);
    for (int k = 0; k < power; ++k) m = m * s.mv();
    return m;
  };

  ProjectorPair out{CliffordOperator(t.rank()), CliffordOperator(t.rank())};
  const NodeInverses q1(g1, t, exec);
  const NodeInverses q2(g2, t, exec);
  out.via_g1 = c * integrate(NodeKernel(calc, Side::right, t, q1), Side::left, g1, t.rank(), monomial, exec);
  out.via_g2 = c * integrate(NodeKernel(calc, Side::left, t, q2), Side::right, g2, t.rank(), monomial, exec);
  return out;
}

Contour enclosing_contour(const ParavectorOperator& t, const UnitImaginary& j, int nodes, double factor) {
  return Contour(0.0, factor * std::max(t.spectral_radius(), 1.0), j, nodes);
}

}  // namespace finecalc
