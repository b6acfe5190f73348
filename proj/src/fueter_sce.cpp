#include "finecalc/fueter_sce.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

namespace finecalc {

Box default_box() {
  Box b;
  b.center.x0 = 2.0;
  b.center.xv[0] = 1.0;
  b.half_width = 0.5;
  return b;
}

std::vector<double> default_steps(const Box& box) {
  const double k = box.half_width / 0.5;
  return {0.02 * k, 0.01 * k, 0.005 * k};
}

Stencil Stencil::identity() {
  Stencil s;
  s.weights[Offset{}] = Multivector(1.0);
  return s;
}

int Stencil::reach() const {
  int r = 0;
  for (const auto& [o, w] : weights) {
    for (int v : o) r = std::max(r, std::abs(v));
  }
  return r;
}

Stencil compose(const Stencil& a, const Stencil& b) {
  if (a.clifford && b.clifford && a.side != b.side) {
    throw InvalidConstruction("cannot compose left and right Clifford stencils");
  }
  Stencil c;
  c.order = a.order + b.order;
  c.clifford = a.clifford || b.clifford;
  c.side = a.clifford ? a.side : b.side;
  for (const auto& [oa, wa] : a.weights) {
    for (const auto& [ob, wb] : b.weights) {
      Offset o;
      for (int i = 0; i <= kMaxGenerators; ++i) o[i] = oa[i] + ob[i];
      // Left: a(b g) puts wa outside wb. Right: (g wb) wa.
      c.weights[o] += c.side == Side::left ? wa * wb : wb * wa;
    }
  }
  std::erase_if(c.weights, [](const auto& kv) { return kv.second == Multivector(); });
  return c;
}

Stencil dirac_stencil(bool conjugate, Side side) {
  Stencil s;
  s.order = 1;
  s.side = side;
  s.clifford = true;
  for (int axis = 0; axis <= kMaxGenerators; ++axis) {
    Multivector unit = axis == 0 ? Multivector(0.5) : 0.5 * Multivector::e(axis);
    if (conjugate && axis > 0) unit = -unit;
    Offset plus{};
    Offset minus{};
    plus[axis] = 1;
    minus[axis] = -1;
    s.weights[plus] += unit;
    s.weights[minus] -= unit;
  }
  return s;
}

Stencil laplacian_stencil(int power) {
  if (power < 1 || power > 2) throw InvalidConstruction("Laplacian power must be 1 or 2");
  Stencil s;
  s.order = 2;
  s.weights[Offset{}] = Multivector(-2.0 * (kMaxGenerators + 1));
  for (int axis = 0; axis <= kMaxGenerators; ++axis) {
    Offset plus{};
    Offset minus{};
    plus[axis] = 1;
    minus[axis] = -1;
    s.weights[plus] = Multivector(1.0);
    s.weights[minus] = Multivector(1.0);
  }
  return power == 1 ? s : compose(s, s);
}

GridFunction::GridFunction(QSampler sampler, Box box, double h, std::string provenance)
    : sampler_(std::move(sampler)),
      box_(box),
      h_(h),
      provenance_(std::move(provenance)),
      stencil_(Stencil::identity()) {
  if (!(h > 0.0)) throw InvalidConstruction("grid step must be positive");
  if (!(box.half_width > 0.0)) throw InvalidConstruction("box half-width must be positive");
  compile();
}

void GridFunction::compile() {
  auto terms = std::make_shared<std::vector<Term>>();
  for (const auto& [o, w] : stencil_.weights) {
    Term t{o, {}};
    for (int b = 0; b < kBladeCount; ++b) {
      if (w[b] != 0.0) t.blades.emplace_back(b, quad(w[b]));
    }
    terms->push_back(std::move(t));
  }
  terms_ = std::move(terms);
}

namespace {

QMultivector eval_intrinsic(const std::vector<double>& c, const QParavector& x) {
  const quad a = x.x0;
  const quad b = sqrt_of(x.vector_norm_sq());
  quad u = c.back();
  quad v = 0;
  for (int k = static_cast<int>(c.size()) - 2; k >= 0; --k) {
    const quad nu = a * u - b * v + quad(c[k]);
    v = a * v + b * u;
    u = nu;
  }
  QMultivector out(u);
  if (b != 0) {
    for (int i = 0; i < kMaxGenerators; ++i) out[vector_index(i + 1)] = v * x.xv[i] / b;
  }
  return out;
}

}  // namespace

GridFunction GridFunction::of_stem(const StemPolynomial& f, const Box& box, double h) {
  const std::string label = "stem of degree " + std::to_string(f.degree());
  if (f.intrinsic()) {
    std::vector<double> c;
    for (const auto& a : f.coefficients()) c.push_back(a.scalar());
    return GridFunction([c](const QParavector& x) { return eval_intrinsic(c, x); }, box, h, label);
  }
  return GridFunction([f](const QParavector& x) { return eval(f, x); }, box, h, label);
}

namespace {

// Conservative test that the sphere [s] misses the box in the (Re, |vec|) half-plane.
void require_box_off_sphere(const Paravector& s, const Box& box, double pad) {
  const double hw = box.half_width + pad;
  double r_min_sq = 0.0;
  for (int i = 0; i < kMaxGenerators; ++i) {
    const double gap = std::max(0.0, std::abs(box.center.xv[i]) - hw);
    r_min_sq += gap * gap;
  }
  const double r_max = box.center.vector_norm() + hw * std::sqrt(double(kMaxGenerators));
  const double x0 = s.x0;
  const double r = s.vector_norm();
  const bool re_inside = x0 >= box.center.x0 - hw && x0 <= box.center.x0 + hw;
  const bool im_inside = r >= std::sqrt(r_min_sq) && r <= r_max;
  if (re_inside && im_inside) throw OnSpectrumSphere("the sphere [s] meets the sample box");
}

}  // namespace

GridFunction GridFunction::of_kernel(const Paravector& s, Side side, const Box& box, double h) {
  require_box_off_sphere(s, box, 0.0);
  const QParavector sq = QParavector::cast(s);
  if (side == Side::left) {
    return GridFunction([sq](const QParavector& x) { return kernel_left_closed(sq, x); }, box, h, "S_L^-1(s, x)");
  }
  return GridFunction([sq](const QParavector& x) { return kernel_right_closed(sq, x); }, box, h, "S_R^-1(s, x)");
}

GridFunction GridFunction::with_stencil(Stencil st, std::string provenance) const {
  GridFunction g = *this;
  g.stencil_ = std::move(st);
  g.provenance_ = std::move(provenance);
  g.compile();
  return g;
}

GridFunction GridFunction::with_step(double h) const {
  if (!(h > 0.0)) throw InvalidConstruction("grid step must be positive");
  GridFunction g = *this;
  g.h_ = h;
  return g;
}

QMultivector GridFunction::sample(const Paravector& x) const { return sampler_(QParavector::cast(x)); }

QMultivector GridFunction::at_exact(const Paravector& x) const {
  const QParavector base = QParavector::cast(x);
  const quad h = h_;
  const bool left = stencil_.side == Side::left;
  QMultivector acc;
  for (const Term& t : *terms_) {
    QParavector y = base;
    y.x0 += h * t.offset[0];
    for (int i = 0; i < kMaxGenerators; ++i) y.xv[i] += h * t.offset[i + 1];
    const QMultivector v = sampler_(y);
    for (int j = 0; j < kBladeCount; ++j) {
      if (v[j] == 0) continue;
      for (const auto& [b, c] : t.blades) {
        // Weights are combinations of single blades: e_b v or v e_b.
        const int row = left ? b * kBladeCount + j : j * kBladeCount + b;
        const quad term = c * v[j];
        if (kBlades.product_sign[row] > 0) {
          acc[kBlades.product_index[row]] += term;
        } else {
          acc[kBlades.product_index[row]] -= term;
        }
      }
    }
  }
  quad scale = 1;
  for (int k = 0; k < stencil_.order; ++k) scale /= h;
  return scale * acc;
}

Multivector GridFunction::at(const Paravector& x) const { return Multivector::cast(at_exact(x)); }

std::vector<Paravector> GridFunction::probes(int count, std::uint64_t seed) const {
  const double inner = box_.half_width - stencil_.reach() * h_;
  if (!(inner > 0.0)) throw GridTooSmall("stencil reach leaves no interior in the box");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-inner, inner);
  std::vector<Paravector> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Paravector x = box_.center;
    x.x0 += u(rng);
    for (auto& v : x.xv) v += u(rng);
    out.push_back(x);
  }
  return out;
}

namespace {

GridFunction extend(const GridFunction& g, const Stencil& outer, const std::string& label) {
  Stencil st = compose(outer, g.stencil());
  // One cell of margin per application, and the composed reach must fit.
  if (st.reach() * g.h() >= g.box().half_width) {
    throw GridTooSmall("box half-width " + std::to_string(g.box().half_width) + " too small for reach " +
                       std::to_string(st.reach()) + " at h = " + std::to_string(g.h()));
  }
  return g.with_stencil(std::move(st), label + "(" + g.provenance() + ")");
}

}  // namespace

GridFunction apply_dirac(const GridFunction& g, bool conjugate, Side side) {
  return extend(g, dirac_stencil(conjugate, side), conjugate ? "Dbar" : "D");
}

GridFunction apply_laplacian(const GridFunction& g, int power) {
  return extend(g, laplacian_stencil(power), power == 1 ? "Delta" : "Delta^2");
}

double ResidualCurve::min_order() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    if (std::isfinite(p.order_estimate)) m = std::min(m, p.order_estimate);
  }
  return m;
}

namespace {

// Evaluates fn(probe index) for every probe; serial and parallel agree bitwise.
template <class T, class Fn>
std::vector<T> per_probe(int count, Execution exec, Fn fn) {
  std::vector<T> out(count);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (int i = 0; i < count; ++i) {
    try {
      out[i] = fn(i);
    } catch (...) {
#pragma omp critical(finecalc_probe_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

// errors[k][i]: error multivector at step k, probe i; weights[i]: normaliser.
ResidualCurve build_curve(std::string identity, const std::vector<double>& steps,
                          const std::vector<std::vector<Multivector>>& errors, const std::vector<double>& weights) {
  ResidualCurve c;
  c.identity = std::move(identity);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    double worst = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) worst = std::max(worst, errors[k][i].norm() / weights[i]);
    CurvePoint p{steps[k], worst, std::numeric_limits<double>::quiet_NaN()};
    if (k > 0 && worst > kExactnessFloor && c.points.back().max_residual > kExactnessFloor) {
      p.order_estimate = std::log(c.points.back().max_residual / worst) / std::log(steps[k - 1] / steps[k]);
    }
    c.points.push_back(p);
  }
  c.exact = std::all_of(c.points.begin(), c.points.end(),
                        [](const CurvePoint& p) { return p.max_residual <= kExactnessFloor; });
  c.fitted_order = std::numeric_limits<double>::quiet_NaN();
  const bool all_above = std::all_of(c.points.begin(), c.points.end(),
                                     [](const CurvePoint& p) { return p.max_residual > kExactnessFloor; });
  if (steps.size() >= 2 && all_above) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(steps.size());
    for (const auto& p : c.points) {
      const double x = std::log(p.h);
      const double y = std::log(p.max_residual);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    c.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  if (steps.size() >= 2) {
    const std::size_t a = steps.size() - 2;
    const std::size_t b = steps.size() - 1;
    const double r2 = (steps[a] / steps[b]) * (steps[a] / steps[b]);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const Multivector ex = (1.0 / (r2 - 1.0)) * (r2 * errors[b][i] - errors[a][i]);
      c.extrapolated = std::max(c.extrapolated, ex.norm() / weights[i]);
    }
  }
  return c;
}

enum class KernelIdentity { D, DDelta };

ResidualCurve kernel_curve(KernelIdentity which, const Paravector& s, const KernelCheckOptions& opt) {
  const std::vector<double> steps = opt.steps.empty() ? default_steps(opt.box) : opt.steps;
  if (steps.empty()) throw InvalidConstruction("no steps");
  const double coarsest = *std::max_element(steps.begin(), steps.end());
  const int reach = which == KernelIdentity::D ? 1 : 2;
  require_box_off_sphere(s, opt.box, reach * coarsest);
  const double c = opt.constant.value_or(which == KernelIdentity::D ? -4.0 : 16.0);

  auto build = [&](double h) {
    GridFunction g = GridFunction::of_kernel(s, opt.side, opt.box, h);
    if (which == KernelIdentity::DDelta) g = apply_laplacian(g, 1);
    return apply_dirac(g, false, opt.side);
  };
  const std::vector<Paravector> pts = build(coarsest).probes(opt.probes, opt.seed);
  const int count = static_cast<int>(pts.size());

  // Q_{c,s}^{-1}(x) through the general inverse, as the reference target.
  const std::vector<Multivector> q_inv = per_probe<Multivector>(count, opt.exec, [&](int i) {
    return mv_inverse(pseudo_q(s, pts[i]).mv());
  });
  std::vector<Multivector> target(count);
  std::vector<double> weight(count);
  for (int i = 0; i < count; ++i) {
    target[i] = which == KernelIdentity::D ? c * q_inv[i] : c * (q_inv[i] * q_inv[i]);
    weight[i] = which == KernelIdentity::D ? q_inv[i].norm() : (q_inv[i] * q_inv[i]).norm();
  }

  std::vector<std::vector<Multivector>> errors;
  for (double h : steps) {
    const GridFunction dg = build(h);
    errors.push_back(per_probe<Multivector>(count, opt.exec, [&](int i) { return dg.at(pts[i]) - target[i]; }));
  }
  std::string name = which == KernelIdentity::D ? "D S^-1 - (" : "D Delta S^-1 - (";
  name += std::to_string(static_cast<int>(c)) + (which == KernelIdentity::D ? ") Q^-1" : ") Q^-2");
  name += opt.side == Side::left ? " [left]" : " [right]";
  return build_curve(name, steps, errors, weight);
}

}  // namespace

ResidualCurve check_kernel_identity_D(const Paravector& s, const KernelCheckOptions& opt) {
  return kernel_curve(KernelIdentity::D, s, opt);
}

ResidualCurve check_kernel_identity_DDelta(const Paravector& s, const KernelCheckOptions& opt) {
  return kernel_curve(KernelIdentity::DDelta, s, opt);
}

ChainReport check_fine_structure_chain(const StemPolynomial& f, const ChainOptions& opt) {
  const std::vector<double> steps = opt.steps.empty() ? default_steps(opt.box) : opt.steps;
  if (steps.empty()) throw InvalidConstruction("no steps");
  const double coarsest = *std::max_element(steps.begin(), steps.end());

  using Chain = GridFunction (*)(const GridFunction&);
  struct Link {
    const char* name;
    Chain build;
  };
  const Link links[] = {
      {"D Delta^2 f", [](const GridFunction& g) { return apply_dirac(apply_laplacian(g, 2), false); }},
      {"Delta (D Delta f)",
       [](const GridFunction& g) { return apply_laplacian(apply_dirac(apply_laplacian(g, 1), false), 1); }},
      {"Delta^2 (D f)", [](const GridFunction& g) { return apply_laplacian(apply_dirac(g, false), 2); }},
      {"D (Delta^2 f)", [](const GridFunction& g) { return apply_dirac(apply_laplacian(g, 2), false); }},
  };

  const GridFunction base = GridFunction::of_stem(f, opt.box, coarsest);
  const std::vector<Paravector> pts = links[0].build(base).probes(opt.probes, opt.seed);
  const int count = static_cast<int>(pts.size());
  double f_scale = 1.0;
  for (const auto& x : pts) f_scale = std::max(f_scale, static_cast<double>(base.sample(x).norm()));
  const std::vector<double> weight(count, f_scale);

  ChainReport report;
  report.stem = "degree " + std::to_string(f.degree());
  // Constant-coefficient stencils commute, so several links may compose to
  // the same stencil; their values are then computed once.
  std::vector<std::pair<Stencil, std::vector<std::vector<Multivector>>>> seen;
  for (const auto& link : links) {
    const Stencil st = link.build(base).stencil();
    auto hit = std::find_if(seen.begin(), seen.end(), [&](const auto& e) { return e.first == st; });
    if (hit == seen.end()) {
      std::vector<std::vector<Multivector>> values;
      for (double h : steps) {
        const GridFunction g = link.build(base.with_step(h));
        values.push_back(per_probe<Multivector>(count, opt.exec, [&](int i) { return g.at(pts[i]); }));
      }
      seen.emplace_back(st, std::move(values));
      hit = std::prev(seen.end());
    }
    report.curves.push_back(build_curve(link.name, steps, hit->second, weight));
  }
  return report;
}

ResidualCurve check_dirac_factorization(const StemPolynomial& f, const ChainOptions& opt) {
  const std::vector<double> steps = opt.steps.empty() ? default_steps(opt.box) : opt.steps;
  if (steps.empty()) throw InvalidConstruction("no steps");
  const double coarsest = *std::max_element(steps.begin(), steps.end());
  auto dd = [](const GridFunction& g) { return apply_dirac(apply_dirac(g, true), false); };

  const GridFunction base = GridFunction::of_stem(f, opt.box, coarsest);
  const std::vector<Paravector> pts = dd(base).probes(opt.probes, opt.seed);
  const int count = static_cast<int>(pts.size());
  double f_scale = 1.0;
  for (const auto& x : pts) f_scale = std::max(f_scale, static_cast<double>(base.sample(x).norm()));

  std::vector<std::vector<Multivector>> errors;
  for (double h : steps) {
    const GridFunction a = dd(base.with_step(h));
    const GridFunction b = apply_laplacian(base.with_step(h), 1);
    errors.push_back(per_probe<Multivector>(count, opt.exec, [&](int i) {
      return Multivector::cast(QMultivector(a.at_exact(pts[i]) - b.at_exact(pts[i])));
    }));
  }
  return build_curve("D Dbar f - Delta f", steps, errors, std::vector<double>(count, f_scale));
}

AxialityResult check_axiality(const GridFunction& g, int probes, std::uint64_t seed) {
  const Box& box = g.box();
  const double pad = g.stencil().reach() * g.h();
  double r_lo_sq = 0.0;
  for (int i = 0; i < kMaxGenerators; ++i) {
    const double gap = std::max(0.0, std::abs(box.center.xv[i]) - box.half_width);
    r_lo_sq += gap * gap;
  }
  const double r_lo = std::sqrt(r_lo_sq);
  if (r_lo < std::max(0.05, pad)) throw AxisTooClose("box comes too close to the real axis");
  const double r_hi = box.center.vector_norm() + box.half_width;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(box.center.x0 - box.half_width + pad, box.center.x0 + box.half_width - pad);
  std::uniform_real_distribution<double> ur(r_lo, r_hi);
  AxialityResult res;
  for (int k = 0; k < probes; ++k) {
    const double x0 = ux(rng);
    const double r = ur(rng);
    const UnitImaginary w1 = UnitImaginary::random(rng);
    const UnitImaginary w2 = UnitImaginary::random(rng);
    const UnitImaginary w3 = UnitImaginary::random(rng);
    const QMultivector f1 = g.at_exact(w1.point(x0, r));
    const QMultivector f2 = g.at_exact(w2.point(x0, r));
    const QMultivector f3 = g.at_exact(w3.point(x0, r));
    // omega1 - omega2 is a 1-vector v, and v^{-1} = -v / |v|^2.
    const QMultivector o1 = QMultivector::cast(w1.mv());
    const QMultivector o2 = QMultivector::cast(w2.mv());
    const QMultivector o3 = QMultivector::cast(w3.mv());
    const QMultivector v = o1 - o2;
    const quad v2 = -(v * v).scalar();
    const QMultivector b = (quad(-1) / v2) * (v * (f1 - f2));
    const QMultivector a = f1 - o1 * b;
    const double dev = static_cast<double>((f3 - a - o3 * b).norm());
    res.max_deviation = std::max(res.max_deviation, dev);
    res.scale = std::max({res.scale, static_cast<double>(f1.norm()), static_cast<double>(f3.norm())});
  }
  return res;
}

void write_curves_csv(std::ostream& out, const std::vector<ResidualCurve>& curves) {
  const auto old = out.precision(17);
  out << "h,identity,max_residual,order_estimate\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out << p.h << ",\"" << c.identity << "\"," << p.max_residual << ",";
      if (std::isfinite(p.order_estimate)) out << p.order_estimate;
      out << "\n";
    }
  }
  out.precision(old);
}

}  // namespace finecalc
