#include "finecalc/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <map>

#include "finecalc/digest.hpp"
#include "finecalc/slice.hpp"

namespace finecalc {

std::string_view resolvent_name(ResolventTag tag) {
  switch (tag) {
    case ResolventTag::PseudoQ: return "PseudoQ";
    case ResolventTag::SLeft: return "SLeft";
    case ResolventTag::SRight: return "SRight";
    case ResolventTag::DLeft: return "DLeft";
    case ResolventTag::DRight: return "DRight";
    case ResolventTag::DeltaLeft: return "DeltaLeft";
    case ResolventTag::DeltaRight: return "DeltaRight";
    case ResolventTag::FLeft: return "FLeft";
    case ResolventTag::FRight: return "FRight";
    case ResolventTag::DDeltaLeft: return "DDeltaLeft";
    case ResolventTag::DDeltaRight: return "DDeltaRight";
  }
  return "?";
}

bool on_spectrum(const ParavectorOperator& t, const Paravector& s) {
  return spectrum_distance(t, s) < 1e-9 * (1.0 + s.modulus());
}

namespace {

CliffordOperator checked_q_inverse(const Paravector& s, const ParavectorOperator& t) {
  if (on_spectrum(t, s)) throw OnSpectrum("s lies on the S-spectrum of T");
  return op_inverse(pseudo_q_operator(s, t));
}

}  // namespace

ResolventFamily::ResolventFamily(const Paravector& s_, const ParavectorOperator& t)
    : s(s_),
      q_inv(checked_q_inverse(s_, t)),
      q_inv2(q_inv * q_inv),
      s_left((s_ * CliffordOperator::identity(t.rank()) - conj_operator(t).clifford()) * q_inv),
      s_right(q_inv * (s_ * CliffordOperator::identity(t.rank()) - conj_operator(t).clifford())),
      d(-4.0 * q_inv),
      delta_left(-8.0 * (s_left * q_inv)),
      delta_right(-8.0 * (q_inv * s_right)),
      f_left(64.0 * (s_left * q_inv2)),
      f_right(64.0 * (q_inv2 * s_right)),
      ddelta(16.0 * q_inv2) {}

const CliffordOperator& ResolventFamily::get(ResolventTag tag) const {
  switch (tag) {
    case ResolventTag::PseudoQ: return q_inv;
    case ResolventTag::SLeft: return s_left;
    case ResolventTag::SRight: return s_right;
    case ResolventTag::DLeft:
    case ResolventTag::DRight: return d;
    case ResolventTag::DeltaLeft: return delta_left;
    case ResolventTag::DeltaRight: return delta_right;
    case ResolventTag::FLeft: return f_left;
    case ResolventTag::FRight: return f_right;
    case ResolventTag::DDeltaLeft:
    case ResolventTag::DDeltaRight: return ddelta;
  }
  return q_inv;
}

CliffordOperator resolvent(const ResolventKind& kind, const Paravector& s, const ParavectorOperator& t) {
  if (kind.tag == ResolventTag::PseudoQ) {
    if (kind.power < 1) throw InvalidConstruction("PseudoQ power must be at least 1");
    const CliffordOperator q = checked_q_inverse(s, t);
    CliffordOperator r = q;
    for (int k = 1; k < kind.power; ++k) r = r * q;
    return r;
  }
  return ResolventFamily(s, t).get(kind.tag);
}

const std::vector<IdentityInfo>& identity_catalog() {
  static const std::vector<IdentityInfo> catalog = {
      {IdentityId::LEFT_S_EQ, "LEFT_S_EQ", "left S-resolvent equation", Arity::s_only},
      {IdentityId::RIGHT_S_EQ, "RIGHT_S_EQ", "right S-resolvent equation", Arity::s_only},
      {IdentityId::GEN_S_RES, "GEN_S_RES", "generalized S-resolvent equation", Arity::s_p_and_b},
      {IdentityId::DELTA_LEFT_EQ, "DELTA_LEFT_EQ", "left Delta-resolvent equation", Arity::s_only},
      {IdentityId::DELTA_RIGHT_EQ, "DELTA_RIGHT_EQ", "right Delta-resolvent equation", Arity::s_only},
      {IdentityId::QPOLY_COMMUTE, "QPOLY_COMMUTE", "Q_s(p)^-1 commutes with Q_{c,p}^-m(T), m = 1, 2",
       Arity::s_and_p},
      {IdentityId::DSTEP3, "DSTEP3", "S_R(s,T) Q_{c,p}^-1(T) expansion", Arity::s_and_p},
      {IdentityId::DSTEP6, "DSTEP6", "Q_{c,s}^-1(T) S_L(p,T) expansion", Arity::s_and_p},
      {IdentityId::DSTEP8, "DSTEP8", "Q_{c,s}^-1(T) T Q_{c,p}^-1(T) expansion", Arity::s_and_p},
      {IdentityId::DSTEP81, "DSTEP81", "Q_{c,s}^-1(T) conj(T) Q_{c,p}^-1(T) expansion", Arity::s_and_p},
      {IdentityId::PRERES, "PRERES", "pre-resolvent equation for the biharmonic calculus", Arity::s_and_p},
      {IdentityId::BIHARM_RES, "BIHARM_RES", "resolvent equation for the biharmonic calculus", Arity::s_and_p},
      {IdentityId::F_LEFT_EQ, "F_LEFT_EQ", "left F-resolvent equation", Arity::s_only},
      {IdentityId::F_RIGHT_EQ, "F_RIGHT_EQ", "right F-resolvent equation", Arity::s_only},
      {IdentityId::HARM_C3, "HARM_C3", "S_R Q_{c,p}^-2 + Q_{c,s}^-2 S_L expansion", Arity::s_and_p},
      {IdentityId::HARM_C10, "HARM_C10", "pre-resolvent equation for the harmonic calculus", Arity::s_and_p},
      {IdentityId::HARM_RES_A, "HARM_RES_A", "resolvent equation for the harmonic calculus, first form",
       Arity::s_and_p},
      {IdentityId::HARM_RES_B, "HARM_RES_B", "resolvent equation for the harmonic calculus, second form",
       Arity::s_and_p},
  };
  return catalog;
}

const IdentityInfo& identity_info(IdentityId id) { return identity_catalog().at(static_cast<std::size_t>(id)); }

std::optional<IdentityId> identity_from_name(std::string_view name) {
  for (const auto& info : identity_catalog()) {
    if (info.name == name) return info.id;
  }
  return std::nullopt;
}

std::string_view arity_name(Arity a) {
  switch (a) {
    case Arity::s_only: return "s";
    case Arity::s_and_p: return "s,p";
    case Arity::s_p_and_b: return "s,p,B";
  }
  return "?";
}

std::string inputs_digest(const ParavectorOperator& t, const Paravector& s, const Paravector& p,
                          const std::optional<CliffordOperator>& b) {
  Digest h;
  for (int c = 0; c <= kMaxGenerators; ++c) {
    const auto& m = t.component(c);
    h.add(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  }
  h.add(s);
  h.add(p);
  if (b) {
    for (int i = 0; i < b->rank(); ++i) {
      for (int j = 0; j < b->rank(); ++j) h.add((*b)(i, j));
    }
  }
  return h.hex();
}

namespace {

Multivector central_unit(int n) {
  // The pseudoscalar of R_n is central exactly when n is odd.
  if (n % 2 == 0) return Multivector();
  return Multivector::from_mask(static_cast<BladeMask>((1u << n) - 1u));
}

IdentityResidual make_residual(IdentityId id, const CliffordOperator& lhs, const CliffordOperator& rhs) {
  IdentityResidual r;
  r.id = id;
  r.residual = (lhs - rhs).norm();
  r.scale = std::max({lhs.norm(), rhs.norm(), 1.0});
  return r;
}

bool commutes(const CliffordOperator& a, const CliffordOperator& b) {
  const double gap = (a * b - b * a).norm();
  return gap <= 1e-10 * (a.norm() * b.norm() + 1.0);
}

}  // namespace

CliffordOperator make_commuting_b(const ParavectorOperator& t, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int d = t.rank();
  const Multivector omega = central_unit(t.algebra_dim());
  const CliffordOperator& op = t.clifford();
  CliffordOperator power = CliffordOperator::identity(d);
  CliffordOperator b(d);
  for (int k = 0; k <= 2; ++k) {
    const double re = u(rng);
    const double im = u(rng);
    const Multivector c = Multivector(re) + im * omega;
    b += c * power;
    power = power * op;
  }
  for (int i = 1; i <= t.algebra_dim(); ++i) b += u(rng) * CliffordOperator::from_real(t.component(i));
  return b;
}

namespace {

CliffordOperator noncommuting_b(const ParavectorOperator& t) {
  const int d = t.rank();
  Eigen::MatrixXd shift = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) shift(i, i + 1) = 1.0;
  return CliffordOperator::from_real(shift) + Multivector::from_mask(0b011) * CliffordOperator::identity(d);
}

// Everything a check needs at (s, p); the conj(T) families are built on demand.
class Workspace {
 public:
  Workspace(const ParavectorOperator& t, const Paravector& s, const Paravector& p, bool two_point)
      : t_(t), tbar_(conj_operator(t)), s_(s), p_(p), fs_(s, t) {
    if (two_point) {
      fp_.emplace(p, t);
      qsp_inv_ = q_poly_inv(s, p);
    }
  }

  const CliffordOperator& T() const { return t_.clifford(); }
  const CliffordOperator& Tbar() const { return tbar_.clifford(); }
  const ResolventFamily& at_s() const { return fs_; }
  const ResolventFamily& at_p() const { return *fp_; }
  const ResolventFamily& at_s_bar() {
    if (!fsb_) fsb_.emplace(s_, tbar_);
    return *fsb_;
  }
  const ResolventFamily& at_p_bar() {
    if (!fpb_) fpb_.emplace(p_, tbar_);
    return *fpb_;
  }

  /// [X p - conj(s) X] Q_s^{-1}(p)
  CliffordOperator bracket(const CliffordOperator& x) const {
    return (x * p_ - s_.conj() * x) * qsp_inv_;
  }

 private:
  const ParavectorOperator& t_;
  ParavectorOperator tbar_;
  Paravector s_;
  Paravector p_;
  ResolventFamily fs_;
  std::optional<ResolventFamily> fp_;
  std::optional<ResolventFamily> fsb_;
  std::optional<ResolventFamily> fpb_;
  Multivector qsp_inv_;
};

}  // namespace

IdentityResidual check_identity(IdentityId id, const ParavectorOperator& t, const Paravector& s,
                                const Paravector& p, const std::optional<CliffordOperator>& b_in,
                                Control control) {
  const Arity arity = identity_info(id).arity;
  const bool two_point = arity != Arity::s_only;
  if (on_spectrum(t, s)) throw OnSpectrum("s lies on the S-spectrum of T");
  if (two_point) {
    if (on_spectrum(t, p)) throw OnSpectrum("p lies on the S-spectrum of T");
    if (on_sphere(s, p)) throw SphereCollision("s lies in [p]");
  }

  const int d = t.rank();
  const CliffordOperator I = CliffordOperator::identity(d);
  std::optional<CliffordOperator> b;
  if (id == IdentityId::GEN_S_RES) {
    if (control == Control::noncommuting_b) {
      b = noncommuting_b(t);
    } else {
      b = b_in.value_or(I);
      if (b->rank() != d) throw RankMismatch("B and T have different ranks");
      if (!commutes(*b, t.clifford())) throw NonCommutingB("B does not commute with T");
    }
  }

  Workspace w(t, s, p, two_point);
  const auto& T = w.T();
  const auto& S = w.at_s();

  IdentityResidual r;
  switch (id) {
    case IdentityId::LEFT_S_EQ:
      r = make_residual(id, S.s_left * s - T * S.s_left, I);
      break;
    case IdentityId::RIGHT_S_EQ:
      r = make_residual(id, s * S.s_right - S.s_right * T, I);
      break;
    case IdentityId::DELTA_LEFT_EQ:
      r = make_residual(id, S.delta_left * s - T * S.delta_left, -8.0 * S.q_inv);
      break;
    case IdentityId::DELTA_RIGHT_EQ:
      r = make_residual(id, s * S.delta_right - S.delta_right * T, -8.0 * S.q_inv);
      break;
    case IdentityId::F_LEFT_EQ:
      r = make_residual(id, S.f_left * s - T * S.f_left, 64.0 * S.q_inv2);
      break;
    case IdentityId::F_RIGHT_EQ:
      r = make_residual(id, s * S.f_right - S.f_right * T, 64.0 * S.q_inv2);
      break;
    default:
      break;
  }

  if (two_point) {
    const auto& P = w.at_p();
    switch (id) {
      case IdentityId::GEN_S_RES: {
        const CliffordOperator& B = *b;
        const CliffordOperator x = S.s_right * B - B * P.s_left;
        r = make_residual(id, S.s_right * B * P.s_left, w.bracket(x));
        break;
      }
      case IdentityId::QPOLY_COMMUTE: {
        const Multivector q = q_poly_inv(s, p);
        const IdentityResidual m1 = make_residual(id, q * P.q_inv, P.q_inv * q);
        const IdentityResidual m2 = make_residual(id, q * P.q_inv2, P.q_inv2 * q);
        r = m1.relative() >= m2.relative() ? m1 : m2;
        break;
      }
      case IdentityId::DSTEP3: {
        const CliffordOperator x = S.s_right * P.q_inv * p - S.s_right * T * P.q_inv - P.q_inv;
        r = make_residual(id, S.s_right * P.q_inv, w.bracket(x));
        break;
      }
      case IdentityId::DSTEP6: {
        const CliffordOperator x = S.q_inv - s * S.q_inv * P.s_left + S.q_inv * T * P.s_left;
        r = make_residual(id, S.q_inv * P.s_left, w.bracket(x));
        break;
      }
      case IdentityId::DSTEP8: {
        const CliffordOperator x = S.q_inv * T * P.s_left - S.s_right * T * P.q_inv;
        r = make_residual(id, S.q_inv * T * P.q_inv, w.bracket(x));
        break;
      }
      case IdentityId::DSTEP81: {
        const CliffordOperator x = S.s_right * P.q_inv * p - s * S.q_inv * P.s_left;
        r = make_residual(id, S.q_inv * w.Tbar() * P.q_inv, -w.bracket(x));
        break;
      }
      case IdentityId::PRERES: {
        const CliffordOperator tv = t.vector_part();
        const CliffordOperator lhs = S.s_right * P.q_inv + S.q_inv * P.s_left - 2.0 * (S.q_inv * tv * P.q_inv);
        r = make_residual(id, lhs, w.bracket(S.q_inv - P.q_inv));
        break;
      }
      case IdentityId::BIHARM_RES: {
        const CliffordOperator lhs = S.d * P.s_left + w.at_s_bar().s_right * P.d;
        r = make_residual(id, lhs, w.bracket(S.d - P.d));
        break;
      }
      case IdentityId::HARM_C3: {
        const CliffordOperator lhs = S.s_right * P.q_inv2 + S.q_inv2 * P.s_left;
        const CliffordOperator x = S.q_inv2 - P.q_inv2;
        const CliffordOperator y = S.q_inv2 * T * P.s_left - s * S.q_inv2 * P.s_left + S.s_right * P.q_inv2 * p -
                                   S.s_right * T * P.q_inv2;
        CliffordOperator rhs = w.bracket(x);
        if (control == Control::c3_trailing_p) {
          rhs += (y * p - s.conj() * y * p) * q_poly_inv(s, p);
        } else {
          rhs += w.bracket(y);
        }
        r = make_residual(id, lhs, rhs);
        break;
      }
      case IdentityId::HARM_C10: {
        const CliffordOperator tv = t.vector_part();
        const CliffordOperator rsl = S.q_inv * S.s_right * P.s_left * P.q_inv;
        CliffordOperator lhs = S.s_right * P.q_inv2 + S.q_inv2 * P.s_left;
        lhs -= 2.0 * (S.q_inv * S.s_right * T * P.s_left * P.q_inv);
        lhs += rsl * p;
        lhs += s * rsl;
        lhs -= 2.0 * (S.q_inv2 * tv * P.q_inv);
        lhs -= 2.0 * (S.q_inv * tv * P.q_inv2);
        r = make_residual(id, lhs, w.bracket(S.q_inv2 - P.q_inv2));
        break;
      }
      case IdentityId::HARM_RES_A: {
        CliffordOperator lhs = w.at_s_bar().s_right * P.ddelta + S.ddelta * w.at_p_bar().s_left;
        lhs += 0.5 * (S.d * P.delta_left);
        lhs += 0.5 * (S.delta_right * P.d);
        r = make_residual(id, lhs, w.bracket(S.ddelta - P.ddelta));
        break;
      }
      case IdentityId::HARM_RES_B: {
        CliffordOperator lhs = S.s_right * P.ddelta + S.ddelta * P.s_left;
        lhs += 0.5 * (S.d * w.at_p_bar().delta_left);
        lhs += 0.5 * (w.at_s_bar().delta_right * P.d);
        r = make_residual(id, lhs, w.bracket(S.ddelta - P.ddelta));
        break;
      }
      default:
        break;
    }
  }
  r.id = id;
  r.digest = inputs_digest(t, s, p, b);
  return r;
}

namespace {

std::uint64_t stream_seed(std::uint64_t seed, IdentityId id) {
  return seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(id) + 1));
}

}  // namespace

std::vector<SamplePoint> draw_samples(IdentityId id, const ParavectorOperator& t, const SamplerConfig& cfg) {
  std::vector<SamplePoint> out;
  if (cfg.count <= 0) return out;
  std::mt19937_64 rng(stream_seed(cfg.seed, id));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = t.algebra_dim();
  const double scale = std::max(t.spectral_radius(), 1.0);
  const double reach = cfg.outer * scale;
  const Arity arity = identity_info(id).arity;

  auto draw_point = [&]() {
    const UnitImaginary j = UnitImaginary::random(rng, n);
    double a = 0.0;
    double b = 0.0;
    do {
      a = u(rng);
      b = u(rng);
    } while (a * a + b * b > 1.0);
    return j.point(reach * a, reach * b);
  };
  auto admissible = [&](const Paravector& x) { return spectrum_distance(t, x) >= cfg.spectrum_margin * scale; };

  int rejections = 0;
  while (static_cast<int>(out.size()) < cfg.count) {
    SamplePoint sp;
    sp.s = draw_point();
    bool ok = admissible(sp.s);
    if (arity != Arity::s_only) {
      sp.p = draw_point();
      ok = ok && admissible(sp.p) &&
           std::hypot(sp.s.x0 - sp.p.x0, sp.s.vector_norm() - sp.p.vector_norm()) >= cfg.sphere_margin;
    }
    if (!ok) {
      if (++rejections >= 1000) throw SamplerExhausted("1000 consecutive rejections");
      continue;
    }
    rejections = 0;
    if (arity == Arity::s_p_and_b) sp.b = make_commuting_b(t, rng);
    out.push_back(std::move(sp));
  }
  return out;
}

std::vector<IdentityResidual> sweep(IdentityId id, const ParavectorOperator& t, const SamplerConfig& cfg,
                                    Control control) {
  const std::vector<SamplePoint> samples = draw_samples(id, t, cfg);
  std::vector<IdentityResidual> out(samples.size());
  std::exception_ptr failure;
  const long count = static_cast<long>(samples.size());
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
  for (long i = 0; i < count; ++i) {
    try {
      out[i] = check_identity(id, t, samples[i].s, samples[i].p, samples[i].b, control);
    } catch (...) {
#pragma omp critical(finecalc_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace finecalc
