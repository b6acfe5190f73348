#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "finecalc/operator.hpp"

namespace finecalc {

enum class ResolventTag {
  PseudoQ,
  SLeft,
  SRight,
  DLeft,
  DRight,
  DeltaLeft,
  DeltaRight,
  FLeft,
  FRight,
  DDeltaLeft,
  DDeltaRight,
};

struct ResolventKind {
  ResolventTag tag = ResolventTag::SLeft;
  int power = 1;  // only read for PseudoQ

  static ResolventKind pseudo_q(int m) { return {ResolventTag::PseudoQ, m}; }
};

std::string_view resolvent_name(ResolventTag tag);

/// Every resolvent at one point s, sharing a single inversion of Q_{c,s}(T).
///
///   S_L = (s - conj T) Q^{-1}        S_R = Q^{-1} (s - conj T)
///   S_D = -4 Q^{-1}                  S_DDelta = 16 Q^{-2}
///   S_Delta,L = -8 S_L Q^{-1}        S_Delta,R = -8 Q^{-1} S_R
///   F_L = 64 S_L Q^{-2}              F_R = 64 Q^{-2} S_R
struct ResolventFamily {
  Paravector s;
  CliffordOperator q_inv;
  CliffordOperator q_inv2;
  CliffordOperator s_left;
  CliffordOperator s_right;
  CliffordOperator d;
  CliffordOperator delta_left;
  CliffordOperator delta_right;
  CliffordOperator f_left;
  CliffordOperator f_right;
  CliffordOperator ddelta;

  /// Throws OnSpectrum when s is within tolerance of sigma_S(T).
  ResolventFamily(const Paravector& s, const ParavectorOperator& t);

  const CliffordOperator& get(ResolventTag tag) const;
};

/// Closed formula for one resolvent. PseudoQ(m) is Q_{c,s}^{-m}(T), m >= 1.
CliffordOperator resolvent(const ResolventKind& kind, const Paravector& s, const ParavectorOperator& t);

/// Whether s is within 1e-9 (1 + |s|) of a sphere of sigma_S(T).
bool on_spectrum(const ParavectorOperator& t, const Paravector& s);

enum class IdentityId {
  LEFT_S_EQ,
  RIGHT_S_EQ,
  GEN_S_RES,
  DELTA_LEFT_EQ,
  DELTA_RIGHT_EQ,
  QPOLY_COMMUTE,
  DSTEP3,
  DSTEP6,
  DSTEP8,
  DSTEP81,
  PRERES,
  BIHARM_RES,
  F_LEFT_EQ,
  F_RIGHT_EQ,
  HARM_C3,
  HARM_C10,
  HARM_RES_A,
  HARM_RES_B,
};

enum class Arity { s_only, s_and_p, s_p_and_b };

struct IdentityInfo {
  IdentityId id;
  std::string_view name;
  std::string_view anchor;
  Arity arity;
};

/// The whole catalog in declaration order.
const std::vector<IdentityInfo>& identity_catalog();
const IdentityInfo& identity_info(IdentityId id);
std::optional<IdentityId> identity_from_name(std::string_view name);
std::string_view arity_name(Arity a);

/// Deliberately wrong evaluations that must fail; used as negative controls.
enum class Control {
  none,
  /// HARM_C3 with the extra trailing p inside the second bracket.
  c3_trailing_p,
  /// GEN_S_RES with B that does not commute with T (the commutation check is
  /// skipped so the identity itself is exercised).
  noncommuting_b,
};

struct IdentityResidual {
  IdentityId id;
  std::string digest;
  double residual = 0.0;
  double scale = 1.0;

  double relative() const { return residual / scale; }
  bool passes(double tol) const { return relative() < tol; }
};

/// Evaluates both sides of the identity as displayed, with no algebraic
/// simplification. p is ignored for one-point identities, b for all but
/// GEN_S_RES (where it defaults to the identity operator).
///
/// Throws OnSpectrum, SphereCollision (s in [p]) and NonCommutingB.
IdentityResidual check_identity(IdentityId id, const ParavectorOperator& t, const Paravector& s,
                                const Paravector& p, const std::optional<CliffordOperator>& b = std::nullopt,
                                Control control = Control::none);

/// An operator commuting with T: a polynomial in T with coefficients in the
/// centre of R_n plus a real combination of the components T_i.
CliffordOperator make_commuting_b(const ParavectorOperator& t, std::mt19937_64& rng);

/// FNV-1a digest of (T, s, p, B), 16 hex digits.
std::string inputs_digest(const ParavectorOperator& t, const Paravector& s, const Paravector& p,
                          const std::optional<CliffordOperator>& b);

struct SamplerConfig {
  std::uint64_t seed = 1;
  int count = 50;
  /// s and p are drawn from the disc of radius outer * max(rho, 1) in their slice.
  double outer = 2.0;
  /// Minimum distance to sigma_S(T), relative to max(rho, 1).
  double spectrum_margin = 0.1;
  /// Minimum distance between [s] and [p] in the (Re, |vec|) half-plane.
  double sphere_margin = 0.05;
  bool parallel = true;
};

struct SamplePoint {
  Paravector s;
  Paravector p;
  std::optional<CliffordOperator> b;
};

/// Draws count admissible points sequentially from one generator. Throws
/// SamplerExhausted after 1000 consecutive rejections.
std::vector<SamplePoint> draw_samples(IdentityId id, const ParavectorOperator& t, const SamplerConfig& cfg);

/// Residuals at seeded random admissible points, ordered by sample index.
std::vector<IdentityResidual> sweep(IdentityId id, const ParavectorOperator& t, const SamplerConfig& cfg,
                                    Control control = Control::none);

}  // namespace finecalc
