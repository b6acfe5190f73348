#include <random>

#include "doctest.h"
#include "finecalc/resolvent.hpp"
#include "finecalc/slice.hpp"
#include "support.hpp"

using namespace finecalc;
using test::rel;

TEST_CASE("rank one resolvents are the Cauchy kernels") {
  const Paravector x(0.0, {0.3, -0.5, 0.1, 0.2, 0.4});
  JointEigenvalue e{};
  for (int i = 0; i < 5; ++i) e[i + 1] = x.xv[i];
  const ParavectorOperator t = make_commuting_operator({e});
  const Paravector s = UnitImaginary::e(1).point(0.7, 1.4);
  const ResolventFamily fam(s, t);
  const Multivector kl = cauchy_kernel_left(s, x, KernelForm::II);
  const Multivector kr = cauchy_kernel_right(s, x, KernelForm::II);
  const Multivector qi = mv_inverse(pseudo_q(s, x).mv());
  CHECK(rel(fam.s_left(0, 0), kl) < 1e-14);
  CHECK(rel(fam.s_right(0, 0), kr) < 1e-14);
  CHECK(rel(fam.d(0, 0), -4.0 * qi) < 1e-14);
  CHECK(rel(fam.delta_left(0, 0), -8.0 * (kl * qi)) < 1e-14);
  CHECK(rel(fam.f_left(0, 0), 64.0 * (kl * qi * qi)) < 1e-14);
  CHECK(rel(fam.f_right(0, 0), 64.0 * (qi * qi * kr)) < 1e-14);
  CHECK(rel(fam.ddelta(0, 0), 16.0 * (qi * qi)) < 1e-14);
  CHECK(rel(resolvent(ResolventKind::pseudo_q(2), s, t)(0, 0), qi * qi) < 1e-14);
}

TEST_CASE("catalog") {
  CHECK(identity_catalog().size() == 18);
  for (const auto& info : identity_catalog()) {
    CHECK(identity_from_name(info.name) == info.id);
    CHECK_FALSE(info.anchor.empty());
  }
  CHECK_FALSE(identity_from_name("NOPE").has_value());
}

TEST_CASE("every identity holds at random admissible points") {
  for (int d : {1, 2}) {
    const ParavectorOperator t = test::random_operator(d, 30 + d);
    SamplerConfig cfg;
    cfg.seed = 5;
    cfg.count = 8;
    for (const auto& info : identity_catalog()) {
      CAPTURE(info.name);
      for (const auto& r : sweep(info.id, t, cfg)) CHECK(r.relative() < 1e-9);
    }
  }
}

TEST_CASE("negative controls fail") {
  const ParavectorOperator t = test::random_operator(2, 33);
  SamplerConfig cfg;
  cfg.count = 8;
  for (const auto& r : sweep(IdentityId::HARM_C3, t, cfg, Control::c3_trailing_p)) CHECK(r.relative() > 1e-3);
  for (const auto& r : sweep(IdentityId::GEN_S_RES, t, cfg, Control::noncommuting_b)) CHECK(r.relative() > 1e-3);
}

TEST_CASE("identity preconditions") {
  const ParavectorOperator t = test::random_operator(2, 34);
  const auto sph = s_spectrum(t).front();
  const Paravector on = UnitImaginary::e(2).point(sph.center, sph.radius);
  const Paravector s = UnitImaginary::e(1).point(3.0, 1.0);
  const Paravector p = UnitImaginary::e(2).point(-2.0, 2.5);
  CHECK(on_spectrum(t, on));
  CHECK_THROWS_AS(check_identity(IdentityId::LEFT_S_EQ, t, on, p), OnSpectrum);
  CHECK_THROWS_AS(check_identity(IdentityId::PRERES, t, s, UnitImaginary::e(4).point(3.0, 1.0)), SphereCollision);
  std::mt19937_64 rng(1);
  CliffordOperator b(2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) b(i, j) = random_multivector(rng);
  }
  CHECK_THROWS_AS(check_identity(IdentityId::GEN_S_RES, t, s, p, b), NonCommutingB);
  CHECK_THROWS_AS(check_identity(IdentityId::GEN_S_RES, t, s, p, CliffordOperator::identity(3)), RankMismatch);
  const CliffordOperator good = make_commuting_b(t, rng);
  CHECK(rel(good * t.clifford(), t.clifford() * good) < 1e-12);
  CHECK(check_identity(IdentityId::GEN_S_RES, t, s, p, good).relative() < 1e-9);
}

TEST_CASE("digests are stable 16-digit hex strings") {
  const ParavectorOperator t = test::random_operator(2, 35);
  const Paravector s = UnitImaginary::e(1).point(3.0, 1.0);
  const Paravector p = UnitImaginary::e(2).point(-2.0, 2.5);
  const std::string d1 = inputs_digest(t, s, p, std::nullopt);
  CHECK(d1.size() == 16);
  CHECK(d1.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(d1 == inputs_digest(t, s, p, std::nullopt));
  CHECK(d1 != inputs_digest(t, p, s, std::nullopt));
}

TEST_CASE("sweeps are reproducible and order-stable") {
  const ParavectorOperator t = test::random_operator(2, 36);
  SamplerConfig cfg;
  cfg.count = 12;
  cfg.parallel = false;
  const auto serial = sweep(IdentityId::HARM_RES_A, t, cfg);
  cfg.parallel = true;
  const auto par = sweep(IdentityId::HARM_RES_A, t, cfg);
  REQUIRE(serial.size() == par.size());
  for (std::size_t k = 0; k < serial.size(); ++k) {
    CHECK(serial[k].digest == par[k].digest);
    CHECK(serial[k].residual == par[k].residual);
  }
  const auto a = draw_samples(IdentityId::DSTEP8, t, cfg);
  const auto b = draw_samples(IdentityId::DSTEP8, t, cfg);
  CHECK(a.front().s == b.front().s);
  CHECK(a.front().s != draw_samples(IdentityId::DSTEP6, t, cfg).front().s);
}

TEST_CASE("sampler gives up when nothing is admissible") {
  const ParavectorOperator t = make_commuting_operator({JointEigenvalue{}});
  SamplerConfig cfg;
  cfg.outer = 1e-3;
  CHECK_THROWS_AS(draw_samples(IdentityId::LEFT_S_EQ, t, cfg), SamplerExhausted);
}
