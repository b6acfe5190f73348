#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "finecalc/operator.hpp"

namespace test {

using namespace finecalc;

// Commuting operator with joint eigenvalues in [-1, 1]^n (t0 = 0), over a
// random basis unless diagonal is requested.
inline ParavectorOperator random_operator(int d, std::uint64_t seed, bool diagonal = false, int n = 5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<JointEigenvalue> eigs(d);
  for (auto& e : eigs) {
    e.fill(0.0);
    for (int i = 1; i <= n; ++i) e[i] = u(rng);
  }
  if (diagonal || d == 1) return make_commuting_operator(eigs, std::nullopt, n);
  return make_commuting_operator(eigs, random_basis(d, rng), n);
}

// T0 != 0 is allowed once T4 = T5 = 0.
inline ParavectorOperator operator_with_real_part(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<JointEigenvalue> eigs(d);
  for (auto& e : eigs) {
    e.fill(0.0);
    for (int i = 0; i <= 3; ++i) e[i] = u(rng);
  }
  return make_commuting_operator(eigs, random_basis(d, rng));
}

inline double rel(const CliffordOperator& a, const CliffordOperator& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1.0});
}

inline double rel(const Multivector& a, const Multivector& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1.0});
}

}  // namespace test
