#include "finecalc/operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace finecalc {

namespace {

void require_same_rank(const CliffordOperator& a, const CliffordOperator& b) {
  if (a.rank() != b.rank()) {
    throw RankMismatch("ranks " + std::to_string(a.rank()) + " and " + std::to_string(b.rank()));
  }
}

}  // namespace

CliffordOperator::CliffordOperator(int rank) : rank_(rank) {
  if (rank < 1 || rank > kMaxRank) {
    throw InvalidConstruction("operator rank must lie in [1, " + std::to_string(kMaxRank) + "]");
  }
  entries_.resize(static_cast<std::size_t>(rank) * rank);
}

CliffordOperator CliffordOperator::identity(int rank) {
  CliffordOperator a(rank);
  for (int i = 0; i < rank; ++i) a(i, i) = Multivector(1.0);
  return a;
}

CliffordOperator CliffordOperator::from_real(const Eigen::MatrixXd& m) {
  CliffordOperator a(static_cast<int>(m.rows()));
  for (int i = 0; i < a.rank(); ++i) {
    for (int j = 0; j < a.rank(); ++j) a(i, j) = Multivector(m(i, j));
  }
  return a;
}

double CliffordOperator::norm() const {
  double s = 0.0;
  for (const auto& e : entries_) {
    for (double c : e.coeffs()) s += c * c;
  }
  return std::sqrt(s);
}

bool CliffordOperator::is_diagonal() const {
  const Multivector zero;
  for (int i = 0; i < rank_; ++i) {
    for (int j = 0; j < rank_; ++j) {
      if (i != j && !((*this)(i, j) == zero)) return false;
    }
  }
  return true;
}

CliffordOperator& CliffordOperator::operator+=(const CliffordOperator& o) {
  require_same_rank(*this, o);
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
  return *this;
}

CliffordOperator& CliffordOperator::operator-=(const CliffordOperator& o) {
  require_same_rank(*this, o);
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= o.entries_[k];
  return *this;
}

CliffordOperator& CliffordOperator::operator*=(double k) {
  for (auto& e : entries_) e *= k;
  return *this;
}

CliffordOperator op_add(const CliffordOperator& a, const CliffordOperator& b) {
  CliffordOperator r = a;
  return r += b;
}

CliffordOperator op_sub(const CliffordOperator& a, const CliffordOperator& b) {
  CliffordOperator r = a;
  return r -= b;
}

CliffordOperator op_mul(const CliffordOperator& a, const CliffordOperator& b) {
  require_same_rank(a, b);
  const int d = a.rank();
  CliffordOperator r(d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      const Multivector& aik = a(i, k);
      for (int j = 0; j < d; ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

CliffordOperator op_scale_left(const Multivector& c, const CliffordOperator& a) {
  CliffordOperator r(a.rank());
  for (int i = 0; i < a.rank(); ++i) {
    for (int j = 0; j < a.rank(); ++j) r(i, j) = c * a(i, j);
  }
  return r;
}

CliffordOperator op_scale_right(const CliffordOperator& a, const Multivector& c) {
  CliffordOperator r(a.rank());
  for (int i = 0; i < a.rank(); ++i) {
    for (int j = 0; j < a.rank(); ++j) r(i, j) = a(i, j) * c;
  }
  return r;
}

Eigen::MatrixXd lift(const CliffordOperator& a) {
  const int d = a.rank();
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(kBladeCount * d, kBladeCount * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      big.block<kBladeCount, kBladeCount>(kBladeCount * i, kBladeCount * j) = regular_rep(a(i, j));
    }
  }
  return big;
}

CliffordOperator op_inverse_lifted(const CliffordOperator& a) {
  const int d = a.rank();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(lift(a));
  const double rcond = lu_rcond(lu);
  if (!(rcond >= kSingularityThreshold)) {
    throw SingularOperator("lifted operator is singular (rcond " + std::to_string(rcond) + ")");
  }
  // The inverse commutes with the right action of R_5, so every block is a
  // left multiplication; its first column (the image of 1) is the entry.
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(kBladeCount * d, d);
  for (int j = 0; j < d; ++j) rhs(kBladeCount * j, j) = 1.0;
  const Eigen::MatrixXd cols = lu.solve(rhs);
  CliffordOperator inv(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int b = 0; b < kBladeCount; ++b) inv(i, j)[b] = cols(kBladeCount * i + b, j);
    }
  }
  return inv;
}

CliffordOperator op_inverse(const CliffordOperator& a) {
  if (!a.is_diagonal()) return op_inverse_lifted(a);
  CliffordOperator inv(a.rank());
  for (int i = 0; i < a.rank(); ++i) {
    try {
      inv(i, i) = mv_inverse(a(i, i));
    } catch (const SingularMultivector& e) {
      throw SingularOperator(std::string("diagonal entry: ") + e.what());
    }
  }
  return inv;
}

bool is_invertible(const CliffordOperator& a) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(lift(a));
  return lu_rcond(lu) >= kSingularityThreshold;
}

CliffordOperator ParavectorOperator::vector_part() const {
  const int d = rank();
  CliffordOperator v(d);
  for (int c = 1; c <= kMaxGenerators; ++c) {
    const int blade = vector_index(c);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) v(i, j)[blade] = components_[c](i, j);
    }
  }
  return v;
}

void ParavectorOperator::rebuild_clifford() {
  const int d = rank();
  clifford_ = CliffordOperator(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Multivector& e = clifford_(i, j);
      e[0] = components_[0](i, j);
      for (int c = 1; c <= kMaxGenerators; ++c) e[vector_index(c)] = components_[c](i, j);
    }
  }
}

double ParavectorOperator::spectral_radius() const {
  double r = 0.0;
  for (const auto& t : eigenvalues_) {
    double s = 0.0;
    for (double v : t) s += v * v;
    r = std::max(r, std::sqrt(s));
  }
  return r;
}

ParavectorOperator make_commuting_operator(const std::vector<JointEigenvalue>& eigs,
                                           const std::optional<Eigen::MatrixXd>& basis, int n) {
  const int d = static_cast<int>(eigs.size());
  if (d < 1 || d > kMaxRank) {
    throw InvalidConstruction("rank must lie in [1, " + std::to_string(kMaxRank) + "]");
  }
  if (n < 1 || n > kMaxGenerators) throw InvalidConstruction("algebra dimension must lie in [1, 5]");

  bool t0_zero = true;
  bool some_component_zero = false;
  for (int c = 0; c <= kMaxGenerators; ++c) {
    bool all_zero = true;
    for (const auto& row : eigs) {
      if (!std::isfinite(row[c])) throw InvalidConstruction("non-finite eigenvalue");
      if (row[c] != 0.0) all_zero = false;
    }
    if (c == 0) t0_zero = all_zero;
    if (c > n && !all_zero) {
      throw InvalidConstruction("component T" + std::to_string(c) + " lies outside R_" + std::to_string(n));
    }
    if (c >= 1 && c <= n && all_zero) some_component_zero = true;
  }
  if (!t0_zero && !some_component_zero) {
    throw InvalidConstruction("T0 != 0 requires some vanishing component T_i");
  }

  ParavectorOperator t;
  t.n_ = n;
  t.eigenvalues_ = eigs;
  t.basis_ = basis.value_or(Eigen::MatrixXd::Identity(d, d));
  if (t.basis_.rows() != d || t.basis_.cols() != d) throw InvalidConstruction("basis has the wrong shape");
  t.basis_is_identity_ = t.basis_.isIdentity(0.0);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(t.basis_);
  if (!(lu_rcond(lu) >= kSingularityThreshold)) throw SingularBasis("basis is not invertible");
  const Eigen::MatrixXd inv = lu.inverse();

  for (int c = 0; c <= kMaxGenerators; ++c) {
    Eigen::VectorXd diag(d);
    for (int k = 0; k < d; ++k) diag(k) = eigs[k][c];
    t.components_[c] = t.basis_is_identity_ ? Eigen::MatrixXd(diag.asDiagonal())
                                            : Eigen::MatrixXd(t.basis_ * diag.asDiagonal() * inv);
  }

  // Commutation holds by construction; roundoff in V^{-1} is all that can
  // break it.
  for (int a = 0; a <= kMaxGenerators; ++a) {
    for (int b = a + 1; b <= kMaxGenerators; ++b) {
      const auto& ta = t.components_[a];
      const auto& tb = t.components_[b];
      const double gap = (ta * tb - tb * ta).norm();
      if (gap > 1e-12 * std::max(1.0, ta.norm() * tb.norm())) {
        throw InvalidConstruction("components do not commute (basis too ill-conditioned)");
      }
    }
  }
  t.rebuild_clifford();
  return t;
}

ParavectorOperator conj_operator(const ParavectorOperator& t) {
  ParavectorOperator c = t;
  for (auto& row : c.eigenvalues_) {
    for (int k = 1; k <= kMaxGenerators; ++k) row[k] = -row[k];
  }
  for (int k = 1; k <= kMaxGenerators; ++k) c.components_[k] = -c.components_[k];
  c.rebuild_clifford();
  return c;
}

std::vector<SpectralSphere> s_spectrum(const ParavectorOperator& t) {
  std::vector<SpectralSphere> spheres;
  for (const auto& row : t.eigenvalues()) {
    double r2 = 0.0;
    for (int k = 1; k <= kMaxGenerators; ++k) r2 += row[k] * row[k];
    spheres.push_back({row[0], std::sqrt(r2), 1});
  }
  std::sort(spheres.begin(), spheres.end(), [](const SpectralSphere& a, const SpectralSphere& b) {
    return a.center != b.center ? a.center < b.center : a.radius < b.radius;
  });
  std::vector<SpectralSphere> merged;
  for (const auto& s : spheres) {
    if (!merged.empty() && std::abs(merged.back().center - s.center) <= 1e-12 &&
        std::abs(merged.back().radius - s.radius) <= 1e-12) {
      ++merged.back().multiplicity;
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

double spectrum_distance(const ParavectorOperator& t, const Paravector& s) {
  double best = std::numeric_limits<double>::infinity();
  const double im = s.vector_norm();
  for (const auto& sphere : s_spectrum(t)) {
    best = std::min(best, std::hypot(s.x0 - sphere.center, im - sphere.radius));
  }
  return best;
}

CliffordOperator pseudo_q_operator(const Paravector& s, const ParavectorOperator& t) {
  const CliffordOperator& op = t.clifford();
  const CliffordOperator bar = conj_operator(t).clifford();
  const Multivector sm = s.mv();
  const int d = t.rank();
  return (sm * sm) * CliffordOperator::identity(d) - sm * (op + bar) + op * bar;
}

CliffordOperator s_q_operator(const Paravector& s, const ParavectorOperator& t) {
  const CliffordOperator& op = t.clifford();
  return op * op - (2.0 * s.x0) * op + s.modulus_sq() * CliffordOperator::identity(t.rank());
}

Eigen::MatrixXd random_basis(int rank, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(rank, rank);
  for (int i = 0; i < rank; ++i) {
    for (int j = 0; j < rank; ++j) v(i, j) += scale * u(rng);
  }
  return v;
}

}  // namespace finecalc
