#pragma once

#include <array>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "finecalc/clifford.hpp"

namespace finecalc {

/// Largest supported module rank; 32 d stays at or below 512.
inline constexpr int kMaxRank = 16;

/// d x d matrix of multivectors acting right-linearly on (R_5)^d.
///
/// Entries multiply module elements from the left, so composition is the
/// ordinary matrix product over the (noncommutative) scalar ring, and a
/// Clifford scalar may act on an operator from either side.
class CliffordOperator {
 public:
  explicit CliffordOperator(int rank);

  static CliffordOperator identity(int rank);
  static CliffordOperator zero(int rank) { return CliffordOperator(rank); }
  /// Real matrix M embedded as the operator with entries M_ij * 1.
  static CliffordOperator from_real(const Eigen::MatrixXd& m);

  int rank() const { return rank_; }
  Multivector& operator()(int i, int j) { return entries_[i * rank_ + j]; }
  const Multivector& operator()(int i, int j) const { return entries_[i * rank_ + j]; }

  /// Frobenius norm over all 32 d^2 real coefficients.
  double norm() const;
  /// True when every off-diagonal entry is exactly zero.
  bool is_diagonal() const;

  CliffordOperator& operator+=(const CliffordOperator& o);
  CliffordOperator& operator-=(const CliffordOperator& o);
  CliffordOperator& operator*=(double k);

 private:
  int rank_;
  std::vector<Multivector> entries_;
};

CliffordOperator op_add(const CliffordOperator& a, const CliffordOperator& b);
CliffordOperator op_sub(const CliffordOperator& a, const CliffordOperator& b);
CliffordOperator op_mul(const CliffordOperator& a, const CliffordOperator& b);
/// c A (entries c A_ij).
CliffordOperator op_scale_left(const Multivector& c, const CliffordOperator& a);
/// A c (entries A_ij c).
CliffordOperator op_scale_right(const CliffordOperator& a, const Multivector& c);

/// Two-sided inverse. Structurally diagonal operators invert entrywise;
/// everything else goes through the 32d x 32d real lift. Throws
/// SingularOperator when the reciprocal condition estimate is below
/// kSingularityThreshold.
CliffordOperator op_inverse(const CliffordOperator& a);
/// Always through the real lift (the reference path for the diagonal one).
CliffordOperator op_inverse_lifted(const CliffordOperator& a);
/// Real 32d x 32d matrix of the operator on (R_5)^d.
Eigen::MatrixXd lift(const CliffordOperator& a);

inline CliffordOperator operator+(const CliffordOperator& a, const CliffordOperator& b) { return op_add(a, b); }
inline CliffordOperator operator-(const CliffordOperator& a, const CliffordOperator& b) { return op_sub(a, b); }
inline CliffordOperator operator-(CliffordOperator a) { return a *= -1.0; }
inline CliffordOperator operator*(const CliffordOperator& a, const CliffordOperator& b) { return op_mul(a, b); }
inline CliffordOperator operator*(const Multivector& c, const CliffordOperator& a) { return op_scale_left(c, a); }
inline CliffordOperator operator*(const CliffordOperator& a, const Multivector& c) { return op_scale_right(a, c); }
inline CliffordOperator operator*(const Paravector& c, const CliffordOperator& a) { return op_scale_left(c.mv(), a); }
inline CliffordOperator operator*(const CliffordOperator& a, const Paravector& c) { return op_scale_right(a, c.mv()); }
inline CliffordOperator operator*(double k, CliffordOperator a) { return a *= k; }
inline CliffordOperator operator*(CliffordOperator a, double k) { return a *= k; }

/// Joint eigenvalue (t0, t1, ..., t5) of the components.
using JointEigenvalue = std::array<double, kMaxGenerators + 1>;

/// Sphere t0 + |t_vec| S of the S-spectrum.
struct SpectralSphere {
  double center = 0.0;
  double radius = 0.0;
  int multiplicity = 1;
};

/// Paravector operator T = T0 + e1 T1 + ... + e5 T5 with real commuting
/// components, realised as T_i = V diag(t_i) V^{-1} over a shared basis V.
class ParavectorOperator {
 public:
  int rank() const { return static_cast<int>(eigenvalues_.size()); }
  int algebra_dim() const { return n_; }
  const Eigen::MatrixXd& component(int i) const { return components_.at(i); }
  const Eigen::MatrixXd& basis() const { return basis_; }
  const std::vector<JointEigenvalue>& eigenvalues() const { return eigenvalues_; }
  bool basis_is_identity() const { return basis_is_identity_; }

  /// T as a Clifford operator.
  const CliffordOperator& clifford() const { return clifford_; }
  /// e1 T1 + ... + e5 T5.
  CliffordOperator vector_part() const;
  /// max_k |t^(k)| over the joint eigenvalues.
  double spectral_radius() const;

 private:
  friend ParavectorOperator make_commuting_operator(const std::vector<JointEigenvalue>&,
                                                    const std::optional<Eigen::MatrixXd>&, int);
  friend ParavectorOperator conj_operator(const ParavectorOperator&);
  ParavectorOperator() : clifford_(1) {}
  void rebuild_clifford();

  int n_ = kMaxGenerators;
  std::vector<JointEigenvalue> eigenvalues_;
  Eigen::MatrixXd basis_;
  bool basis_is_identity_ = true;
  std::array<Eigen::MatrixXd, kMaxGenerators + 1> components_;
  CliffordOperator clifford_;
};

/// Builds T from a joint eigenvalue table and an optional real basis.
///
/// Rules: 1 <= d <= kMaxRank; components beyond e_n are zero; T0 = 0 unless
/// some T_i (1 <= i <= n) is the zero operator. Violations throw
/// InvalidConstruction; a singular V throws SingularBasis.
ParavectorOperator make_commuting_operator(const std::vector<JointEigenvalue>& eigs,
                                           const std::optional<Eigen::MatrixXd>& basis = std::nullopt,
                                           int n = kMaxGenerators);

/// T0 - e1 T1 - ... - e5 T5.
ParavectorOperator conj_operator(const ParavectorOperator& t);

/// Spheres of sigma_S(T), merged with multiplicities, ordered by (center, radius).
std::vector<SpectralSphere> s_spectrum(const ParavectorOperator& t);

/// Distance from s to sigma_S(T) in the (Re, |vector part|) half-plane.
double spectrum_distance(const ParavectorOperator& t, const Paravector& s);

/// Q_{c,s}(T) = s^2 I - s (T + conj T) + T conj T, built by operator products.
CliffordOperator pseudo_q_operator(const Paravector& s, const ParavectorOperator& t);
/// Q_s(T) = T^2 - 2 Re(s) T + |s|^2 I.
CliffordOperator s_q_operator(const Paravector& s, const ParavectorOperator& t);

/// Whether A is invertible at the kSingularityThreshold level.
bool is_invertible(const CliffordOperator& a);

/// Real basis I + scale * U(-1, 1) entries; well conditioned for small scale.
Eigen::MatrixXd random_basis(int rank, std::mt19937_64& rng, double scale = 0.3);

}  // namespace finecalc
