#pragma once

#include <stdexcept>
#include <string>

namespace finecalc {

/// Base of every error raised by the library. Each subclass names one
/// failure condition so callers (and the harness) can report it by kind.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define FINECALC_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name, what) {}   \
  }

// clifford_core
FINECALC_DEFINE_ERROR(ZeroParavector);
FINECALC_DEFINE_ERROR(SingularMultivector);

// slice_functions
FINECALC_DEFINE_ERROR(OnSpectrumSphere);

// operator_algebra
FINECALC_DEFINE_ERROR(InvalidConstruction);
FINECALC_DEFINE_ERROR(SingularBasis);
FINECALC_DEFINE_ERROR(RankMismatch);
FINECALC_DEFINE_ERROR(SingularOperator);

// resolvent_identities
FINECALC_DEFINE_ERROR(OnSpectrum);
FINECALC_DEFINE_ERROR(SphereCollision);
FINECALC_DEFINE_ERROR(NonCommutingB);
FINECALC_DEFINE_ERROR(SamplerExhausted);

// functional_calculus
FINECALC_DEFINE_ERROR(ContourTouchesSpectrum);
FINECALC_DEFINE_ERROR(SideMismatch);
FINECALC_DEFINE_ERROR(NotIntrinsic);
FINECALC_DEFINE_ERROR(SpectrumNotSplit);

// fueter_sce_numerics
FINECALC_DEFINE_ERROR(GridTooSmall);
FINECALC_DEFINE_ERROR(AxisTooClose);

// verify_cli
FINECALC_DEFINE_ERROR(ConfigInvalid);

#undef FINECALC_DEFINE_ERROR

}  // namespace finecalc
