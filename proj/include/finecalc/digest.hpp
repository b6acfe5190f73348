#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "finecalc/clifford.hpp"

namespace finecalc {

/// FNV-1a over raw bytes; hex() gives 16 lowercase digits.
class Digest {
 public:
  void add(const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= bytes[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void add(double v) { add(&v, sizeof v); }
  void add(std::string_view s) { add(s.data(), s.size()); }
  void add(const Paravector& x) {
    add(x.x0);
    for (double v : x.xv) add(v);
  }
  void add(const Multivector& m) { add(m.coeffs().data(), sizeof(double) * kBladeCount); }

  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i) out[15 - i] = digits[(h_ >> (4 * i)) & 0xF];
    return out;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace finecalc
