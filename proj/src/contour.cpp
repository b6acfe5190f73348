#include "finecalc/contour.hpp"

#include <algorithm>
#include <limits>

namespace finecalc {

Contour::Contour(double center, double radius, UnitImaginary j, int nodes)
    : center_(center), radius_(radius), j_(std::move(j)), nodes_(nodes) {
  if (!(radius > 0.0)) throw InvalidConstruction("contour radius must be positive");
  if (nodes < 8 || nodes % 2 != 0) {
    throw InvalidConstruction("contour node count must be even and at least 8");
  }
}

Paravector Contour::node(int k) const {
  const double theta = 2.0 * std::numbers::pi * k / nodes_;
  return j_.point(center_ + radius_ * std::cos(theta), radius_ * std::sin(theta));
}

Paravector Contour::weight(int k) const {
  const double theta = 2.0 * std::numbers::pi * k / nodes_;
  const double scale = radius_ * 2.0 * std::numbers::pi / nodes_;
  return j_.point(scale * std::cos(theta), scale * std::sin(theta));
}

double Contour::node_distance(double re, double im) const {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < nodes_; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / nodes_;
    const double a = center_ + radius_ * std::cos(theta);
    const double b = radius_ * std::sin(theta);
    best = std::min({best, std::hypot(a - re, b - im), std::hypot(a - re, b + im)});
  }
  return best;
}

}  // namespace finecalc
