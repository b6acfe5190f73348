#pragma once

#include <cmath>
#include <numbers>

#include "finecalc/clifford.hpp"

namespace finecalc {

/// Counter-clockwise circle in the slice plane C_J, centred on the real axis,
/// sampled at N equispaced nodes for the trapezoidal rule.
///
/// Node k sits at s_k = c + R e^{J theta_k}, theta_k = 2 pi k / N. The slice
/// measure ds_J = ds (-J) turns into the weight R e^{J theta_k} (2 pi / N),
/// because ds = R J e^{J theta} d theta and J(-J) = 1.
class Contour {
 public:
  Contour(double center, double radius, UnitImaginary j, int nodes);

  double center() const { return center_; }
  double radius() const { return radius_; }
  const UnitImaginary& imaginary() const { return j_; }
  int nodes() const { return nodes_; }

  Paravector node(int k) const;
  Paravector weight(int k) const;

  /// Same circle with a different node count.
  Contour with_nodes(int nodes) const { return Contour(center_, radius_, j_, nodes); }
  Contour with_imaginary(const UnitImaginary& j) const { return Contour(center_, radius_, j, nodes_); }
  Contour with_radius(double radius) const { return Contour(center_, radius, j_, nodes_); }

  /// Whether the point (re, im) of the half-plane (Re, |vector part|) lies
  /// strictly inside the circle, i.e. the sphere [re + I im] meets the open
  /// disc in every slice.
  bool encloses(double re, double im) const {
    return std::hypot(re - center_, im) < radius_;
  }
  /// Smallest distance from a node to the slice points re +/- J im.
  double node_distance(double re, double im) const;

 private:
  double center_;
  double radius_;
  UnitImaginary j_;
  int nodes_;
};

}  // namespace finecalc
