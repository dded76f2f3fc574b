#pragma once

#include "kelvin/field.hpp"
#include "kelvin/geometry.hpp"

namespace kelvin {

struct Diagnostics {
  double area = 0.0;
  double impulse = 0.0;
  double energy = 0.0;
  double perimeter = 0.0;
  Point moment{};
  Point centroid{};
};

/// `m` selects the complex moment int_A e^{i m theta} dx.
inline Diagnostics diagnose(const NodeContour& c, int m, bool with_energy = true) {
  Diagnostics d;
  d.area = area(c);
  d.impulse = angular_impulse(c);
  d.energy = with_energy ? energy(c) : 0.0;
  d.perimeter = perimeter(c);
  d.moment = complex_moment(c, m);
  d.centroid = centroid(c);
  return d;
}

}  // namespace kelvin
