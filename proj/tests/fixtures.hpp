#pragma once

// Small protocol instances shared by the test binaries.

#include <vector>

#include "adia/model.hpp"

namespace testing {

/// Default transverse-field protocol on an n-site ring.
inline adia::ProtocolSpec small_spec(int n, double delta, double total_time = 2.0) {
  adia::ProtocolSpec spec;
  spec.xxz = {n, 1.0, delta};
  spec.initial = adia::InitialField::transverse(n);
  spec.total_time = total_time;
  return spec;
}

/// 4-site ring at delta = 0.5 started from a tilted z-Neel field. The ground
/// gap stays above 1.7 J along the whole interpolation.
inline adia::ProtocolSpec gapped_spec(double total_time) {
  adia::ProtocolSpec spec = small_spec(4, 0.5, total_time);
  std::vector<double> theta, phi;
  for (int j = 0; j < 4; ++j) {
    theta.push_back(j % 2 == 0 ? 0.401 : 3.14159265358979 - 0.401);
    phi.push_back(0.0);
  }
  spec.initial = adia::InitialField::from_angles(1.0, theta, phi);
  return spec;
}

}  // namespace testing
