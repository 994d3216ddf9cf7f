#pragma once

#include <vector>

#include "fastreact/spectral.hpp"

namespace fastreact {

/// Paired (u, v) fields at time t; both share one grid.
struct FastSlowState {
  SpectralField u;
  SpectralField v;
  double t = 0.0;
};

struct Trajectory {
  std::vector<FastSlowState> samples;
  /// Running max over nodes and time of |u_1| = |u| and |u_2| = |v - u|, one entry per sample.
  std::vector<double> linf_u1;
  std::vector<double> linf_u2;

  std::vector<double> times() const {
    std::vector<double> t;
    t.reserve(samples.size());
    for (const auto& s : samples) t.push_back(s.t);
    return t;
  }
};

}  // namespace fastreact
