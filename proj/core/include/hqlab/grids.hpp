#pragma once

#include "hqlab/errors.hpp"

namespace hqlab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Uniform nodes on [0, 1]: r_j = j*h with h = 1/(m-1).
struct RadialGrid {
  int m = 33;

  double h() const { return 1.0 / (m - 1); }
  double r(int j) const { return j * h(); }
  void validate() const {
    if (m < 5) throw InvalidInput("RadialGrid: need at least 5 nodes");
  }
};

/// Polar tensor grid on the closed unit disk: rings r_i = i/m_r for
/// i = 1..m_r (outermost ring on the boundary) plus one shared center node.
/// Periodic in theta with m_theta even.
struct DiskGrid {
  int m_r = 16;
  int m_theta = 32;

  double h_r() const { return 1.0 / m_r; }
  double h_theta() const { return kTwoPi / m_theta; }
  double r(int i) const { return i * h_r(); }
  double theta(int j) const { return j * h_theta(); }

  int node_count() const { return 1 + m_r * m_theta; }
  int center() const { return 0; }
  int node(int i, int j) const {
    int jj = j % m_theta;
    if (jj < 0) jj += m_theta;
    return 1 + (i - 1) * m_theta + jj;
  }

  void validate() const {
    if (m_r < 4) throw InvalidInput("DiskGrid: need at least 4 rings");
    if (m_theta < 8 || m_theta % 2 != 0) {
      throw InvalidInput("DiskGrid: m_theta must be even and >= 8");
    }
  }
};

enum class Geometry { Radial, Disk };

}  // namespace hqlab
