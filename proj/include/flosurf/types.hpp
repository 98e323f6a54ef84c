#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace flosurf {

/// Qubits carrying a Z in a Pauli-Z string, one flag per qubit.
using ZSupport = std::vector<std::uint8_t>;

/// Outcomes (+1 / -1) of the X checks of one round, indexed like
/// CodePatch::x_faces. Z checks always read +1 under Z errors.
struct Syndrome2D {
  std::vector<std::int8_t> s;

  bool trivial() const {
    for (auto v : s) {
      if (v != 1) return false;
    }
    return true;
  }
  bool operator==(const Syndrome2D&) const = default;
};

/// Per-qubit X-measurement outcomes of the Majorana sampling, +1 / -1.
struct MSyndrome {
  std::vector<std::int8_t> m;
};

/// Z-rotation angle of each physical qubit, e^{i theta_j Z_j}.
struct AngleAssignment {
  std::vector<double> theta;

  static AngleAssignment homogeneous(int qubits, double angle) {
    return {std::vector<double>(qubits, angle)};
  }
};

/// Physical error rate of a coherent rotation, p = sin^2(theta).
inline double error_rate_of_angle(double theta) {
  const double s = std::sin(theta);
  return s * s;
}

inline double angle_of_error_rate(double p) { return std::asin(std::sqrt(p)); }

/// Representative of x modulo pi in (-pi/2, pi/2].
inline double fold_angle(double x) {
  constexpr double pi = std::numbers::pi;
  double y = std::remainder(x, pi);
  if (y <= -pi / 2) y += pi;
  return y;
}

}  // namespace flosurf
