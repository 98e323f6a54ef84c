#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace flosurf {

/// Ordered Majorana pair (p, q), standing for the operator i c_p c_q.
struct MajoranaPair {
  int first;
  int second;

  MajoranaPair reversed() const { return {second, first}; }
  bool operator==(const MajoranaPair&) const = default;
};

/// Symbolic product of Majorana operators, kept in normal form:
/// phase * c_{j1} c_{j2} ... with j1 < j2 < ... and phase = i^k.
///
/// Used to check sign conventions of the Majorana network exactly, without
/// floating point.
class MajoranaMonomial {
 public:
  MajoranaMonomial() = default;

  static MajoranaMonomial product(std::initializer_list<int> ops, int i_power = 0);
  static MajoranaMonomial product(const std::vector<int>& ops, int i_power = 0);

  /// i c_p c_q
  static MajoranaMonomial bilinear(int p, int q) { return product({p, q}, 1); }

  MajoranaMonomial operator*(const MajoranaMonomial& rhs) const;
  MajoranaMonomial& operator*=(const MajoranaMonomial& rhs) { return *this = *this * rhs; }

  bool operator==(const MajoranaMonomial& rhs) const = default;

  /// Power of i in the prefactor, in [0, 4).
  int i_power() const { return i_power_; }
  const std::vector<int>& support() const { return ops_; }

  MajoranaMonomial negated() const;
  MajoranaMonomial times_i(int k) const;

 private:
  void normalize(std::vector<int> raw);

  int i_power_ = 0;
  std::vector<int> ops_;
};

}  // namespace flosurf
