#include "flosurf/majorana_algebra.hpp"

#include <utility>

namespace flosurf {

MajoranaMonomial MajoranaMonomial::product(std::initializer_list<int> ops, int i_power) {
  return product(std::vector<int>(ops), i_power);
}

MajoranaMonomial MajoranaMonomial::product(const std::vector<int>& ops, int i_power) {
  MajoranaMonomial m;
  m.i_power_ = ((i_power % 4) + 4) % 4;
  m.normalize(ops);
  return m;
}

void MajoranaMonomial::normalize(std::vector<int> raw) {
  // Insertion sort, counting transpositions of distinct operators; equal
  // neighbours square to the identity and are removed.
  int swaps = 0;
  for (std::size_t i = 1; i < raw.size(); ++i) {
    for (std::size_t j = i; j > 0 && raw[j - 1] > raw[j]; --j) {
      std::swap(raw[j - 1], raw[j]);
      ++swaps;
    }
  }
  ops_.clear();
  ops_.reserve(raw.size());
  for (int op : raw) {
    if (!ops_.empty() && ops_.back() == op) {
      ops_.pop_back();
    } else {
      ops_.push_back(op);
    }
  }
  if (swaps % 2 == 1) i_power_ = (i_power_ + 2) % 4;
}

MajoranaMonomial MajoranaMonomial::operator*(const MajoranaMonomial& rhs) const {
  std::vector<int> raw = ops_;
  raw.insert(raw.end(), rhs.ops_.begin(), rhs.ops_.end());
  MajoranaMonomial out;
  out.i_power_ = (i_power_ + rhs.i_power_) % 4;
  out.normalize(std::move(raw));
  return out;
}

MajoranaMonomial MajoranaMonomial::negated() const { return times_i(2); }

MajoranaMonomial MajoranaMonomial::times_i(int k) const {
  MajoranaMonomial out = *this;
  out.i_power_ = (((i_power_ + k) % 4) + 4) % 4;
  return out;
}

}  // namespace flosurf
