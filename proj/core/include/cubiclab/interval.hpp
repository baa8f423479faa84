#pragma once

#include <algorithm>
#include <ostream>

namespace cubiclab {

/// Closed interval [lo, hi].
template <class T>
struct Interval {
  T lo{};
  T hi{};

  T length() const { return hi - lo; }
  bool contains(const T& x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
  bool overlaps(const Interval& other) const { return lo <= other.hi && other.lo <= hi; }

  friend bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }
  friend bool operator!=(const Interval& a, const Interval& b) { return !(a == b); }
  friend std::ostream& operator<<(std::ostream& os, const Interval& iv) {
    return os << '[' << iv.lo << ", " << iv.hi << ']';
  }
};

}  // namespace cubiclab
