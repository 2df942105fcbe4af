#pragma once

#include <algorithm>
#include <cmath>

namespace symctl {

/// Position in the north-east-up frame, metres.
struct Vec3 {
  double x = 0;
  double y = 0;
  double z = 0;

  double operator[](int axis) const { return axis == 0 ? x : axis == 1 ? y : z; }
  double& operator[](int axis) { return axis == 0 ? x : axis == 1 ? y : z; }

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }
inline double max_norm(Vec3 a) {
  return std::max({std::fabs(a.x), std::fabs(a.y), std::fabs(a.z)});
}

/// Closed axis-aligned box [lo, hi].
struct Box {
  Vec3 lo;
  Vec3 hi;

  bool valid() const { return lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z; }
  Vec3 center() const { return 0.5 * (lo + hi); }
  bool contains(Vec3 p, double tol = 1e-9) const {
    for (int a = 0; a < 3; ++a)
      if (p[a] < lo[a] - tol || p[a] > hi[a] + tol) return false;
    return true;
  }
  bool intersects(const Box& other) const {
    for (int a = 0; a < 3; ++a)
      if (hi[a] < other.lo[a] || other.hi[a] < lo[a]) return false;
    return true;
  }
  Box translated(Vec3 offset) const { return {lo + offset, hi + offset}; }

  friend bool operator==(const Box&, const Box&) = default;
};

}  // namespace symctl
