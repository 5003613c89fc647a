#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace gyrokin {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;
using Vec6 = std::array<double, 6>;

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double dot(const Vec6& a, const Vec6& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 6; ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Quarter-turn map w -> (w2, -w1).
inline Vec2 perp(const Vec2& w) { return {w[1], -w[0]}; }

inline Vec6 operator+(const Vec6& a, const Vec6& b) {
  Vec6 r;
  for (std::size_t i = 0; i < 6; ++i) r[i] = a[i] + b[i];
  return r;
}
inline Vec6 operator-(const Vec6& a, const Vec6& b) {
  Vec6 r;
  for (std::size_t i = 0; i < 6; ++i) r[i] = a[i] - b[i];
  return r;
}
inline Vec6 operator*(double s, const Vec6& a) {
  Vec6 r;
  for (std::size_t i = 0; i < 6; ++i) r[i] = s * a[i];
  return r;
}

using Mat3 = std::array<Vec3, 3>;
using Mat6 = std::array<Vec6, 6>;

inline Mat6 outer(const Vec6& a, const Vec6& b) {
  Mat6 m;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) m[i][j] = a[i] * b[j];
  return m;
}

}  // namespace gyrokin
