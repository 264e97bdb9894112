#pragma once

#include <array>
#include <cassert>
#include <cmath>

namespace relkep {

// Planar or spatial vector. The dimension (2 or 3) is fixed per run and all
// vectors participating in one computation share it.
class Vec {
 public:
  Vec() = default;
  Vec(double x, double y) : c_{x, y, 0.0}, n_(2) {}
  Vec(double x, double y, double z) : c_{x, y, z}, n_(3) {}

  static Vec zero(int n) {
    assert(n == 2 || n == 3);
    Vec v;
    v.n_ = n;
    return v;
  }

  int dim() const { return n_; }
  double operator[](int i) const { return c_[static_cast<size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<size_t>(i)]; }

  double dot(const Vec& o) const {
    assert(n_ == o.n_);
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += c_[static_cast<size_t>(i)] * o[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }

  Vec& operator+=(const Vec& o) {
    assert(n_ == o.n_);
    for (int i = 0; i < n_; ++i) c_[static_cast<size_t>(i)] += o[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    assert(n_ == o.n_);
    for (int i = 0; i < n_; ++i) c_[static_cast<size_t>(i)] -= o[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < n_; ++i) c_[static_cast<size_t>(i)] *= s;
    return *this;
  }

 private:
  std::array<double, 3> c_{};
  int n_ = 2;
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double s, Vec v) { return v *= s; }
inline Vec operator*(Vec v, double s) { return v *= s; }
inline Vec operator-(Vec v) { return v *= -1.0; }

// z-component of a ^ b; the full cross product restricted to the plane.
inline double cross_z(const Vec& a, const Vec& b) {
  return a[0] * b[1] - a[1] * b[0];
}

inline Vec cross(const Vec& a, const Vec& b) {
  assert(a.dim() == 3 && b.dim() == 3);
  return Vec(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
             a[0] * b[1] - a[1] * b[0]);
}

}  // namespace relkep
