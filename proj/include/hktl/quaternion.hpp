#pragma once

// Quaternion arithmetic with the convention i j = k.  The moment map of the
// left circle action q -> e^{i theta} q on H is mu(q) = (1/2) conj(q) i q,
// read in the (i, j, k) basis.

#include <array>
#include <cmath>

namespace hktl {

struct Quaternion {
  double w = 0.0, x = 0.0, y = 0.0, z = 0.0;

  Quaternion() = default;
  Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static Quaternion unit_i() { return {0, 1, 0, 0}; }
  static Quaternion unit_j() { return {0, 0, 1, 0}; }
  static Quaternion unit_k() { return {0, 0, 0, 1}; }

  Quaternion conj() const { return {w, -x, -y, -z}; }
  double norm_sq() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm_sq()); }

  Quaternion operator+(const Quaternion& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
  Quaternion operator-(const Quaternion& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
  Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }

  Quaternion operator*(const Quaternion& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z, w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x, w * o.z + x * o.y - y * o.x + z * o.w};
  }
};

// Rotation by the circle action: q -> e^{i theta} q.
inline Quaternion circle_act(double theta, const Quaternion& q) {
  const Quaternion u{std::cos(theta), std::sin(theta), 0, 0};
  return u * q;
}

// mu(q) = (1/2) conj(q) i q, imaginary part in (i, j, k) components.
inline std::array<double, 3> flat_moment(const Quaternion& q) {
  const Quaternion m = q.conj() * Quaternion::unit_i() * q;
  return {0.5 * m.x, 0.5 * m.y, 0.5 * m.z};
}

}  // namespace hktl
