#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace exodyad {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat25 = Eigen::Matrix<double, 2, 5>;

// Generalized coordinate layout shared by every module:
// [phi (torso pitch), hipL, kneeL, hipR, kneeR].
namespace joint {
inline constexpr int hip_left = 0;
inline constexpr int knee_left = 1;
inline constexpr int hip_right = 2;
inline constexpr int knee_right = 3;
}  // namespace joint

enum class Side { left = 0, right = 1 };
enum class User { a = 0, b = 1 };

inline constexpr Side other(Side s) { return s == Side::left ? Side::right : Side::left; }
inline constexpr int index(Side s) { return static_cast<int>(s); }
inline constexpr int index(User u) { return static_cast<int>(u); }

// Index of the hip (or knee) of a leg in the 4-vector of actuated joints.
inline constexpr int hip_of(Side s) { return s == Side::left ? joint::hip_left : joint::hip_right; }
inline constexpr int knee_of(Side s) { return s == Side::left ? joint::knee_left : joint::knee_right; }

inline constexpr double kPi = std::numbers::pi;
inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Raised for malformed arguments: non-finite numbers, bad shapes, invalid configs.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw InvalidInput(what + " is not finite");
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const std::string& what) {
  if (!m.allFinite()) throw InvalidInput(what + " contains non-finite entries");
}

}  // namespace exodyad
