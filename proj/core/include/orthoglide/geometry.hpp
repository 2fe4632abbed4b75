#pragma once

#include <array>
#include <string_view>

#include <Eigen/Core>

namespace orthoglide {

using Vector3 = Eigen::Vector3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;

/// Cartesian / actuator axis. Leg i is driven by the actuator along axis i.
enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::X, Axis::Y, Axis::Z};

constexpr int index(Axis a) noexcept { return static_cast<int>(a); }
std::string_view axis_name(Axis a) noexcept;
/// Parses "x", "y" or "z" (case-insensitive). Throws ValidationError.
Axis parse_axis(std::string_view name);

/// Numerical tolerances. Units are mm for lengths.
struct Tolerances {
  double pose = 1e-9;            ///< pose agreement, mm
  double matrix = 1e-12;         ///< matrix identities
  double degenerate_joint = 1e-6;  ///< minimum |rho_i + d_rho_i|, mm
  double singular = 1e-6;        ///< minimum |p_i - rho_i - d_rho_i| in the Jacobian, mm
  double leg_consistency = 1e-6;  ///< leg-length residual accepted by leg_angles, mm
  double rank = 1e-10;           ///< relative singular value threshold
};

/// Nominal constants of the prototype. Joint limits are offsets relative to
/// the nominal joint value L: admissible rho_i lies in [L + joint_min, L + joint_max].
struct MachineGeometry {
  double leg_length = 310.25;          ///< L, mm
  double parallelogram_width = 80.0;   ///< d, mm
  double tool_offset = 31.0;           ///< r, mm
  double joint_min = -100.0;           ///< mm, relative to L
  double joint_max = 60.0;             ///< mm, relative to L

  /// Throws ValidationError if any invariant is violated.
  void validate() const;

  double joint_lower() const noexcept { return leg_length + joint_min; }
  double joint_upper() const noexcept { return leg_length + joint_max; }

  bool operator==(const MachineGeometry&) const = default;
};

/// The six calibrated quantities: encoder offsets and leg length deviations
/// (true leg length L_i = L + dL_i).
struct ParameterDeviation {
  Vector3 joint_offsets = Vector3::Zero();
  Vector3 leg_length_deviations = Vector3::Zero();

  static ParameterDeviation zero() { return {}; }
  /// Column order (d_rho_x, d_rho_y, d_rho_z, dL_x, dL_y, dL_z).
  static ParameterDeviation from_vector(const Vector6& v);
  Vector6 to_vector() const;

  Vector3 leg_lengths(const MachineGeometry& geom) const {
    return Vector3::Constant(geom.leg_length) + leg_length_deviations;
  }

  /// Rejects non-finite entries and entries with |value| >= bound_fraction * L.
  void validate(const MachineGeometry& geom, double bound_fraction = 0.1) const;

  bool operator==(const ParameterDeviation& o) const {
    return joint_offsets == o.joint_offsets && leg_length_deviations == o.leg_length_deviations;
  }
};

/// TCP position in the frame shifted by (r, r, r), mm.
struct TcpPosition {
  Vector3 p = Vector3::Zero();
};

/// Prismatic joint variables as commanded to the encoders, mm.
struct JointCoordinates {
  Vector3 rho = Vector3::Zero();
};

/// Assembly branch signs of the inverse kinematics radical.
class ConfigurationIndices {
 public:
  ConfigurationIndices() = default;
  /// Throws ValidationError unless each sign is exactly +1 or -1.
  ConfigurationIndices(int sx, int sy, int sz);

  int operator[](int i) const noexcept { return signs_[static_cast<std::size_t>(i)]; }

 private:
  std::array<int, 3> signs_{1, 1, 1};
};

/// Names of the six parameters in column order.
inline constexpr std::array<std::string_view, 6> kParameterNames{
    "d_rho_x", "d_rho_y", "d_rho_z", "dL_x", "dL_y", "dL_z"};

}  // namespace orthoglide
