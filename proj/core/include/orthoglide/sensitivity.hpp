#pragma once

#include <array>
#include <string_view>

#include <Eigen/Core>

#include "orthoglide/geometry.hpp"

namespace orthoglide {

/// dp / d(d_rho_x, d_rho_y, d_rho_z, L_x, L_y, L_z).
using ParameterJacobian = Eigen::Matrix<double, 3, 6>;

enum class PostureId { Zero, XMax, XMin, YMax, YMin, ZMax, ZMin };

inline constexpr std::array<PostureId, 7> kPostures{PostureId::Zero, PostureId::XMax, PostureId::XMin,
                                                    PostureId::YMax, PostureId::YMin, PostureId::ZMax,
                                                    PostureId::ZMin};

std::string_view posture_name(PostureId id) noexcept;
/// Accepts "zero", "xmax", "xmin", ... (case-insensitive). Throws ValidationError.
PostureId parse_posture(std::string_view name);

/// Max/Min posture along `axis`.
PostureId max_posture(Axis axis) noexcept;
PostureId min_posture(Axis axis) noexcept;

/// Angle between the non-driven legs and the driven axis at a Max/Min posture:
/// asin(joint_max / L) or asin(joint_min / L); zero for PostureId::Zero.
double posture_angle(PostureId id, const MachineGeometry& geom);

/// Analytic Jacobian [J_rho | J_L] at a consistent (p, rho) pair under `dev`.
/// Throws SingularConfigurationError when some |p_i - rho_i - d_rho_i| <
/// tol.singular or a block inverse fails.
ParameterJacobian parameter_jacobian(const TcpPosition& p, const JointCoordinates& rho,
                                     const ParameterDeviation& dev, const MachineGeometry& geom,
                                     const Tolerances& tol = {});

/// Closed-form Jacobian at a nominal posture (linearized around dev = 0).
ParameterJacobian posture_jacobian(PostureId id, const MachineGeometry& geom);

/// First-order TCP displacement at a nominal posture caused by `dev`.
Vector3 displacement_at_posture(PostureId id, const ParameterDeviation& dev,
                                const MachineGeometry& geom);

/// Central differences of the direct kinematics with respect to the six
/// parameters, joints held at inverse_kinematics(p, dev). Throws
/// SingularConfigurationError where the analytic Jacobian would.
ParameterJacobian finite_difference_jacobian(const TcpPosition& p, const ParameterDeviation& dev,
                                             const MachineGeometry& geom, double step = 1e-4,
                                             const Tolerances& tol = {});

/// max |a - b| / max(1, max |a|).
double relative_discrepancy(const ParameterJacobian& a, const ParameterJacobian& b);

}  // namespace orthoglide
