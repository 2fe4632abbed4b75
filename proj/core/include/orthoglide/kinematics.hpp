#pragma once

#include "orthoglide/geometry.hpp"

namespace orthoglide {

/// Passive leg orientation angles. Branch convention: beta_i in [-pi/2, pi/2],
/// theta_i in [0, 2*pi). At the mechanical-zero posture theta = (pi, pi, pi)
/// and beta = 0.
struct LegAngles {
  Vector3 theta = Vector3::Zero();
  Vector3 beta = Vector3::Zero();
};

/// rho_i = p_i + s_i * sqrt(L_i^2 - p_j^2 - p_k^2) - d_rho_i.
/// Throws UnreachableError if a radicand is negative.
JointCoordinates inverse_kinematics(const TcpPosition& p, const ParameterDeviation& dev,
                                    const MachineGeometry& geom,
                                    const ConfigurationIndices& s = {});

/// Closed-form direct kinematics for the prototype assembly mode.
///
/// Subtracting the leg constraints pairwise makes every p_i affine in the
/// auxiliary t = |p|^2 / 2; substituting back gives A t^2 + B t + C = 0. The
/// assembly-mode root is the one that vanishes at the mechanical zero. It is
/// evaluated as t = 2C / (-B + sqrt(B^2 - 4AC)), which avoids cancellation.
///
/// Throws DegenerateJointError if some |rho_i + d_rho_i| < tol.degenerate_joint
/// and InconsistentJointsError if the discriminant is negative.
TcpPosition direct_kinematics(const JointCoordinates& rho, const ParameterDeviation& dev,
                              const MachineGeometry& geom, const Tolerances& tol = {});

/// Leg constraint residuals (p_i - rho_i - d_rho_i)^2 + p_j^2 + p_k^2 - L_i^2, mm^2.
Vector3 constraint_residuals(const TcpPosition& p, const JointCoordinates& rho,
                             const ParameterDeviation& dev, const MachineGeometry& geom);

/// Recovers theta_i, beta_i from a consistent (p, rho) pair.
/// Throws InconsistentPoseError if a leg length is off by more than
/// tol.leg_consistency.
LegAngles leg_angles(const TcpPosition& p, const JointCoordinates& rho,
                     const ParameterDeviation& dev, const MachineGeometry& geom,
                     const Tolerances& tol = {});

/// TCP position reconstructed from the angles of a single leg.
Vector3 tcp_from_leg(Axis leg, const LegAngles& angles, const JointCoordinates& rho,
                     const ParameterDeviation& dev, const MachineGeometry& geom);

/// True iff L + joint_min <= rho_i <= L + joint_max for every joint.
bool within_joint_limits(const JointCoordinates& rho, const MachineGeometry& geom) noexcept;

}  // namespace orthoglide
