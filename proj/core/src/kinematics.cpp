#include "orthoglide/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "orthoglide/errors.hpp"

namespace orthoglide {
namespace {

// Cyclic companions: leg i uses (j, k) = (i+1, i+2) mod 3, matching the
// orientation of the leg angle equations.
constexpr int next(int i) { return (i + 1) % 3; }
constexpr int after_next(int i) { return (i + 2) % 3; }

}  // namespace

JointCoordinates inverse_kinematics(const TcpPosition& p, const ParameterDeviation& dev,
                                    const MachineGeometry& geom, const ConfigurationIndices& s) {
  const Vector3 lengths = dev.leg_lengths(geom);
  JointCoordinates out;
  for (int i = 0; i < 3; ++i) {
    const int j = next(i);
    const int k = after_next(i);
    const double radicand = lengths[i] * lengths[i] - p.p[j] * p.p[j] - p.p[k] * p.p[k];
    if (!(radicand >= 0.0)) {
      std::ostringstream os;
      os << "TCP (" << p.p.transpose() << ") unreachable by " << axis_name(kAxes[i])
         << "-leg: radicand " << radicand << " mm^2";
      throw UnreachableError(i, os.str());
    }
    out.rho[i] = p.p[i] + s[i] * std::sqrt(radicand) - dev.joint_offsets[i];
  }
  return out;
}

TcpPosition direct_kinematics(const JointCoordinates& rho, const ParameterDeviation& dev,
                              const MachineGeometry& geom, const Tolerances& tol) {
  const Vector3 q = rho.rho + dev.joint_offsets;
  for (int i = 0; i < 3; ++i) {
    if (!(std::abs(q[i]) >= tol.degenerate_joint)) {
      std::ostringstream os;
      os << "shifted joint " << axis_name(kAxes[i]) << " = " << q[i] << " mm is degenerate";
      throw DegenerateJointError(os.str());
    }
  }
  const Vector3 len = dev.leg_lengths(geom);
  const Vector3 q2 = q.cwiseProduct(q);
  const Vector3 len2 = len.cwiseProduct(len);

  // Products of the two "other" squared joints for each leg.
  Vector3 others;
  for (int i = 0; i < 3; ++i) others[i] = q2[next(i)] * q2[after_next(i)];
  const double prod = q2[0] * q2[1] * q2[2];

  const double a = others.sum();
  const double b = prod - len2.dot(others);
  const double c = prod * (q2.sum() / 4.0 - len2.sum() / 2.0) +
                   len2.cwiseProduct(len2).dot(others) / 4.0;

  const double disc = b * b - 4.0 * a * c;
  if (!(disc >= 0.0)) {
    std::ostringstream os;
    os << "joint triple (" << rho.rho.transpose() << ") is not realizable: discriminant " << disc;
    throw InconsistentJointsError(os.str());
  }
  const double denom = -b + std::sqrt(disc);
  if (!(std::abs(denom) > 0.0)) {
    throw InconsistentJointsError("direct kinematics: assembly-mode root is undefined");
  }
  const double t = 2.0 * c / denom;

  TcpPosition out;
  for (int i = 0; i < 3; ++i) out.p[i] = q[i] / 2.0 + t / q[i] - len2[i] / (2.0 * q[i]);
  return out;
}

Vector3 constraint_residuals(const TcpPosition& p, const JointCoordinates& rho,
                             const ParameterDeviation& dev, const MachineGeometry& geom) {
  const Vector3 len = dev.leg_lengths(geom);
  const Vector3 q = rho.rho + dev.joint_offsets;
  Vector3 r;
  for (int i = 0; i < 3; ++i) {
    const double along = p.p[i] - q[i];
    r[i] = along * along + p.p[next(i)] * p.p[next(i)] + p.p[after_next(i)] * p.p[after_next(i)] -
           len[i] * len[i];
  }
  return r;
}

LegAngles leg_angles(const TcpPosition& p, const JointCoordinates& rho, const ParameterDeviation& dev,
                     const MachineGeometry& geom, const Tolerances& tol) {
  const Vector3 len = dev.leg_lengths(geom);
  const Vector3 q = rho.rho + dev.joint_offsets;
  LegAngles out;
  for (int i = 0; i < 3; ++i) {
    const int j = next(i);
    const int k = after_next(i);
    // Leg vector expressed as (cos(theta)cos(beta), sin(theta)cos(beta), -sin(beta)) * L_i
    // in the (i, j, k) frame.
    const Vector3 leg(p.p[i] - q[i], p.p[j], p.p[k]);
    const double mismatch = leg.norm() - len[i];
    if (!(std::abs(mismatch) <= tol.leg_consistency)) {
      std::ostringstream os;
      os << axis_name(kAxes[i]) << "-leg length mismatch " << mismatch << " mm";
      throw InconsistentPoseError(os.str());
    }
    const double sin_beta = std::clamp(-leg[2] / len[i], -1.0, 1.0);
    out.beta[i] = std::asin(sin_beta);
    double theta = std::atan2(leg[1], leg[0]);
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    out.theta[i] = theta;
  }
  return out;
}

Vector3 tcp_from_leg(Axis leg, const LegAngles& angles, const JointCoordinates& rho,
                     const ParameterDeviation& dev, const MachineGeometry& geom) {
  const int i = index(leg);
  const double len = geom.leg_length + dev.leg_length_deviations[i];
  const double th = angles.theta[i];
  const double be = angles.beta[i];
  Vector3 p;
  p[i] = (rho.rho[i] + dev.joint_offsets[i]) + std::cos(th) * std::cos(be) * len;
  p[next(i)] = std::sin(th) * std::cos(be) * len;
  p[after_next(i)] = -std::sin(be) * len;
  return p;
}

bool within_joint_limits(const JointCoordinates& rho, const MachineGeometry& geom) noexcept {
  for (int i = 0; i < 3; ++i) {
    if (!(rho.rho[i] >= geom.joint_lower() && rho.rho[i] <= geom.joint_upper())) return false;
  }
  return true;
}

}  // namespace orthoglide
