#include "orthoglide/sensitivity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/LU>

#include "orthoglide/errors.hpp"
#include "orthoglide/kinematics.hpp"

namespace orthoglide {
namespace {

using Matrix3 = Eigen::Matrix3d;

Matrix3 invert_or_throw(const Matrix3& m, const char* block) {
  Eigen::FullPivLU<Matrix3> lu(m);
  if (!lu.isInvertible()) {
    throw SingularConfigurationError(std::string("parameter Jacobian: ") + block + " block is singular");
  }
  return lu.inverse();
}

bool is_max(PostureId id) {
  return id == PostureId::XMax || id == PostureId::YMax || id == PostureId::ZMax;
}

Axis driven_axis(PostureId id) {
  switch (id) {
    case PostureId::XMax:
    case PostureId::XMin: return Axis::X;
    case PostureId::YMax:
    case PostureId::YMin: return Axis::Y;
    default: return Axis::Z;
  }
}

}  // namespace

std::string_view posture_name(PostureId id) noexcept {
  switch (id) {
    case PostureId::Zero: return "zero";
    case PostureId::XMax: return "xmax";
    case PostureId::XMin: return "xmin";
    case PostureId::YMax: return "ymax";
    case PostureId::YMin: return "ymin";
    case PostureId::ZMax: return "zmax";
    case PostureId::ZMin: return "zmin";
  }
  return "?";
}

PostureId parse_posture(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (PostureId id : kPostures) {
    if (posture_name(id) == lower) return id;
  }
  throw ValidationError("unknown posture '" + std::string(name) + "'");
}

PostureId max_posture(Axis axis) noexcept {
  constexpr std::array<PostureId, 3> ids{PostureId::XMax, PostureId::YMax, PostureId::ZMax};
  return ids[static_cast<std::size_t>(index(axis))];
}

PostureId min_posture(Axis axis) noexcept {
  constexpr std::array<PostureId, 3> ids{PostureId::XMin, PostureId::YMin, PostureId::ZMin};
  return ids[static_cast<std::size_t>(index(axis))];
}

double posture_angle(PostureId id, const MachineGeometry& geom) {
  if (id == PostureId::Zero) return 0.0;
  const double travel = is_max(id) ? geom.joint_max : geom.joint_min;
  return std::asin(travel / geom.leg_length);
}

ParameterJacobian parameter_jacobian(const TcpPosition& p, const JointCoordinates& rho,
                                     const ParameterDeviation& dev, const MachineGeometry& geom,
                                     const Tolerances& tol) {
  const Vector3 q = rho.rho + dev.joint_offsets;
  const Vector3 len = dev.leg_lengths(geom);

  // Rows of the differentiated constraints: (p - q_i e_i)^T.
  Matrix3 m = p.p.transpose().replicate<3, 1>();
  Vector3 along;
  for (int i = 0; i < 3; ++i) {
    along[i] = p.p[i] - q[i];
    if (!(std::abs(along[i]) >= tol.singular)) {
      std::ostringstream os;
      os << "parameter Jacobian: " << axis_name(kAxes[i]) << "-leg has p_i - rho_i = " << along[i];
      throw SingularConfigurationError(os.str());
    }
    m(i, i) = along[i];
  }

  const Matrix3 rho_block = along.cwiseInverse().asDiagonal() * m;
  const Matrix3 length_block = len.cwiseInverse().asDiagonal() * m;

  ParameterJacobian j;
  j.leftCols<3>() = invert_or_throw(rho_block, "joint-offset");
  j.rightCols<3>() = invert_or_throw(length_block, "leg-length");
  return j;
}

ParameterJacobian posture_jacobian(PostureId id, const MachineGeometry& geom) {
  ParameterJacobian j = ParameterJacobian::Zero();
  j.leftCols<3>().setIdentity();
  j.rightCols<3>() = -Eigen::Matrix3d::Identity();
  if (id == PostureId::Zero) return j;

  const double alpha = posture_angle(id, geom);
  const double tan_a = std::tan(alpha);
  const double sec_a = 1.0 / std::cos(alpha);
  const int i = index(driven_axis(id));
  for (int r = 0; r < 3; ++r) {
    if (r == i) continue;
    j(r, i) = tan_a;
    j(r, 3 + i) = -tan_a;
    j(r, 3 + r) = -sec_a;
  }
  return j;
}

Vector3 displacement_at_posture(PostureId id, const ParameterDeviation& dev,
                                const MachineGeometry& geom) {
  const Vector3& d_rho = dev.joint_offsets;
  const Vector3& d_len = dev.leg_length_deviations;
  Vector3 dp = d_rho - d_len;
  if (id == PostureId::Zero) return dp;

  const double alpha = posture_angle(id, geom);
  const double tan_a = std::tan(alpha);
  const double sec_a = 1.0 / std::cos(alpha);
  const int i = index(driven_axis(id));
  for (int r = 0; r < 3; ++r) {
    if (r == i) continue;
    dp[r] = tan_a * d_rho[i] + d_rho[r] - tan_a * d_len[i] - sec_a * d_len[r];
  }
  return dp;
}

ParameterJacobian finite_difference_jacobian(const TcpPosition& p, const ParameterDeviation& dev,
                                             const MachineGeometry& geom, double step,
                                             const Tolerances& tol) {
  const JointCoordinates rho = inverse_kinematics(p, dev, geom);
  const Vector3 along = p.p - rho.rho - dev.joint_offsets;
  for (int i = 0; i < 3; ++i) {
    if (!(std::abs(along[i]) >= tol.singular)) {
      throw SingularConfigurationError("finite-difference Jacobian: singular leg configuration");
    }
  }
  const Vector6 base = dev.to_vector();
  ParameterJacobian j;
  for (int k = 0; k < 6; ++k) {
    Vector6 plus = base;
    Vector6 minus = base;
    plus[k] += step;
    minus[k] -= step;
    const Vector3 p_plus = direct_kinematics(rho, ParameterDeviation::from_vector(plus), geom).p;
    const Vector3 p_minus = direct_kinematics(rho, ParameterDeviation::from_vector(minus), geom).p;
    j.col(k) = (p_plus - p_minus) / (2.0 * step);
  }
  return j;
}

double relative_discrepancy(const ParameterJacobian& a, const ParameterJacobian& b) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace orthoglide
