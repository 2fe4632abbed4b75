#include "orthoglide/calibration.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "orthoglide/errors.hpp"
#include "orthoglide/kinematics.hpp"
#include "orthoglide/sensitivity.hpp"

namespace orthoglide {

std::string_view extreme_name(Extreme e) noexcept { return e == Extreme::Max ? "max" : "min"; }

Extreme parse_extreme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "max") return Extreme::Max;
  if (lower == "min") return Extreme::Min;
  throw ValidationError("unknown posture '" + std::string(name) + "' (expected max or min)");
}

const std::array<MeasurementLabel, 12>& canonical_labels() noexcept {
  using enum Axis;
  static const std::array<MeasurementLabel, 12> labels{{
      {X, Y, Extreme::Max}, {Y, X, Extreme::Max}, {X, Y, Extreme::Min}, {Y, X, Extreme::Min},
      {Y, Z, Extreme::Max}, {Z, Y, Extreme::Max}, {Y, Z, Extreme::Min}, {Z, Y, Extreme::Min},
      {X, Z, Extreme::Max}, {Z, X, Extreme::Max}, {X, Z, Extreme::Min}, {Z, X, Extreme::Min},
  }};
  return labels;
}

int canonical_index(const MeasurementLabel& label) {
  const auto& labels = canonical_labels();
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw ValidationError("measurement axis must differ from its leg (got " +
                          std::string(axis_name(label.axis)) + "/" + std::string(axis_name(label.leg)) +
                          ")");
  }
  return static_cast<int>(it - labels.begin());
}

std::string label_tag(const MeasurementLabel& label) {
  std::string tag = "d";
  tag += axis_name(label.axis);
  tag += '_';
  tag += axis_name(label.leg);
  tag += label.extreme == Extreme::Max ? '+' : '-';
  return tag;
}

void MeasurementVector::validate(double bound_mm) const {
  const auto& labels = canonical_labels();
  for (int i = 0; i < 12; ++i) {
    if (!std::isfinite(values[i]) || std::abs(values[i]) >= bound_mm) {
      std::ostringstream os;
      os << "measurement " << label_tag(labels[static_cast<std::size_t>(i)]) << " = " << values[i]
         << " mm is outside the sanity bound of " << bound_mm << " mm";
      throw ValidationError(os.str());
    }
  }
}

CoefficientTriple coefficient_triple(double alpha) {
  const double s = std::sin(alpha);
  return {s, (0.5 + s) * std::tan(alpha), (0.5 + s) / std::cos(alpha) - 0.5};
}

std::array<Vector3, 3> gauge_initial_locations(const ParameterDeviation& dev,
                                               const MachineGeometry& geom) {
  // Zero-posture TCP to first order, then midpoint with the joint centre.
  const Vector3 tcp = dev.joint_offsets - dev.leg_length_deviations;
  std::array<Vector3, 3> g;
  for (int i = 0; i < 3; ++i) {
    Vector3 joint = Vector3::Zero();
    joint[i] = geom.leg_length + dev.joint_offsets[i];
    g[static_cast<std::size_t>(i)] = (tcp + joint) / 2.0;
  }
  return g;
}

DesignMatrix build_design_matrix(const MachineGeometry& geom) {
  const auto [a1, b1, c1] = coefficient_triple(std::asin(geom.joint_max / geom.leg_length));
  const auto [a2, b2, c2] = coefficient_triple(std::asin(geom.joint_min / geom.leg_length));
  DesignMatrix d;
  // clang-format off
  d << a1, b1, 0,  -c1, -b1,   0,
       b1, a1, 0,  -b1, -c1,   0,
       a2, b2, 0,  -c2, -b2,   0,
       b2, a2, 0,  -b2, -c2,   0,
       0,  a1, b1,   0, -c1, -b1,
       0,  b1, a1,   0, -b1, -c1,
       0,  a2, b2,   0, -c2, -b2,
       0,  b2, a2,   0, -b2, -c2,
       a1, 0,  b1, -c1,   0, -b1,
       b1, 0,  a1, -b1,   0, -c1,
       a2, 0,  b2, -c2,   0, -b2,
       b2, 0,  a2, -b2,   0, -c2;
  // clang-format on
  return d;
}

ParameterMask::ParameterMask(std::array<bool, 6> columns) : columns_(columns) {
  if (count() == 0) throw ValidationError("parameter mask selects no parameters");
}

ParameterMask ParameterMask::parse(std::string_view name) {
  if (name == "full") return full();
  if (name == "rho") return joint_offsets();
  if (name == "length") return leg_lengths();
  throw ValidationError("unknown mask '" + std::string(name) + "' (expected full, rho or length)");
}

int ParameterMask::count() const noexcept {
  return static_cast<int>(std::count(columns_.begin(), columns_.end(), true));
}

std::string ParameterMask::name() const {
  if (*this == full()) return "full";
  if (*this == joint_offsets()) return "rho";
  if (*this == leg_lengths()) return "length";
  std::string s;
  for (bool c : columns_) s += c ? '1' : '0';
  return s;
}

double rms(const Vector12& v) { return std::sqrt(v.squaredNorm() / 12.0); }

CalibrationResult solve_identification(const MeasurementVector& m, const ParameterMask& mask,
                                       const MachineGeometry& geom, const SolveOptions& options) {
  return solve_identification(m, mask, build_design_matrix(geom), options);
}

CalibrationResult solve_identification(const MeasurementVector& m, const ParameterMask& mask,
                                       const DesignMatrix& design, const SolveOptions& options) {
  const int k = mask.count();
  Eigen::MatrixXd masked(12, k);
  for (int col = 0, out = 0; col < 6; ++col) {
    if (mask[col]) masked.col(out++) = design.col(col);
  }

  Vector12 sqrt_w = Vector12::Ones();
  if (options.weights) {
    if ((options.weights->array() <= 0.0).any() || !options.weights->allFinite()) {
      throw ValidationError("row weights must be positive and finite");
    }
    sqrt_w = options.weights->cwiseSqrt();
  }
  const Eigen::MatrixXd weighted = sqrt_w.asDiagonal() * masked;
  const Vector12 rhs = sqrt_w.cwiseProduct(m.values);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(weighted, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double s_max = sv[0];
  const double s_min = sv[k - 1];
  if (!(s_min >= options.rank_tolerance * s_max) || s_max == 0.0) {
    std::ostringstream os;
    os << "masked design matrix (" << mask.name() << ") is rank deficient: sigma_min/sigma_max = "
       << (s_max > 0 ? s_min / s_max : 0.0);
    throw RankDeficientError(os.str());
  }

  // Moore-Penrose: x = V * S^-1 * U^T * b.
  const Eigen::VectorXd x =
      svd.matrixV() * (sv.cwiseInverse().asDiagonal() * (svd.matrixU().transpose() * rhs));

  Vector6 full = Vector6::Zero();
  for (int col = 0, in = 0; col < 6; ++col) {
    if (mask[col]) full[col] = x[in++];
  }

  CalibrationResult result;
  result.mask = mask;
  result.identified = ParameterDeviation::from_vector(full);
  result.residual = m.values - design * full;
  result.residual_rms = rms(result.residual);
  result.condition_number = s_max / s_min;
  return result;
}

JointCoordinates compensate_joint_command(const TcpPosition& target, const CalibrationResult& result,
                                          const MachineGeometry& geom) {
  return inverse_kinematics(target, result.identified, geom);
}

}  // namespace orthoglide
