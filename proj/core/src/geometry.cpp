#include "orthoglide/geometry.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <string>

#include "orthoglide/errors.hpp"

namespace orthoglide {

std::string_view axis_name(Axis a) noexcept {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "?";
}

Axis parse_axis(std::string_view name) {
  if (name.size() == 1) {
    switch (std::tolower(static_cast<unsigned char>(name[0]))) {
      case 'x': return Axis::X;
      case 'y': return Axis::Y;
      case 'z': return Axis::Z;
      default: break;
    }
  }
  throw ValidationError("unknown axis '" + std::string(name) + "' (expected x, y or z)");
}

void MachineGeometry::validate() const {
  const auto fail = [](const std::string& msg) { throw ValidationError("geometry: " + msg); };
  for (double v : {leg_length, parallelogram_width, tool_offset, joint_min, joint_max}) {
    if (!std::isfinite(v)) fail("non-finite value");
  }
  if (leg_length <= 0) fail("leg_length must be positive");
  if (parallelogram_width <= 0) fail("parallelogram_width must be positive");
  if (tool_offset < 0) fail("tool_offset must be non-negative");
  if (joint_min >= joint_max) fail("joint_min must be below joint_max");
  if (std::abs(joint_min) >= leg_length || std::abs(joint_max) >= leg_length) {
    fail("joint limits must be smaller than leg_length in magnitude");
  }
}

ParameterDeviation ParameterDeviation::from_vector(const Vector6& v) {
  ParameterDeviation d;
  d.joint_offsets = v.head<3>();
  d.leg_length_deviations = v.tail<3>();
  return d;
}

Vector6 ParameterDeviation::to_vector() const {
  Vector6 v;
  v << joint_offsets, leg_length_deviations;
  return v;
}

void ParameterDeviation::validate(const MachineGeometry& geom, double bound_fraction) const {
  const Vector6 v = to_vector();
  const double bound = bound_fraction * geom.leg_length;
  for (int i = 0; i < 6; ++i) {
    if (!std::isfinite(v[i])) {
      throw ValidationError("parameter deviation " + std::string(kParameterNames[i]) + " is not finite");
    }
    if (std::abs(v[i]) >= bound) {
      std::ostringstream os;
      os << "parameter deviation " << kParameterNames[i] << " = " << v[i] << " mm exceeds sanity bound "
         << bound << " mm";
      throw ValidationError(os.str());
    }
  }
}

ConfigurationIndices::ConfigurationIndices(int sx, int sy, int sz) : signs_{sx, sy, sz} {
  for (int s : signs_) {
    if (s != 1 && s != -1) throw ValidationError("configuration index must be +1 or -1");
  }
}

}  // namespace orthoglide
