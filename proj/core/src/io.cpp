#include "orthoglide/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "orthoglide/errors.hpp"

namespace orthoglide::io {
namespace {

using nlohmann::json;

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

void require_object(const json& j, std::string_view context) {
  if (!j.is_object()) throw ValidationError(std::string(context) + ": expected a JSON object");
}

void check_keys(const json& j, std::string_view context, std::initializer_list<std::string_view> allowed) {
  require_object(j, context);
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ValidationError(std::string(context) + ": unknown key '" + item.key() + "'");
    }
  }
}

double number(const json& j, std::string_view context) {
  if (!j.is_number()) throw ValidationError(std::string(context) + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(std::string(context) + ": value is not finite");
  return v;
}

std::string string_field(const json& j, std::string_view context) {
  if (!j.is_string()) throw ValidationError(std::string(context) + ": expected a string");
  return j.get<std::string>();
}

void read_number(const json& obj, const char* key, double& out, std::string_view context) {
  if (obj.contains(key)) out = number(obj.at(key), std::string(context) + "." + key);
}

Vector3 vector3(const json& j, std::string_view context) {
  if (!j.is_array() || j.size() != 3) throw ValidationError(std::string(context) + ": expected 3 numbers");
  return {number(j[0], context), number(j[1], context), number(j[2], context)};
}

json to_array(const Vector3& v) { return json::array({v[0], v[1], v[2]}); }

json to_array(const Vector12& v) {
  json a = json::array();
  for (int i = 0; i < 12; ++i) a.push_back(v[i]);
  return a;
}

MachineGeometry geometry_from(const json& j) {
  check_keys(j, "geometry", {"leg_length", "parallelogram_width", "tool_offset", "joint_min", "joint_max"});
  MachineGeometry g;
  read_number(j, "leg_length", g.leg_length, "geometry");
  read_number(j, "parallelogram_width", g.parallelogram_width, "geometry");
  read_number(j, "tool_offset", g.tool_offset, "geometry");
  read_number(j, "joint_min", g.joint_min, "geometry");
  read_number(j, "joint_max", g.joint_max, "geometry");
  g.validate();
  return g;
}

json geometry_json(const MachineGeometry& g) {
  return {{"leg_length", g.leg_length},
          {"parallelogram_width", g.parallelogram_width},
          {"tool_offset", g.tool_offset},
          {"joint_min", g.joint_min},
          {"joint_max", g.joint_max}};
}

ParameterDeviation deviation_from(const json& j, std::string_view context) {
  check_keys(j, context, {"joint_offsets", "leg_length_deviations"});
  ParameterDeviation d;
  if (j.contains("joint_offsets")) {
    d.joint_offsets = vector3(j.at("joint_offsets"), std::string(context) + ".joint_offsets");
  }
  if (j.contains("leg_length_deviations")) {
    d.leg_length_deviations =
        vector3(j.at("leg_length_deviations"), std::string(context) + ".leg_length_deviations");
  }
  return d;
}

json deviation_json(const ParameterDeviation& d) {
  return {{"joint_offsets", to_array(d.joint_offsets)},
          {"leg_length_deviations", to_array(d.leg_length_deviations)}};
}

json parameters_json(const ParameterDeviation& d) {
  const Vector6 v = d.to_vector();
  json p = json::object();
  for (int k = 0; k < 6; ++k) p[std::string(kParameterNames[k])] = v[k];
  return p;
}

ParameterDeviation parameters_from(const json& j) {
  require_object(j, "parameters");
  Vector6 v = Vector6::Zero();
  for (const auto& item : j.items()) {
    const auto it = std::find(kParameterNames.begin(), kParameterNames.end(), item.key());
    if (it == kParameterNames.end()) throw ValidationError("parameters: unknown key '" + item.key() + "'");
    v[it - kParameterNames.begin()] = number(item.value(), "parameters." + item.key());
  }
  return ParameterDeviation::from_vector(v);
}

json mask_json(const ParameterMask& m) {
  json cols = json::array();
  for (int k = 0; k < 6; ++k) cols.push_back(m[k]);
  return cols;
}

ParameterMask mask_from(const json& j) {
  if (!j.is_array() || j.size() != 6) throw ValidationError("mask: expected 6 booleans");
  std::array<bool, 6> cols{};
  for (std::size_t k = 0; k < 6; ++k) {
    if (!j[k].is_boolean()) throw ValidationError("mask: expected 6 booleans");
    cols[k] = j[k].get<bool>();
  }
  return ParameterMask(cols);
}

json result_json(const CalibrationResult& r) {
  return {{"mask", r.mask.name()},
          {"columns", mask_json(r.mask)},
          {"parameters", parameters_json(r.identified)},
          {"residual", to_array(r.residual)},
          {"residual_rms", r.residual_rms},
          {"condition_number", r.condition_number}};
}

CalibrationResult result_from(const json& j) {
  check_keys(j, "report row", {"mask", "columns", "parameters", "residual", "residual_rms", "condition_number"});
  CalibrationResult r;
  r.mask = mask_from(j.at("columns"));
  r.identified = parameters_from(j.at("parameters"));
  const json& res = j.at("residual");
  if (!res.is_array() || res.size() != 12) throw ValidationError("report row: residual needs 12 numbers");
  for (std::size_t i = 0; i < 12; ++i) r.residual[static_cast<int>(i)] = number(res[i], "residual");
  r.residual_rms = number(j.at("residual_rms"), "residual_rms");
  r.condition_number = number(j.at("condition_number"), "condition_number");
  return r;
}

json labelled_measurements(const MeasurementVector& m, const std::array<std::vector<double>, 12>* repeats) {
  json entries = json::array();
  const auto& labels = canonical_labels();
  for (std::size_t i = 0; i < 12; ++i) {
    const MeasurementLabel& l = labels[i];
    json e = {{"leg", axis_name(l.leg)},
              {"axis", axis_name(l.axis)},
              {"posture", extreme_name(l.extreme)},
              {"value_mm", m.values[static_cast<int>(i)]}};
    if (repeats && !(*repeats)[i].empty()) e["repeats"] = (*repeats)[i];
    entries.push_back(std::move(e));
  }
  return entries;
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

MachineGeometry parse_geometry(std::string_view text) { return geometry_from(parse_json(text, "geometry")); }

std::string geometry_to_json(const MachineGeometry& geom) { return dump(geometry_json(geom)); }

ParameterDeviation parse_deviation(std::string_view text) {
  return deviation_from(parse_json(text, "deviation"), "deviation");
}

MeasurementFile parse_measurement_file(std::string_view text) {
  const json j = parse_json(text, "measurement file");
  check_keys(j, "measurement file", {"geometry", "unit", "measurements"});

  MeasurementFile file;
  if (j.contains("geometry")) file.geometry = geometry_from(j.at("geometry"));

  double repeat_scale = 1.0;
  if (j.contains("unit")) {
    const std::string unit = string_field(j.at("unit"), "unit");
    if (unit == "um") {
      repeat_scale = 1e-3;
    } else if (unit != "mm") {
      throw ValidationError("measurement file: unit must be 'mm' or 'um'");
    }
  }

  if (!j.contains("measurements") || !j.at("measurements").is_array()) {
    throw ValidationError("measurement file: 'measurements' array is required");
  }
  std::array<bool, 12> seen{};
  for (const json& e : j.at("measurements")) {
    check_keys(e, "measurement", {"leg", "axis", "posture", "value_mm", "value_um", "repeats"});
    for (const char* key : {"leg", "axis", "posture"}) {
      if (!e.contains(key)) throw ValidationError(std::string("measurement: missing '") + key + "'");
    }
    const MeasurementLabel label{parse_axis(string_field(e.at("axis"), "axis")),
                                 parse_axis(string_field(e.at("leg"), "leg")),
                                 parse_extreme(string_field(e.at("posture"), "posture"))};
    const int row = canonical_index(label);
    const auto slot = static_cast<std::size_t>(row);
    if (seen[slot]) throw ValidationError("measurement file: duplicate entry " + label_tag(label));
    seen[slot] = true;

    if (e.contains("repeats")) {
      const json& reps = e.at("repeats");
      if (!reps.is_array() || reps.empty()) {
        throw ValidationError("measurement " + label_tag(label) + ": repeats must be a non-empty array");
      }
      for (const json& r : reps) file.repeats[slot].push_back(number(r, "repeats") * repeat_scale);
    }

    if (e.contains("value_mm") && e.contains("value_um")) {
      throw ValidationError("measurement " + label_tag(label) + ": give value_mm or value_um, not both");
    }
    if (e.contains("value_mm")) {
      file.measurements.values[row] = number(e.at("value_mm"), "value_mm");
    } else if (e.contains("value_um")) {
      file.measurements.values[row] = number(e.at("value_um"), "value_um") * 1e-3;
    } else if (!file.repeats[slot].empty()) {
      const auto& reps = file.repeats[slot];
      double sum = 0.0;
      for (double r : reps) sum += r;
      file.measurements.values[row] = sum / static_cast<double>(reps.size());
    } else {
      throw ValidationError("measurement " + label_tag(label) + ": no value or repeats");
    }
  }
  for (std::size_t i = 0; i < 12; ++i) {
    if (!seen[i]) throw ValidationError("measurement file: missing entry " + label_tag(canonical_labels()[i]));
  }
  file.measurements.validate();
  return file;
}

std::string measurement_file_to_json(const MeasurementFile& file) {
  json j = {{"geometry", geometry_json(file.geometry)},
            {"unit", "mm"},
            {"measurements", labelled_measurements(file.measurements, &file.repeats)}};
  return dump(j);
}

std::string report_to_json(const CalibrationReport& report) {
  json rows = json::array();
  for (const CalibrationResult& r : report.rows) rows.push_back(result_json(r));
  json j = {{"geometry", geometry_json(report.geometry)},
            {"measurements", labelled_measurements(report.measurements, nullptr)},
            {"measurement_rms", rms(report.measurements.values)},
            {"rows", rows}};
  return dump(j);
}

CalibrationReport parse_report(std::string_view text) {
  const json j = parse_json(text, "report");
  check_keys(j, "report", {"geometry", "measurements", "measurement_rms", "rows"});
  CalibrationReport report;
  report.geometry = geometry_from(j.at("geometry"));
  json as_file = {{"measurements", j.at("measurements")}};
  report.measurements = parse_measurement_file(as_file.dump()).measurements;
  for (const json& row : j.at("rows")) report.rows.push_back(result_from(row));
  return report;
}

std::string report_to_text(const CalibrationReport& report) {
  std::ostringstream os;
  os << "Calibration results (mm)\n";
  os << "  measurement r.m.s. before identification: " << fixed(rms(report.measurements.values)) << "\n\n";
  os << std::left << std::setw(8) << "set";
  for (auto name : kParameterNames) os << std::right << std::setw(12) << name;
  os << std::setw(12) << "r.m.s." << std::setw(14) << "cond" << "\n";
  for (const CalibrationResult& r : report.rows) {
    const Vector6 v = r.identified.to_vector();
    os << std::left << std::setw(8) << r.mask.name();
    for (int k = 0; k < 6; ++k) os << std::right << std::setw(12) << (r.mask[k] ? fixed(v[k]) : "-");
    os << std::setw(12) << fixed(r.residual_rms) << std::setw(14) << fixed(r.condition_number, 3) << "\n";
  }
  os << "\nResiduals (mm)\n" << std::left << std::setw(8) << "obs";
  for (const CalibrationResult& r : report.rows) os << std::right << std::setw(12) << r.mask.name();
  os << std::setw(12) << "measured" << "\n";
  const auto& labels = canonical_labels();
  for (int i = 0; i < 12; ++i) {
    os << std::left << std::setw(8) << label_tag(labels[static_cast<std::size_t>(i)]);
    for (const CalibrationResult& r : report.rows) os << std::right << std::setw(12) << fixed(r.residual[i]);
    os << std::setw(12) << fixed(report.measurements.values[i]) << "\n";
  }
  return os.str();
}

ExperimentConfig parse_experiment_config(std::string_view text) {
  const json j = parse_json(text, "experiment config");
  check_keys(j, "config", {"geometry", "true_dev", "seed", "noise", "plan", "monte_carlo", "compensation",
                           "self_test_tolerance", "outputs"});
  ExperimentConfig c;
  if (j.contains("geometry")) c.geometry = geometry_from(j.at("geometry"));
  if (j.contains("true_dev")) c.true_dev = deviation_from(j.at("true_dev"), "true_dev");
  c.true_dev.validate(c.geometry);

  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned()) throw ValidationError("config.seed: expected a non-negative integer");
    c.noise.seed = s.get<std::uint64_t>();
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    check_keys(n, "noise", {"std_dev", "quantization_step"});
    read_number(n, "std_dev", c.noise.std_dev, "noise");
    read_number(n, "quantization_step", c.noise.quantization_step, "noise");
  }
  c.noise.validate();

  if (j.contains("plan")) {
    const json& p = j.at("plan");
    check_keys(p, "plan", {"repeats", "sequence", "mode"});
    if (p.contains("repeats")) {
      if (!p.at("repeats").is_number_integer()) throw ValidationError("plan.repeats: expected an integer");
      c.plan.repeats = p.at("repeats").get<int>();
    }
    if (p.contains("sequence")) {
      if (!p.at("sequence").is_array()) throw ValidationError("plan.sequence: expected an array");
      c.plan.sequence.clear();
      for (const json& s : p.at("sequence")) c.plan.sequence.push_back(parse_step(string_field(s, "plan.sequence")));
    }
    if (p.contains("mode")) c.plan.mode = parse_mode(string_field(p.at("mode"), "plan.mode"));
  }
  c.plan.validate();

  if (j.contains("monte_carlo")) {
    const json& m = j.at("monte_carlo");
    check_keys(m, "monte_carlo", {"trials", "threads"});
    if (m.contains("trials")) {
      if (!m.at("trials").is_number_integer() || m.at("trials").get<int>() < 1) {
        throw ValidationError("monte_carlo.trials: expected a positive integer");
      }
      c.monte_carlo_trials = m.at("trials").get<int>();
    }
    if (m.contains("threads")) {
      if (!m.at("threads").is_number_unsigned()) throw ValidationError("monte_carlo.threads: expected an integer >= 0");
      c.threads = m.at("threads").get<unsigned>();
    }
  }
  if (j.contains("compensation")) c.compensation = ParameterMask::parse(string_field(j.at("compensation"), "compensation"));
  if (j.contains("self_test_tolerance")) {
    c.self_test_tolerance = number(j.at("self_test_tolerance"), "self_test_tolerance");
    if (c.self_test_tolerance <= 0) throw ValidationError("self_test_tolerance must be positive");
  }
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    check_keys(o, "outputs", {"measurements", "readings", "summary", "report"});
    const auto opt = [&](const char* key, std::optional<std::string>& out) {
      if (o.contains(key)) out = string_field(o.at(key), std::string("outputs.") + key);
    };
    opt("measurements", c.outputs.measurements);
    opt("readings", c.outputs.readings);
    opt("summary", c.outputs.summary);
    opt("report", c.outputs.report);
  }
  return c;
}

std::string readings_to_csv(const std::vector<RawReading>& readings) {
  std::ostringstream os;
  os << "trial,leg,axis,posture,repeat,value_mm\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const RawReading& r : readings) {
    os << r.trial << ',' << axis_name(r.leg) << ',' << axis_name(r.axis) << ',' << step_name(r.posture) << ','
       << r.repeat << ',' << r.value_mm << '\n';
  }
  return os.str();
}

std::string monte_carlo_to_json(const MonteCarloSummary& s) {
  json mean = json::object();
  json p95 = json::object();
  for (int k = 0; k < 6; ++k) {
    mean[std::string(kParameterNames[k])] = s.mean_abs_error[k];
    p95[std::string(kParameterNames[k])] = s.p95_abs_error[k];
  }
  json j = {{"trials", s.trials},
            {"repeats", s.repeats},
            {"mean_abs_error", mean},
            {"p95_abs_error", p95},
            {"overall_mean_abs_error", s.overall_mean_abs_error}};
  return dump(j);
}

MonteCarloSummary parse_monte_carlo(std::string_view text) {
  const json j = parse_json(text, "monte carlo summary");
  check_keys(j, "monte carlo summary", {"trials", "repeats", "mean_abs_error", "p95_abs_error", "overall_mean_abs_error"});
  MonteCarloSummary s;
  s.trials = j.at("trials").get<int>();
  s.repeats = j.at("repeats").get<int>();
  s.mean_abs_error = parameters_from(j.at("mean_abs_error")).to_vector();
  s.p95_abs_error = parameters_from(j.at("p95_abs_error")).to_vector();
  s.overall_mean_abs_error = number(j.at("overall_mean_abs_error"), "overall_mean_abs_error");
  return s;
}

std::string protocol_to_json(const ProtocolReport& r, const MachineGeometry& geom) {
  json table = json::array();
  for (const CalibrationResult& row : r.table) table.push_back(result_json(row));
  json j = {
      {"geometry", geometry_json(geom)},
      {"true_dev", deviation_json(r.true_dev)},
      {"experiment_1", {{"measurements", labelled_measurements(r.baseline, nullptr)}, {"rms", r.baseline_rms}}},
      {"experiment_2",
       {{"measurements", labelled_measurements(r.identification_data, nullptr)},
        {"rms", r.pre_calibration_rms},
        {"table", table}}},
      {"experiment_3",
       {{"compensation_mask", r.compensation_mask.name()},
        {"compensation", parameters_json(r.compensation)},
        {"measurements", labelled_measurements(r.verification, nullptr)},
        {"rms", r.post_calibration_rms},
        {"refit", result_json(r.refit)}}},
  };
  return dump(j);
}

std::string protocol_to_text(const ProtocolReport& r, const MachineGeometry& geom) {
  std::ostringstream os;
  os << "Experiment 1: baseline measurement\n";
  os << "  parallelism deviation r.m.s.: " << fixed(r.baseline_rms) << " mm\n\n";
  os << "Experiment 2: identification\n";
  CalibrationReport table{geom, r.identification_data, r.table};
  os << report_to_text(table) << "\n";
  os << "Experiment 3: verification with identified " << r.compensation_mask.name() << " parameters\n";
  os << "  parallelism deviation r.m.s.: " << fixed(r.pre_calibration_rms) << " mm -> "
     << fixed(r.post_calibration_rms) << " mm\n";
  os << "  residual after re-identification: " << fixed(r.refit.residual_rms) << " mm\n";
  const Vector6 err = r.table.front().identified.to_vector() - r.true_dev.to_vector();
  os << "  full-set recovery error (max abs): " << fixed(err.cwiseAbs().maxCoeff()) << " mm\n";
  return os.str();
}

}  // namespace orthoglide::io
