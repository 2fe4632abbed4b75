#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "orthoglide/errors.hpp"
#include "orthoglide/io.hpp"
#include "test_support.hpp"

namespace orthoglide {
namespace {

// Twelve labelled entries in reverse canonical order, valued 0.001 * (row + 1).
std::string measurement_json(const std::string& unit_field, bool micrometres, int skip = -1, int duplicate = -1) {
  std::ostringstream os;
  os << "{" << unit_field << "\"measurements\": [";
  bool first = true;
  const auto& labels = canonical_labels();
  for (int row = 11; row >= 0; --row) {
    if (row == skip) continue;
    const int count = row == duplicate ? 2 : 1;
    for (int c = 0; c < count; ++c) {
      const MeasurementLabel& l = labels[static_cast<std::size_t>(row)];
      if (!first) os << ",";
      first = false;
      os << "{\"leg\": \"" << axis_name(l.leg) << "\", \"axis\": \"" << axis_name(l.axis) << "\", \"posture\": \""
         << extreme_name(l.extreme) << "\", ";
      if (micrometres) {
        os << "\"value_um\": " << (row + 1);
      } else {
        os << "\"value_mm\": " << 0.001 * (row + 1);
      }
      os << "}";
    }
  }
  os << "]}";
  return os.str();
}

TEST(Geometry, DefaultsAndOverrides) {
  EXPECT_EQ(io::parse_geometry("{}"), MachineGeometry{});
  const MachineGeometry g = io::parse_geometry(R"({"leg_length": 400, "joint_max": 80})");
  EXPECT_EQ(g.leg_length, 400.0);
  EXPECT_EQ(g.joint_max, 80.0);
  EXPECT_EQ(g.joint_min, -100.0);
  EXPECT_EQ(io::parse_geometry(io::geometry_to_json(g)), g);
}

TEST(Geometry, RejectsBadInput) {
  EXPECT_THROW(io::parse_geometry(R"({"leg_lenght": 400})"), ValidationError);
  EXPECT_THROW(io::parse_geometry(R"({"leg_length": "long"})"), ValidationError);
  EXPECT_THROW(io::parse_geometry(R"({"leg_length": -1})"), ValidationError);
  EXPECT_THROW(io::parse_geometry("{"), ValidationError);
}

TEST(Deviation, Parse) {
  const auto d = io::parse_deviation(R"({"joint_offsets": [0.1, 0.2, 0.3]})");
  EXPECT_EQ(d.joint_offsets, Vector3(0.1, 0.2, 0.3));
  EXPECT_EQ(d.leg_length_deviations, Vector3::Zero());
  EXPECT_THROW(io::parse_deviation(R"({"joint_offsets": [0.1, 0.2]})"), ValidationError);
  EXPECT_THROW(io::parse_deviation(R"({"offsets": [0, 0, 0]})"), ValidationError);
}

TEST(MeasurementFile, ReordersCanonically) {
  const auto f = io::parse_measurement_file(measurement_json("", false));
  for (int row = 0; row < 12; ++row) EXPECT_DOUBLE_EQ(f.measurements.values[row], 0.001 * (row + 1));
  EXPECT_EQ(f.geometry, MachineGeometry{});
}

TEST(MeasurementFile, MicrometreValues) {
  const auto mm = io::parse_measurement_file(measurement_json("", false));
  const auto um = io::parse_measurement_file(measurement_json("", true));
  EXPECT_LT((mm.measurements.values - um.measurements.values).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MeasurementFile, RepeatsAndUnit) {
  std::string text = measurement_json("\"unit\": \"um\", ", false);
  // Replace the first entry's value with repeats only (micrometres).
  const std::string first = "\"value_mm\": 0.012";
  const auto pos = text.find(first);
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, first.size(), "\"repeats\": [10, 14]");
  const auto f = io::parse_measurement_file(text);
  EXPECT_NEAR(f.measurements.values[11], 0.012, 1e-15);
  ASSERT_EQ(f.repeats[11].size(), 2U);
  EXPECT_NEAR(f.repeats[11][1], 0.014, 1e-15);

  EXPECT_THROW(io::parse_measurement_file(measurement_json("\"unit\": \"in\", ", false)), ValidationError);
}

TEST(MeasurementFile, RejectsMissingAndDuplicateLabels) {
  EXPECT_THROW(io::parse_measurement_file(measurement_json("", false, 4)), ValidationError);
  EXPECT_THROW(io::parse_measurement_file(measurement_json("", false, -1, 4)), ValidationError);
  EXPECT_THROW(io::parse_measurement_file(measurement_json("", false, 4, 5)), ValidationError);
  EXPECT_THROW(io::parse_measurement_file(R"({"measurements": [{"leg": "x", "axis": "x", "posture": "max", "value_mm": 0}]})"),
               ValidationError);
  EXPECT_THROW(io::parse_measurement_file(R"({"values": []})"), ValidationError);
}

TEST(MeasurementFile, RoundTrip) {
  io::MeasurementFile f;
  testing::Sampler s(51);
  for (int i = 0; i < 12; ++i) f.measurements.values[i] = s.uniform(-0.5, 0.5);
  f.repeats[3] = {0.1, 0.2};
  const auto back = io::parse_measurement_file(io::measurement_file_to_json(f));
  EXPECT_EQ(back.measurements.values, f.measurements.values);
  EXPECT_EQ(back.repeats[3], f.repeats[3]);
}

TEST(Report, JsonRoundTripIsExact) {
  io::CalibrationReport report;
  testing::Sampler s(52);
  for (int i = 0; i < 12; ++i) report.measurements.values[i] = s.uniform(-0.5, 0.5);
  for (const auto& mask : {ParameterMask::full(), ParameterMask::joint_offsets(), ParameterMask::leg_lengths()}) {
    report.rows.push_back(solve_identification(report.measurements, mask, report.geometry));
  }
  const auto back = io::parse_report(io::report_to_json(report));
  EXPECT_EQ(back.geometry, report.geometry);
  EXPECT_EQ(back.measurements.values, report.measurements.values);
  ASSERT_EQ(back.rows.size(), 3U);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.rows[i].mask, report.rows[i].mask);
    EXPECT_EQ(back.rows[i].identified, report.rows[i].identified);
    EXPECT_EQ(back.rows[i].residual, report.rows[i].residual);
    EXPECT_EQ(back.rows[i].residual_rms, report.rows[i].residual_rms);
    EXPECT_EQ(back.rows[i].condition_number, report.rows[i].condition_number);
  }
  const std::string text = io::report_to_text(report);
  EXPECT_NE(text.find("rho"), std::string::npos);
  EXPECT_NE(text.find("dy_x+"), std::string::npos);
}

TEST(Config, ParsesAllBlocks) {
  const auto c = io::parse_experiment_config(R"({
    "geometry": {"leg_length": 310.25},
    "true_dev": {"joint_offsets": [0.1, 0, 0], "leg_length_deviations": [0, 0.2, 0]},
    "seed": 42,
    "noise": {"std_dev": 0.005, "quantization_step": 0},
    "plan": {"repeats": 5, "sequence": ["zero", "min", "max", "zero"], "mode": "linear"},
    "monte_carlo": {"trials": 20, "threads": 2},
    "compensation": "rho",
    "self_test_tolerance": 0.1,
    "outputs": {"summary": "s.json"}
  })");
  EXPECT_EQ(c.noise.seed, 42U);
  EXPECT_EQ(c.noise.std_dev, 0.005);
  EXPECT_EQ(c.plan.repeats, 5);
  EXPECT_EQ(c.plan.sequence[1], PlanStep::Min);
  EXPECT_EQ(c.plan.mode, SimulationMode::Linear);
  EXPECT_EQ(c.monte_carlo_trials, 20);
  EXPECT_EQ(c.threads, 2U);
  EXPECT_EQ(c.compensation, ParameterMask::joint_offsets());
  EXPECT_EQ(c.self_test_tolerance, 0.1);
  EXPECT_EQ(c.outputs.summary, "s.json");
  EXPECT_FALSE(c.outputs.report.has_value());
  EXPECT_EQ(c.true_dev.leg_length_deviations.y(), 0.2);
}

TEST(Config, RejectsUnknownOrInvalidFields) {
  EXPECT_THROW(io::parse_experiment_config(R"({"sead": 1})"), ValidationError);
  EXPECT_THROW(io::parse_experiment_config(R"({"noise": {"sigma": 0.1}})"), ValidationError);
  EXPECT_THROW(io::parse_experiment_config(R"({"plan": {"repeats": 1.5}})"), ValidationError);
  EXPECT_THROW(io::parse_experiment_config(R"({"plan": {"sequence": ["zero", "max", "zero"]}})"), ValidationError);
  EXPECT_THROW(io::parse_experiment_config(R"({"monte_carlo": {"trials": 0}})"), ValidationError);
  EXPECT_THROW(io::parse_experiment_config(R"({"noise": {"std_dev": -1}})"), ValidationError);
  EXPECT_THROW(io::parse_experiment_config(R"({"true_dev": {"joint_offsets": [40, 0, 0]}})"), ValidationError);
}

TEST(Readings, CsvLayout) {
  const std::vector<RawReading> r{{0, Axis::X, Axis::Y, PlanStep::Max, 1, 0.25}};
  const std::string csv = io::readings_to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "trial,leg,axis,posture,repeat,value_mm");
  EXPECT_NE(csv.find("0,x,y,max,1,0.25"), std::string::npos);
}

TEST(MonteCarlo, JsonRoundTrip) {
  MonteCarloSummary s;
  s.trials = 10;
  s.repeats = 3;
  s.mean_abs_error << 0.1, 0.2, 0.3, 1.0 / 3.0, 0.5, 0.6;
  s.p95_abs_error << 1, 2, 3, 4, 5, 6;
  s.overall_mean_abs_error = 0.1234567890123;
  EXPECT_EQ(io::parse_monte_carlo(io::monte_carlo_to_json(s)), s);
}

TEST(Protocol, JsonAndText) {
  const auto report = three_experiment_protocol({}, NoiseModel::none(), MachineGeometry{});
  const std::string json = io::protocol_to_json(report, MachineGeometry{});
  EXPECT_NE(json.find("experiment_3"), std::string::npos);
  EXPECT_FALSE(io::protocol_to_text(report, MachineGeometry{}).empty());
}

}  // namespace
}  // namespace orthoglide
