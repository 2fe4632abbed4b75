#include <cmath>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <gtest/gtest.h>

#include "orthoglide/calibration.hpp"
#include "orthoglide/errors.hpp"
#include "orthoglide/kinematics.hpp"
#include "orthoglide/sensitivity.hpp"
#include "test_support.hpp"

namespace orthoglide {
namespace {

const MachineGeometry kGeom;

// Coefficients for asin(60 / 310.25) and asin(-100 / 310.25), evaluated
// independently at 30 significant digits.
constexpr CoefficientTriple kMax{0.193392425463336019339242546334, 0.13667710360824929498045863691,
                                 0.206734523240989062794788201689};
constexpr CoefficientTriple kMin{-0.322320709105560032232070910556, -0.0604984872287612310120299375991,
                                 -0.312303443372768280785177118599};

MeasurementVector measure(const Vector12& v) {
  MeasurementVector m;
  m.values = v;
  return m;
}

TEST(CoefficientTriple, VanishesAtZero) {
  const auto t = coefficient_triple(0.0);
  EXPECT_EQ(t.a, 0.0);
  EXPECT_EQ(t.b, 0.0);
  EXPECT_EQ(t.c, 0.0);
}

TEST(CoefficientTriple, PrototypeAngles) {
  const auto hi = coefficient_triple(std::asin(60.0 / 310.25));
  EXPECT_NEAR(hi.a, kMax.a, 1e-15);
  EXPECT_NEAR(hi.b, kMax.b, 1e-15);
  EXPECT_NEAR(hi.c, kMax.c, 1e-15);
  EXPECT_NEAR(hi.a, 60.0 / 310.25, 1e-15);

  const auto lo = coefficient_triple(std::asin(-100.0 / 310.25));
  EXPECT_NEAR(lo.a, kMin.a, 1e-15);
  EXPECT_NEAR(lo.b, kMin.b, 1e-15);
  EXPECT_NEAR(lo.c, kMin.c, 1e-15);
  // 0.5 + sin(a) stays positive while tan(a) < 0, so b and c are both negative.
  EXPECT_LT(lo.a, 0.0);
  EXPECT_LT(lo.b, 0.0);
  EXPECT_LT(lo.c, 0.0);
}

TEST(GaugeInitialLocations, NominalMidpoints) {
  const auto g = gauge_initial_locations({}, kGeom);
  EXPECT_EQ(g[0], Vector3(310.25 / 2, 0, 0));
  EXPECT_EQ(g[1], Vector3(0, 310.25 / 2, 0));
  EXPECT_EQ(g[2], Vector3(0, 0, 310.25 / 2));
}

TEST(GaugeInitialLocations, FirstOrderShifts) {
  ParameterDeviation offset;
  offset.joint_offsets = {1, 0, 0};
  const auto g = gauge_initial_locations(offset, kGeom);
  EXPECT_NEAR(g[0].x(), 310.25 / 2 + 1, 1e-12);
  EXPECT_NEAR(g[0].y(), 0.0, 1e-12);
  EXPECT_NEAR(g[1].x(), 0.5, 1e-12);

  ParameterDeviation longer;
  longer.leg_length_deviations = {2, 0, 0};
  EXPECT_NEAR(gauge_initial_locations(longer, kGeom)[0].x(), 310.25 / 2 - 1, 1e-12);

  testing::Sampler s(31);
  const ParameterDeviation d = s.deviation(1.0);
  const auto gd = gauge_initial_locations(d, kGeom);
  const Vector3 dr = d.joint_offsets;
  const Vector3 dl = d.leg_length_deviations;
  EXPECT_NEAR(gd[1].x(), (dr.x() - dl.x()) / 2, 1e-12);
  EXPECT_NEAR(gd[1].y(), (310.25 - dl.y()) / 2 + dr.y(), 1e-12);
  EXPECT_NEAR(gd[2].y(), (dr.y() - dl.y()) / 2, 1e-12);
}

TEST(DesignMatrix, ZeroPatternAndPlacements) {
  const DesignMatrix d = build_design_matrix(kGeom);
  int nonzero = 0;
  for (int r = 0; r < 12; ++r) {
    int row_nonzero = 0;
    for (int c = 0; c < 6; ++c) row_nonzero += d(r, c) != 0.0;
    EXPECT_EQ(row_nonzero, 4) << "row " << r;
    nonzero += row_nonzero;
  }
  EXPECT_EQ(nonzero, 48);

  // Rows 1-4 use x,y columns; 5-8 y,z; 9-12 x,z.
  for (int r = 0; r < 4; ++r) EXPECT_EQ(d(r, 2), 0.0);
  for (int r = 4; r < 8; ++r) EXPECT_EQ(d(r, 0), 0.0);
  for (int r = 8; r < 12; ++r) EXPECT_EQ(d(r, 1), 0.0);

  const auto [a1, b1, c1] = coefficient_triple(std::asin(60.0 / 310.25));
  Eigen::Matrix<double, 1, 6> row2;
  row2 << b1, a1, 0, -b1, -c1, 0;
  EXPECT_EQ(d.row(1), row2);
  Eigen::Matrix<double, 1, 6> row10;
  row10 << b1, 0, a1, -b1, 0, -c1;
  EXPECT_EQ(d.row(9), row10);
}

TEST(DesignMatrix, RowsMatchFirstOrderGaugeModel) {
  // Independent regeneration: the reading at the Max/Min posture is the TCP
  // displacement scaled by the gauge's station parameter 0.5 + sin(alpha),
  // minus the first-order Zero reading (half the Zero-posture TCP shift).
  const DesignMatrix d = build_design_matrix(kGeom);
  const auto& labels = canonical_labels();
  for (int row = 0; row < 12; ++row) {
    const MeasurementLabel l = labels[static_cast<std::size_t>(row)];
    const PostureId id = l.extreme == Extreme::Max ? max_posture(l.leg) : min_posture(l.leg);
    const double station = 0.5 + std::sin(posture_angle(id, kGeom));
    for (int col = 0; col < 6; ++col) {
      Vector6 unit = Vector6::Zero();
      unit[col] = 1.0;
      const auto dev = ParameterDeviation::from_vector(unit);
      const double moved = station * displacement_at_posture(id, dev, kGeom)[index(l.axis)];
      const double at_zero = gauge_initial_locations(dev, kGeom)[static_cast<std::size_t>(index(l.leg))][index(l.axis)];
      EXPECT_NEAR(d(row, col), moved - at_zero, 1e-12) << label_tag(l) << " col " << col;
    }
  }
}

TEST(DesignMatrix, DependsOnlyOnAngles) {
  MachineGeometry scaled;
  scaled.leg_length = 2 * 310.25;
  scaled.joint_max = 120;
  scaled.joint_min = -200;
  EXPECT_LT((build_design_matrix(scaled) - build_design_matrix(kGeom)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Labels, CanonicalOrder) {
  const auto& labels = canonical_labels();
  EXPECT_EQ(label_tag(labels[0]), "dx_y+");
  EXPECT_EQ(label_tag(labels[3]), "dy_x-");
  EXPECT_EQ(label_tag(labels[9]), "dz_x+");
  EXPECT_EQ(label_tag(labels[11]), "dz_x-");
  for (int i = 0; i < 12; ++i) EXPECT_EQ(canonical_index(labels[static_cast<std::size_t>(i)]), i);
  EXPECT_THROW(canonical_index({Axis::X, Axis::X, Extreme::Max}), ValidationError);
}

TEST(MeasurementVector, SanityBound) {
  MeasurementVector m;
  EXPECT_NO_THROW(m.validate());
  m.values[4] = 12.0;
  EXPECT_THROW(m.validate(), ValidationError);
  EXPECT_NO_THROW(m.validate(20.0));
  m.values[4] = std::nan("");
  EXPECT_THROW(m.validate(20.0), ValidationError);
}

TEST(ParameterMask, NamedSets) {
  EXPECT_EQ(ParameterMask::parse("full").count(), 6);
  EXPECT_EQ(ParameterMask::parse("rho"), ParameterMask::joint_offsets());
  EXPECT_EQ(ParameterMask::parse("length").name(), "length");
  EXPECT_EQ(ParameterMask({true, false, false, false, false, true}).name(), "100001");
  EXPECT_THROW(ParameterMask({}), ValidationError);
  EXPECT_THROW(ParameterMask::parse("both"), ValidationError);
}

TEST(SolveIdentification, RecoversConsistentSystem) {
  const DesignMatrix d = build_design_matrix(kGeom);
  testing::Sampler s(32);
  for (int n = 0; n < 200; ++n) {
    const ParameterDeviation truth = s.deviation(2.0);
    const auto r = solve_identification(measure(d * truth.to_vector()), ParameterMask::full(), kGeom);
    ASSERT_LT((r.identified.to_vector() - truth.to_vector()).cwiseAbs().maxCoeff(), 1e-9);
    ASSERT_LT(r.residual_rms, 1e-12);
  }
}

TEST(SolveIdentification, OrthogonalComponentStaysInResidual) {
  const DesignMatrix d = build_design_matrix(kGeom);
  // Orthogonal complement of the column space from a full QR.
  Eigen::HouseholderQR<DesignMatrix> qr(d);
  const Eigen::Matrix<double, 12, 12> q = qr.householderQ();
  const Vector12 orth = 0.3 * q.col(7) - 0.2 * q.col(10);
  ASSERT_LT((d.transpose() * orth).norm(), 1e-14);

  testing::Sampler s(33);
  const ParameterDeviation truth = s.deviation(1.0);
  const Vector12 consistent = d * truth.to_vector();
  const auto clean = solve_identification(measure(consistent), ParameterMask::full(), kGeom);
  const auto dirty = solve_identification(measure(consistent + orth), ParameterMask::full(), kGeom);
  EXPECT_LT((dirty.identified.to_vector() - clean.identified.to_vector()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((dirty.residual - orth).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(dirty.residual_rms, std::sqrt(orth.squaredNorm() / 12), 1e-12);
}

TEST(SolveIdentification, ReducedMaskHasLargerResidual) {
  const DesignMatrix d = build_design_matrix(kGeom);
  ParameterDeviation truth;
  truth.joint_offsets = {0.4, -0.3, 0.2};
  truth.leg_length_deviations = {-0.1, 0.5, 0.3};
  const MeasurementVector m = measure(d * truth.to_vector());
  const auto full = solve_identification(m, ParameterMask::full(), kGeom);
  const auto rho = solve_identification(m, ParameterMask::joint_offsets(), kGeom);
  const auto len = solve_identification(m, ParameterMask::leg_lengths(), kGeom);
  EXPECT_GT(rho.residual_rms, 0.0);
  EXPECT_GT(rho.residual_rms, full.residual_rms);
  EXPECT_GT(len.residual_rms, full.residual_rms);
  // Masked-out parameters stay at zero.
  EXPECT_EQ(rho.identified.leg_length_deviations, Vector3::Zero());
  EXPECT_EQ(len.identified.joint_offsets, Vector3::Zero());
}

TEST(SolveIdentification, LeastSquaresOptimality) {
  const DesignMatrix d = build_design_matrix(kGeom);
  testing::Sampler s(34);
  Vector12 noisy;
  for (int i = 0; i < 12; ++i) noisy[i] = s.uniform(-0.3, 0.3);
  for (const auto& mask : {ParameterMask::full(), ParameterMask::joint_offsets(), ParameterMask::leg_lengths()}) {
    const auto r = solve_identification(measure(noisy), mask, kGeom);
    const double best = r.residual.squaredNorm();
    for (int n = 0; n < 100; ++n) {
      Vector6 step = Vector6::Zero();
      for (int k = 0; k < 6; ++k) {
        if (mask[k]) step[k] = s.uniform(-1e-3, 1e-3);
      }
      const Vector12 res = noisy - d * (r.identified.to_vector() + step);
      ASSERT_GE(res.squaredNorm(), best - 1e-15);
    }
  }
}

TEST(SolveIdentification, ResidualNestingProperty) {
  testing::Sampler s(35);
  for (int n = 0; n < 100; ++n) {
    Vector12 m;
    for (int i = 0; i < 12; ++i) m[i] = s.uniform(-0.5, 0.5);
    const double full = solve_identification(measure(m), ParameterMask::full(), kGeom).residual_rms;
    ASSERT_LE(full, solve_identification(measure(m), ParameterMask::joint_offsets(), kGeom).residual_rms + 1e-15);
    ASSERT_LE(full, solve_identification(measure(m), ParameterMask::leg_lengths(), kGeom).residual_rms + 1e-15);
  }
}

TEST(SolveIdentification, Linearity) {
  testing::Sampler s(36);
  Vector12 m;
  for (int i = 0; i < 12; ++i) m[i] = s.uniform(-0.5, 0.5);
  const auto base = solve_identification(measure(m), ParameterMask::full(), kGeom);
  const double k = -3.5;
  const auto scaled = solve_identification(measure(k * m), ParameterMask::full(), kGeom);
  EXPECT_LT((scaled.identified.to_vector() - k * base.identified.to_vector()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((scaled.residual - k * base.residual).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveIdentification, ReportsConditionNumber) {
  const DesignMatrix d = build_design_matrix(kGeom);
  Eigen::JacobiSVD<DesignMatrix> svd(d);
  const auto r = solve_identification(MeasurementVector{}, ParameterMask::full(), kGeom);
  const auto sv = svd.singularValues();
  EXPECT_NEAR(r.condition_number, sv[0] / sv[5], 1e-9 * r.condition_number);
  EXPECT_GT(r.condition_number, 1.0);
}

TEST(SolveIdentification, RankDeficientMatrixRejected) {
  DesignMatrix d = build_design_matrix(kGeom);
  d.col(3) = d.col(0);
  EXPECT_THROW(solve_identification(MeasurementVector{}, ParameterMask::full(), d), RankDeficientError);
  EXPECT_NO_THROW(solve_identification(MeasurementVector{}, ParameterMask::joint_offsets(), d));
}

TEST(SolveIdentification, WeightsHook) {
  const DesignMatrix d = build_design_matrix(kGeom);
  testing::Sampler s(37);
  Vector12 m;
  for (int i = 0; i < 12; ++i) m[i] = s.uniform(-0.5, 0.5);
  SolveOptions unit;
  unit.weights = Vector12::Ones();
  const auto plain = solve_identification(measure(m), ParameterMask::full(), kGeom);
  const auto weighted = solve_identification(measure(m), ParameterMask::full(), kGeom, unit);
  EXPECT_LT((plain.identified.to_vector() - weighted.identified.to_vector()).cwiseAbs().maxCoeff(), 1e-12);

  SolveOptions heavy;
  heavy.weights = Vector12::Ones();
  (*heavy.weights)[0] = 1e6;
  const auto w = solve_identification(measure(m), ParameterMask::full(), d, heavy);
  EXPECT_LT(std::abs(w.residual[0]), std::abs(plain.residual[0]));

  SolveOptions bad;
  bad.weights = Vector12::Zero();
  EXPECT_THROW(solve_identification(measure(m), ParameterMask::full(), d, bad), ValidationError);
}

TEST(CompensateJointCommand, UsesIdentifiedModel) {
  CalibrationResult none;
  const TcpPosition target{Vector3(12, -7, 30)};
  EXPECT_EQ(compensate_joint_command(target, none, kGeom).rho, inverse_kinematics(target, {}, kGeom).rho);

  CalibrationResult offsets;
  offsets.identified.joint_offsets = {0.5, -0.2, 0.1};
  const Vector3 shift = compensate_joint_command(target, offsets, kGeom).rho - inverse_kinematics(target, {}, kGeom).rho;
  EXPECT_LT((shift + offsets.identified.joint_offsets).cwiseAbs().maxCoeff(), 1e-12);

  // A machine whose true parameters equal the identified ones lands on target.
  CalibrationResult both;
  both.identified.joint_offsets = {0.5, -0.2, 0.1};
  both.identified.leg_length_deviations = {-0.3, 0.4, 0.2};
  const auto cmd = compensate_joint_command(target, both, kGeom);
  EXPECT_LT((direct_kinematics(cmd, both.identified, kGeom).p - target.p).cwiseAbs().maxCoeff(), 1e-9);
}

}  // namespace
}  // namespace orthoglide
