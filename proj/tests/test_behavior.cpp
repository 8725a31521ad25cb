#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "nevsim/behavior.hpp"
#include "nevsim/error.hpp"

using namespace nevsim;
using namespace nevsim::behavior;

namespace {

TelemetryRecord at(EpochSeconds t, VehicleState state = VehicleState::Running,
                   ChargingStatus status = ChargingStatus::NotCharging,
                   OperationMode mode = OperationMode::PureElectric, double soc = 50.0) {
  TelemetryRecord r;
  r.vehicle_id = "EV1";
  r.timestamp = t;
  r.vehicle_state = state;
  r.charging_status = status;
  r.operation_mode = mode;
  r.soc = soc;
  return r;
}

// Direct evaluation of the covariance / standard deviation formula.
double pearson_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

}  // namespace

TEST(StateChanges, ConstantStateHasNone) {
  const std::vector<TelemetryRecord> s{at(0), at(5), at(9)};
  EXPECT_TRUE(detect_state_changes(s).empty());
}

TEST(StateChanges, DwellOfPriorState) {
  const std::vector<TelemetryRecord> s{at(0, VehicleState::Startup), at(10, VehicleState::Running)};
  const auto t = detect_state_changes(s);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].from_state, VehicleState::Startup);
  EXPECT_EQ(t[0].to_state, VehicleState::Running);
  EXPECT_EQ(t[0].at, 10);
  EXPECT_EQ(t[0].dwell, 10);
}

TEST(StateChanges, DwellSpansRepeatedRecords) {
  const std::vector<TelemetryRecord> s{at(0, VehicleState::Running), at(30, VehicleState::Running),
                                       at(70, VehicleState::Shutdown)};
  const auto t = detect_state_changes(s);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].dwell, 70);
}

TEST(Anomalies, CleanStream) {
  const std::vector<TelemetryRecord> s{at(0, VehicleState::Startup), at(60), at(120), at(600, VehicleState::Shutdown)};
  EXPECT_TRUE(detect_anomalies(s, {}).empty());
}

TEST(Anomalies, ImmediateShutdown) {
  const std::vector<TelemetryRecord> s{at(0, VehicleState::Startup), at(1, VehicleState::Shutdown)};
  AnomalyConfig cfg;
  cfg.min_session_s = 60;
  const auto a = detect_anomalies(s, cfg);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0], (Anomaly{AnomalyClass::State, "EV1", 1, AnomalyCode::ImmediateShutdown}));
  EXPECT_EQ(detect_state_changes(s)[0].dwell, 1);
}

TEST(Anomalies, FuelWhileCharging) {
  const std::vector<TelemetryRecord> s{at(0, VehicleState::Shutdown, ChargingStatus::ParkedCharging, OperationMode::Fuel)};
  const auto a = detect_anomalies(s, {});
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].anomaly_class, AnomalyClass::Mode);
  EXPECT_EQ(a[0].detail, AnomalyCode::FuelWhileCharging);
}

TEST(Anomalies, TemporalCodes) {
  AnomalyConfig cfg;
  cfg.max_gap_s = 100;
  const std::vector<TelemetryRecord> s{at(0), at(50), at(50), at(40), at(500)};
  const auto a = detect_anomalies(s, cfg);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].detail, AnomalyCode::NonMonotoneTimestamp);
  EXPECT_EQ(a[1].detail, AnomalyCode::DuplicateTimestamp);
  EXPECT_EQ(a[2].detail, AnomalyCode::TimeGap);
  for (const auto& x : a) EXPECT_EQ(x.anomaly_class, AnomalyClass::Temporal);
}

TEST(Anomalies, SocDropWhileCharging) {
  const std::vector<TelemetryRecord> s{
      at(0, VehicleState::Shutdown, ChargingStatus::ParkedCharging, OperationMode::PureElectric, 40),
      at(900, VehicleState::Shutdown, ChargingStatus::ParkedCharging, OperationMode::PureElectric, 38)};
  const auto a = detect_anomalies(s, {});
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0], (Anomaly{AnomalyClass::State, "EV1", 900, AnomalyCode::SocDropWhileCharging}));
}

TEST(Anomalies, ShortModeDwell) {
  const std::vector<TelemetryRecord> s{at(0), at(10, VehicleState::Running, ChargingStatus::NotCharging, OperationMode::Hybrid),
                                       at(20), at(500)};
  AnomalyConfig cfg;
  cfg.min_mode_dwell_s = 60;
  const auto a = detect_anomalies(s, cfg);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0], (Anomaly{AnomalyClass::Mode, "EV1", 10, AnomalyCode::ShortModeDwell}));
}

TEST(Anomalies, ImmediateShutdownMonotoneInThreshold) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TelemetryRecord> s;
    EpochSeconds t = 0;
    for (int k = 0; k < 20; ++k) {
      s.push_back(at(t, VehicleState::Startup));
      t += 1 + static_cast<EpochSeconds>(rng() % 200);
      s.push_back(at(t, VehicleState::Shutdown));
      t += 1 + static_cast<EpochSeconds>(rng() % 200);
    }
    auto shutdowns = [&](EpochSeconds min_session) {
      AnomalyConfig cfg;
      cfg.min_session_s = min_session;
      std::vector<EpochSeconds> out;
      for (const auto& a : detect_anomalies(s, cfg)) {
        if (a.detail == AnomalyCode::ImmediateShutdown) out.push_back(a.at);
      }
      return out;
    };
    for (EpochSeconds lo = 0; lo <= 200; lo += 40) {
      const auto small = shutdowns(lo), large = shutdowns(lo + 25);
      EXPECT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
    }
  }
}

TEST(ChargingSessions, NoneWithoutCharging) {
  const std::vector<TelemetryRecord> s{at(0), at(10)};
  EXPECT_TRUE(extract_charging_sessions(s).empty());
}

TEST(ChargingSessions, SingleParkedSession) {
  const auto P = ChargingStatus::ParkedCharging;
  const std::vector<TelemetryRecord> s{at(0, VehicleState::Shutdown, P, OperationMode::PureElectric, 20),
                                       at(900, VehicleState::Shutdown, P, OperationMode::PureElectric, 40),
                                       at(1800, VehicleState::Shutdown, P, OperationMode::PureElectric, 60)};
  const auto sessions = extract_charging_sessions(s);
  ASSERT_EQ(sessions.size(), 1u);
  EXPECT_EQ(sessions[0].kind, SessionKind::Parked);
  EXPECT_EQ(sessions[0].soc_start, 20);
  EXPECT_EQ(sessions[0].soc_end, 60);
  EXPECT_EQ(sessions[0].start, 0);
  EXPECT_EQ(sessions[0].end, 2700);  // median gap past the last record
  EXPECT_GT(sessions[0].end, sessions[0].start);
}

TEST(ChargingSessions, KindsFollowStatus) {
  const std::vector<TelemetryRecord> s{at(0, VehicleState::Shutdown, ChargingStatus::ParkedCharging),
                                       at(10, VehicleState::Shutdown, ChargingStatus::NotCharging),
                                       at(20, VehicleState::Running, ChargingStatus::DrivingCharging),
                                       at(30, VehicleState::Running, ChargingStatus::DrivingCharging)};
  const auto sessions = extract_charging_sessions(s);
  ASSERT_EQ(sessions.size(), 2u);
  EXPECT_EQ(sessions[0].kind, SessionKind::Parked);
  EXPECT_EQ(sessions[0].end, 10);
  EXPECT_EQ(sessions[1].kind, SessionKind::WhileDriving);
}

TEST(ChargingSessions, CompleteTerminatesSession) {
  const std::vector<TelemetryRecord> s{at(0, VehicleState::Shutdown, ChargingStatus::ParkedCharging),
                                       at(10, VehicleState::Shutdown, ChargingStatus::ChargingComplete),
                                       at(20, VehicleState::Shutdown, ChargingStatus::ParkedCharging)};
  EXPECT_EQ(extract_charging_sessions(s).size(), 2u);
}

TEST(ModeStatistics, AllPureElectric) {
  const std::vector<TelemetryRecord> s{at(0), at(10), at(20)};
  const auto m = mode_statistics(s);
  EXPECT_DOUBLE_EQ(m.share(OperationMode::PureElectric), 1.0);
  EXPECT_TRUE(m.switches.empty());
}

TEST(ModeStatistics, HalfAndHalf) {
  const auto H = OperationMode::Hybrid;
  const std::vector<TelemetryRecord> s{at(0), at(10), at(20, VehicleState::Running, ChargingStatus::NotCharging, H),
                                       at(30, VehicleState::Running, ChargingStatus::NotCharging, H)};
  const auto m = mode_statistics(s);
  EXPECT_DOUBLE_EQ(m.share(OperationMode::PureElectric), 0.5);
  EXPECT_DOUBLE_EQ(m.share(H), 0.5);
}

TEST(ModeStatistics, SwitchCount) {
  const auto H = OperationMode::Hybrid;
  const auto N = ChargingStatus::NotCharging;
  const std::vector<TelemetryRecord> s{at(0), at(10, VehicleState::Running, N, H), at(20),
                                       at(30, VehicleState::Running, N, H)};
  const auto m = mode_statistics(s);
  ASSERT_EQ(m.switches.size(), 3u);
  EXPECT_EQ(m.switches[0], (ModeSwitch{10, OperationMode::PureElectric, H}));
}

TEST(ModeStatistics, EmptyStreamThrows) {
  try {
    mode_statistics({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyStream);
  }
}

TEST(ModeStatistics, SharesSumToOne) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TelemetryRecord> s;
    EpochSeconds t = 0;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      s.push_back(at(t, VehicleState::Running, ChargingStatus::NotCharging, static_cast<OperationMode>(rng() % 3)));
      t += static_cast<EpochSeconds>(rng() % 100);
    }
    const auto m = mode_statistics(s);
    EXPECT_NEAR(m.shares[0] + m.shares[1] + m.shares[2], 1.0, 1e-9);
  }
}

TEST(Pearson, Examples) {
  EXPECT_DOUBLE_EQ(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}), 1.0);
  EXPECT_DOUBLE_EQ(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), -1.0);
  const std::vector<double> a{1, 2, 3}, b{1, 3, 2};
  // Deviations (-1,0,1) and (-1,1,0): covariance 1, variances 2 and 2.
  EXPECT_DOUBLE_EQ(pearson_oracle(a, b), 0.5);
  EXPECT_NEAR(pearson(a, b), 0.5, 1e-15);
}

TEST(Pearson, Errors) {
  auto code = [](std::vector<double> a, std::vector<double> b) {
    try {
      pearson(a, b);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  EXPECT_EQ(code({1, 1, 1}, {1, 2, 3}), ErrorCode::DegenerateSeries);
  EXPECT_EQ(code({1, 2}, {1, 2, 3}), ErrorCode::BadInput);
  EXPECT_EQ(code({1}, {1}), ErrorCode::BadInput);
}

TEST(Pearson, SymmetryAndAffineInvariance) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 50;
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = normal(rng);
    for (auto& x : b) x = normal(rng);
    EXPECT_NEAR(pearson(a, b), pearson(b, a), 1e-12);
    EXPECT_NEAR(pearson(a, b), pearson_oracle(a, b), 1e-9);
    const double alpha = normal(rng) * 3.0, beta = normal(rng);
    if (std::abs(alpha) < 1e-3) continue;
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = alpha * a[i] + beta;
    EXPECT_NEAR(pearson(a, c), alpha > 0 ? 1.0 : -1.0, 1e-9);
  }
}

TEST(CorrelationReport, ConstantSocOmitsEveryPair) {
  std::vector<TelemetryRecord> s;
  for (int i = 0; i < 10; ++i) {
    auto r = at(i * 60, i % 5 == 0 ? VehicleState::Startup : (i % 5 == 4 ? VehicleState::Shutdown : VehicleState::Running));
    r.sum_mileage = i;
    r.sum_voltage = 300 + i;
    r.speed = i;
    s.push_back(r);
  }
  const auto report = correlation_report(s);
  EXPECT_TRUE(report.pairs.empty());
  ASSERT_EQ(report.omitted.size(), 6u);
  for (const auto& o : report.omitted) EXPECT_EQ(o.reason, "DegenerateSeries");
}

TEST(Profile, QuietVehicleHasZeroRates) {
  const std::vector<TelemetryRecord> s{at(0, VehicleState::Startup), at(60), at(120, VehicleState::Shutdown)};
  const auto p = build_profile(s, {});
  EXPECT_EQ(p.overcharge_rate, 0.0);
  EXPECT_EQ(p.deep_discharge_rate, 0.0);
  EXPECT_EQ(p.high_speed_fraction, 0.0);
  EXPECT_EQ(p.charge_while_driving_share, 0.0);
  EXPECT_EQ(p.mode_switch_count, 0u);
  EXPECT_EQ(p.pure_electric_share, 1.0);
}

TEST(Profile, EveryChargeToFullIsOvercharge) {
  const auto P = ChargingStatus::ParkedCharging;
  const auto S = VehicleState::Shutdown;
  const std::vector<TelemetryRecord> s{at(0, S, P, OperationMode::PureElectric, 80),
                                       at(10, S, P, OperationMode::PureElectric, 100),
                                       at(20), at(30, S, P, OperationMode::PureElectric, 100)};
  EXPECT_EQ(build_profile(s, {}).overcharge_rate, 1.0);
}

TEST(Profile, HalfTimeAtHighSpeed) {
  std::vector<TelemetryRecord> s;
  for (int i = 0; i < 4; ++i) {
    auto r = at(i * 60);
    r.speed = i < 2 ? 120 : 60;
    s.push_back(r);
  }
  EXPECT_DOUBLE_EQ(build_profile(s, {}).high_speed_fraction, 0.5);
}

TEST(Profile, InvariantUnderTimeTranslation) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TelemetryRecord> s;
    EpochSeconds t = 1704067200;
    for (int i = 0; i < 30; ++i) {
      auto r = at(t, static_cast<VehicleState>(rng() % 3), static_cast<ChargingStatus>(rng() % 4),
                  static_cast<OperationMode>(rng() % 3), static_cast<double>(rng() % 101));
      r.speed = static_cast<double>(rng() % 150);
      s.push_back(r);
      t += 1 + static_cast<EpochSeconds>(rng() % 600);
    }
    auto shifted = s;
    for (auto& r : shifted) r.timestamp += 123457;
    const auto p = build_profile(s, {});
    EXPECT_EQ(p, build_profile(shifted, {}));
    for (double f : {p.overcharge_rate, p.deep_discharge_rate, p.high_speed_fraction, p.pure_electric_share,
                     p.charge_while_driving_share}) {
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
    }
  }
}

TEST(Profile, EmptyStreamThrows) { EXPECT_THROW(build_profile({}, {}), Error); }

TEST(Trips, DistanceAndSocAtShutdown) {
  auto a = at(0, VehicleState::Startup);
  a.sum_mileage = 100;
  auto b = at(60);
  b.sum_mileage = 101;
  auto c = at(120, VehicleState::Shutdown);
  c.sum_mileage = 103;
  c.soc = 42;
  const std::vector<TelemetryRecord> s{a, b, c};
  const auto trips = extract_trips(s);
  ASSERT_EQ(trips.size(), 1u);
  EXPECT_DOUBLE_EQ(trips[0].distance_km, 3.0);
  EXPECT_DOUBLE_EQ(trips[0].soc_end, 42.0);
}
