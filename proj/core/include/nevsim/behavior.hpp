#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nevsim/telemetry.hpp"

namespace nevsim::behavior {

using telemetry::ChargingStatus;
using telemetry::EpochSeconds;
using telemetry::OperationMode;
using telemetry::TelemetryRecord;
using telemetry::VehicleState;

struct StateTransition {
  std::string vehicle_id;
  VehicleState from_state = VehicleState::Shutdown;
  VehicleState to_state = VehicleState::Startup;
  EpochSeconds at = 0;
  EpochSeconds dwell = 0;  // how long from_state lasted

  bool operator==(const StateTransition&) const = default;
};

enum class SessionKind { Parked, WhileDriving };
std::string_view to_string(SessionKind k);

struct ChargingSession {
  std::string vehicle_id;
  SessionKind kind = SessionKind::Parked;
  EpochSeconds start = 0;
  EpochSeconds end = 0;
  double soc_start = 0.0;
  double soc_end = 0.0;
  double mean_power = 0.0;  // kW

  bool operator==(const ChargingSession&) const = default;
};

enum class AnomalyClass { Temporal, State, Mode };

enum class AnomalyCode {
  // Temporal
  NonMonotoneTimestamp,
  DuplicateTimestamp,
  TimeGap,
  // State
  ImmediateShutdown,
  SocDropWhileCharging,
  // Mode
  FuelWhileCharging,
  ShortModeDwell,
};

std::string_view to_string(AnomalyClass c);
std::string_view to_string(AnomalyCode c);
AnomalyClass class_of(AnomalyCode c);

struct Anomaly {
  AnomalyClass anomaly_class = AnomalyClass::Temporal;
  std::string vehicle_id;
  EpochSeconds at = 0;
  AnomalyCode detail = AnomalyCode::TimeGap;

  bool operator==(const Anomaly&) const = default;
};

struct AnomalyConfig {
  EpochSeconds max_gap_s = 86400;
  EpochSeconds min_session_s = 60;
  EpochSeconds min_mode_dwell_s = 60;
};

struct ProfileConfig {
  double high_soc = 95.0;
  double low_soc = 20.0;
  double high_speed_kmh = 100.0;
};

struct BehaviorProfile {
  std::string vehicle_id;
  double overcharge_rate = 0.0;
  double deep_discharge_rate = 0.0;
  double high_speed_fraction = 0.0;
  std::size_t mode_switch_count = 0;
  double pure_electric_share = 0.0;
  double charge_while_driving_share = 0.0;

  bool operator==(const BehaviorProfile&) const = default;
};

struct ModeSwitch {
  EpochSeconds at = 0;
  OperationMode from = OperationMode::PureElectric;
  OperationMode to = OperationMode::PureElectric;

  bool operator==(const ModeSwitch&) const = default;
};

struct ModeStatistics {
  /// Time share indexed by OperationMode.
  std::array<double, 3> shares{};
  std::vector<ModeSwitch> switches;

  double share(OperationMode m) const { return shares[static_cast<std::size_t>(m)]; }
};

struct CorrelationPair {
  std::string a;
  std::string b;
  double r = 0.0;
  std::size_t samples = 0;

  bool operator==(const CorrelationPair&) const = default;
};

struct OmittedPair {
  std::string a;
  std::string b;
  std::string reason;

  bool operator==(const OmittedPair&) const = default;
};

struct CorrelationReport {
  std::vector<CorrelationPair> pairs;
  std::vector<OmittedPair> omitted;

  bool operator==(const CorrelationReport&) const = default;

  const CorrelationPair* find(std::string_view a, std::string_view b) const;
};

// Single-vehicle operations expect one vehicle's records sorted by time.

std::vector<StateTransition> detect_state_changes(std::span<const TelemetryRecord> records);

std::vector<Anomaly> detect_anomalies(std::span<const TelemetryRecord> records,
                                      const AnomalyConfig& config);

/// Maximal runs of a single charging status in {ParkedCharging, DrivingCharging}.
/// A session ends at the first record that leaves the run; a run closing the
/// stream ends one median sampling interval after its last record.
std::vector<ChargingSession> extract_charging_sessions(std::span<const TelemetryRecord> records);

/// Throws Error{EmptyStream} on an empty stream.
ModeStatistics mode_statistics(std::span<const TelemetryRecord> records);

/// Throws Error{EmptyStream} on an empty stream.
BehaviorProfile build_profile(std::span<const TelemetryRecord> records, const ProfileConfig& config);

/// Sample Pearson correlation. Throws Error{BadInput} on length mismatch or
/// fewer than two samples, Error{DegenerateSeries} on zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

/// Pooled over a sorted multi-vehicle stream: soc against sum_mileage,
/// sum_voltage, sum_current, power, per-trip distance and speed.
CorrelationReport correlation_report(std::span<const TelemetryRecord> sorted);

/// Trip = first Startup record after a non-Startup record up to the next
/// Shutdown record. Distance is the sum_mileage delta; soc is taken at the
/// Shutdown record.
struct Trip {
  EpochSeconds start = 0;
  EpochSeconds end = 0;
  double distance_km = 0.0;
  double soc_end = 0.0;
};
std::vector<Trip> extract_trips(std::span<const TelemetryRecord> records);

/// Time each record stands for: gap to the next record; the last record gets
/// the median gap of the stream.
std::vector<double> record_dwells(std::span<const TelemetryRecord> records);

// Fleet-level conveniences over a (vehicle_id, timestamp)-sorted stream.
// Results are ordered by vehicle_id.

std::vector<Anomaly> detect_fleet_anomalies(std::span<const TelemetryRecord> sorted,
                                            const AnomalyConfig& config);
std::vector<BehaviorProfile> build_fleet_profiles(std::span<const TelemetryRecord> sorted,
                                                  const ProfileConfig& config);

/// Records of vehicles that report at least one Hybrid-mode sample.
std::vector<TelemetryRecord> hybrid_vehicle_records(std::span<const TelemetryRecord> sorted);

}  // namespace nevsim::behavior
