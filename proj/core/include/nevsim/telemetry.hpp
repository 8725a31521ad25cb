#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nevsim::telemetry {

/// Seconds since the Unix epoch, UTC.
using EpochSeconds = std::int64_t;

enum class VehicleState { Startup, Running, Shutdown };
enum class ChargingStatus { ParkedCharging, DrivingCharging, NotCharging, ChargingComplete };
enum class OperationMode { PureElectric, Hybrid, Fuel };

// Lowercase snake-case wire names, e.g. "parked_charging".
std::string_view to_string(VehicleState v);
std::string_view to_string(ChargingStatus v);
std::string_view to_string(OperationMode v);
std::optional<VehicleState> parse_vehicle_state(std::string_view s);
std::optional<ChargingStatus> parse_charging_status(std::string_view s);
std::optional<OperationMode> parse_operation_mode(std::string_view s);

inline bool is_charging(ChargingStatus s) {
  return s == ChargingStatus::ParkedCharging || s == ChargingStatus::DrivingCharging;
}

/// One timestamped fleet observation.
struct TelemetryRecord {
  EpochSeconds timestamp = 0;
  std::string vehicle_id;
  VehicleState vehicle_state = VehicleState::Shutdown;
  ChargingStatus charging_status = ChargingStatus::NotCharging;
  OperationMode operation_mode = OperationMode::PureElectric;
  double soc = 0.0;          // percent, [0, 100]
  double sum_mileage = 0.0;  // km, cumulative
  double sum_voltage = 0.0;  // V
  double sum_current = 0.0;  // A, negative while charging
  double speed = 0.0;        // km/h
  double power = 0.0;        // kW

  bool operator==(const TelemetryRecord&) const = default;
};

struct Rejection {
  std::size_t row = 0;  // 1-based data row, header excluded
  std::string reason;

  bool operator==(const Rejection&) const = default;
};

struct IngestReport {
  std::size_t accepted_count = 0;
  std::size_t rejected_count = 0;
  std::vector<Rejection> rejection_reasons;
};

struct ParsedTelemetry {
  std::vector<TelemetryRecord> records;
  IngestReport report;
};

/// Parses "YYYY-MM-DD hh:mm:ss" (UTC) into epoch seconds.
/// Throws Error{Parse} naming the offending field.
EpochSeconds normalize_timestamp(std::string_view datetime_text);

/// Inverse of normalize_timestamp.
std::string format_timestamp(EpochSeconds t);

/// Reads CSV telemetry with a header row. Malformed rows are quarantined in
/// the report; a missing mandatory column throws Error{Schema}. Output is
/// stably sorted by (vehicle_id, timestamp).
ParsedTelemetry parse_telemetry(std::istream& source);
ParsedTelemetry parse_telemetry_file(const std::filesystem::path& path);

/// Writes records in the canonical CSV schema, power column included.
void write_telemetry_csv(std::ostream& out, std::span<const TelemetryRecord> records);

enum class StreamViolationCode { MileageDecrease, DuplicateTimestamp };
std::string_view to_string(StreamViolationCode c);

struct StreamViolation {
  std::size_t index = 0;
  StreamViolationCode code = StreamViolationCode::MileageDecrease;

  bool operator==(const StreamViolation&) const = default;
};

/// Checks a (vehicle_id, timestamp)-sorted stream for per-vehicle mileage
/// decreases and duplicate timestamps.
std::vector<StreamViolation> validate_stream(std::span<const TelemetryRecord> records);

/// Stable sort by (vehicle_id, timestamp).
void sort_records(std::vector<TelemetryRecord>& records);

/// Contiguous per-vehicle slices of a sorted stream, in vehicle_id order.
struct VehicleTrace {
  std::string_view vehicle_id;
  std::span<const TelemetryRecord> records;
};
std::vector<VehicleTrace> split_by_vehicle(std::span<const TelemetryRecord> sorted);

}  // namespace nevsim::telemetry
