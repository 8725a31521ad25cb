#pragma once

#include <cstdint>
#include <vector>

#include "nevsim/behavior.hpp"
#include "nevsim/telemetry.hpp"

namespace nevsim::fleet {

/// Parameters of the synthetic fleet. Every vehicle charges overnight when its
/// SOC is low and makes three trips a day; odd-numbered vehicles are hybrids
/// that fall back to engine charging below 25% SOC. Driving speed rises as
/// SOC falls, so SOC correlates negatively with speed, current, power and
/// trip distance, and positively with pack voltage.
struct FleetSpec {
  int vehicles = 4;
  int days = 30;
  telemetry::EpochSeconds start = 1704067200;  // 2024-01-01 00:00:00 UTC
  int drive_sample_s = 60;
  int charge_sample_s = 900;
  std::uint64_t seed = 7;
  int inject_immediate_shutdowns = 0;
  int inject_fuel_while_charging = 0;
};

struct InjectedEvent {
  std::string vehicle_id;
  telemetry::EpochSeconds at = 0;
  behavior::AnomalyCode code = behavior::AnomalyCode::ImmediateShutdown;

  bool operator==(const InjectedEvent&) const = default;
};

struct FleetTrace {
  std::vector<telemetry::TelemetryRecord> records;  // sorted by (vehicle_id, timestamp)
  std::vector<InjectedEvent> injected;              // sorted by (vehicle_id, at)
};

/// Deterministic in `spec`. Throws Error{BadInput} on nonpositive sizes or
/// when more events are requested than the trace can hold.
FleetTrace generate_fleet(const FleetSpec& spec);

}  // namespace nevsim::fleet
