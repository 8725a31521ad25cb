#include "nevsim/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>

#include "nevsim/error.hpp"
#include "nevsim/random.hpp"

namespace nevsim::fleet {

namespace {

using telemetry::ChargingStatus;
using telemetry::EpochSeconds;
using telemetry::OperationMode;
using telemetry::TelemetryRecord;
using telemetry::VehicleState;

constexpr double kBatteryKwh = 60.0;
constexpr double kChargerKw = 11.0;
constexpr double kAuxAmps = 3.0;
constexpr std::array<double, 3> kTripHours{7.5, 12.5, 17.5};
constexpr EpochSeconds kInjectedStartupOffset = 10 * 3600 + 30 * 60;
constexpr EpochSeconds kInjectedShutdownDelay = 5;

struct Vehicle {
  std::string id;
  bool hybrid = false;
  double charge_target = 90.0;
  double charge_below = 60.0;
  double soc = 80.0;
  double mileage = 0.0;
  OperationMode mode = OperationMode::PureElectric;
  std::mt19937_64 rng;
};

double pack_voltage(double soc, std::mt19937_64& rng) {
  return 300.0 + 1.0 * soc + 1.5 * standard_normal(rng);
}

TelemetryRecord make(const Vehicle& v, EpochSeconds t, VehicleState state, ChargingStatus status) {
  TelemetryRecord r;
  r.timestamp = t;
  r.vehicle_id = v.id;
  r.vehicle_state = state;
  r.charging_status = status;
  r.operation_mode = v.mode;
  r.soc = v.soc;
  r.sum_mileage = v.mileage;
  return r;
}

// Rounds to fixed decimals so CSV round trips are exact.
double quantize(double x, double scale) { return std::round(x * scale) / scale; }

void finish(TelemetryRecord& r, double voltage, double current) {
  r.soc = quantize(r.soc, 1e3);
  r.sum_mileage = quantize(r.sum_mileage, 1e3);
  r.sum_voltage = quantize(voltage, 1e2);
  r.sum_current = quantize(current, 1e2);
  r.speed = quantize(r.speed, 1e2);
  r.power = quantize(r.sum_voltage * r.sum_current / 1000.0, 1e4);
}

void emit_parked(Vehicle& v, EpochSeconds t, VehicleState state, std::vector<TelemetryRecord>& out) {
  auto r = make(v, t, state, ChargingStatus::NotCharging);
  finish(r, pack_voltage(v.soc, v.rng), kAuxAmps);
  out.push_back(r);
}

void night_charge(Vehicle& v, EpochSeconds day0, const FleetSpec& spec, std::vector<TelemetryRecord>& out) {
  if (v.soc >= v.charge_below) return;
  v.mode = OperationMode::PureElectric;
  const double step = 100.0 * kChargerKw * spec.charge_sample_s / 3600.0 / kBatteryKwh;
  EpochSeconds t = day0;
  while (v.soc < v.charge_target) {
    auto r = make(v, t, VehicleState::Shutdown, ChargingStatus::ParkedCharging);
    const double voltage = pack_voltage(v.soc, v.rng);
    finish(r, voltage, -kChargerKw * 1000.0 / voltage);
    out.push_back(r);
    v.soc = std::min(v.charge_target, v.soc + step);
    t += spec.charge_sample_s;
  }
  auto done = make(v, t, VehicleState::Shutdown, ChargingStatus::ChargingComplete);
  finish(done, pack_voltage(v.soc, v.rng), 0.0);
  out.push_back(done);
}

void drive(Vehicle& v, EpochSeconds start, EpochSeconds duration, const FleetSpec& spec,
           std::vector<TelemetryRecord>& out) {
  if (v.hybrid && v.soc >= 25.0) v.mode = OperationMode::PureElectric;
  emit_parked(v, start, VehicleState::Startup, out);
  const double level = uniform(v.rng, 30.0, 60.0);
  const double dt = spec.drive_sample_s;
  EpochSeconds t = start + spec.drive_sample_s;
  EpochSeconds last = start;
  const EpochSeconds end = start + duration;
  bool engine_charging = v.hybrid && v.mode == OperationMode::Hybrid;
  for (; t < end; t += spec.drive_sample_s) {
    if (v.hybrid && !engine_charging && v.soc < 25.0) {
      engine_charging = true;
      v.mode = OperationMode::Hybrid;
    } else if (engine_charging && v.soc > 35.0) {
      engine_charging = false;
      v.mode = OperationMode::PureElectric;
    }
    const double speed = std::clamp(level + 1.0 * (80.0 - v.soc) + 5.0 * standard_normal(v.rng), 5.0, 150.0);
    const double voltage = pack_voltage(v.soc, v.rng);
    double power_kw = 0.08 * speed + 0.0008 * speed * speed + 0.5 * standard_normal(v.rng);
    auto status = ChargingStatus::NotCharging;
    if (engine_charging) {
      status = ChargingStatus::DrivingCharging;
      power_kw = -2.0;
    }
    auto r = make(v, t, VehicleState::Running, status);
    r.speed = speed;
    finish(r, voltage, power_kw * 1000.0 / voltage);
    out.push_back(r);
    last = t;

    v.mileage += speed * dt / 3600.0;
    v.soc = std::clamp(v.soc - 100.0 * power_kw * dt / 3600.0 / kBatteryKwh, 0.0, 100.0);
    if (!v.hybrid && v.soc < 8.0) break;
  }
  emit_parked(v, last + spec.drive_sample_s, VehicleState::Shutdown, out);
}

void inject_fuel(std::vector<TelemetryRecord>& records, int count, std::vector<InjectedEvent>& injected) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    const auto& a = records[i - 1];
    const auto& b = records[i];
    const auto& c = records[i + 1];
    if (a.charging_status == ChargingStatus::ParkedCharging && b.charging_status == ChargingStatus::ParkedCharging &&
        c.charging_status == ChargingStatus::ParkedCharging && a.operation_mode == b.operation_mode &&
        b.operation_mode == c.operation_mode) {
      candidates.push_back(i);
    }
  }
  // Keep picks at least two records apart so every injected record is
  // surrounded by unmodified neighbors.
  std::vector<std::size_t> spaced;
  for (std::size_t i : candidates) {
    if (spaced.empty() || i > spaced.back() + 2) spaced.push_back(i);
  }
  if (static_cast<int>(spaced.size()) < count) {
    throw Error(ErrorCode::BadInput, "generate_fleet: not enough charging records for fuel injections");
  }
  for (int j = 0; j < count; ++j) {
    const auto idx = spaced[static_cast<std::size_t>(j) * spaced.size() / static_cast<std::size_t>(count)];
    records[idx].operation_mode = OperationMode::Fuel;
    injected.push_back({records[idx].vehicle_id, records[idx].timestamp, behavior::AnomalyCode::FuelWhileCharging});
  }
}

}  // namespace

FleetTrace generate_fleet(const FleetSpec& spec) {
  if (spec.vehicles < 1 || spec.days < 1 || spec.drive_sample_s < 1 || spec.charge_sample_s < 1 ||
      spec.inject_immediate_shutdowns < 0 || spec.inject_fuel_while_charging < 0) {
    throw Error(ErrorCode::BadInput, "generate_fleet: sizes must be positive");
  }
  if (spec.inject_immediate_shutdowns > spec.vehicles * spec.days) {
    throw Error(ErrorCode::BadInput, "generate_fleet: at most one injected shutdown per vehicle-day");
  }

  FleetTrace trace;
  for (int vi = 0; vi < spec.vehicles; ++vi) {
    Vehicle v;
    v.id = fmt::format("EV{:03d}", vi + 1);
    v.hybrid = vi % 2 == 1;
    v.rng.seed(derive_seed(spec.seed, v.id));
    v.charge_target = vi % 3 == 0 ? 100.0 : uniform(v.rng, 80.0, 92.0);
    v.charge_below = uniform(v.rng, 50.0, 65.0);
    v.soc = uniform(v.rng, 60.0, 90.0);
    v.mileage = std::round(uniform(v.rng, 5000.0, 20000.0));

    // Injected shutdown j lands on vehicle j % vehicles, day j / vehicles.
    std::set<int> shutdown_days;
    for (int j = vi; j < spec.inject_immediate_shutdowns; j += spec.vehicles) shutdown_days.insert(j / spec.vehicles);

    std::vector<TelemetryRecord> records;
    for (int day = 0; day < spec.days; ++day) {
      const EpochSeconds day0 = spec.start + static_cast<EpochSeconds>(day) * 86400;
      night_charge(v, day0, spec, records);
      for (std::size_t trip = 0; trip < kTripHours.size(); ++trip) {
        const auto start = day0 + static_cast<EpochSeconds>(kTripHours[trip] * 3600.0) +
                           static_cast<EpochSeconds>(uniform(v.rng, 0.0, 30.0)) * 60;
        const auto duration = static_cast<EpochSeconds>(uniform(v.rng, 20.0, 80.0)) * 60;
        drive(v, start, duration, spec, records);
        if (trip == 0 && shutdown_days.count(day)) {
          const auto t = day0 + kInjectedStartupOffset;
          emit_parked(v, t, VehicleState::Startup, records);
          emit_parked(v, t + kInjectedShutdownDelay, VehicleState::Shutdown, records);
          trace.injected.push_back({v.id, t + kInjectedShutdownDelay, behavior::AnomalyCode::ImmediateShutdown});
        }
      }
    }
    trace.records.insert(trace.records.end(), records.begin(), records.end());
  }

  if (spec.inject_fuel_while_charging > 0) {
    // Spread fuel injections over vehicles, then over each vehicle's charging runs.
    std::vector<std::vector<TelemetryRecord>> per_vehicle;
    for (const auto& t : telemetry::split_by_vehicle(trace.records)) {
      per_vehicle.emplace_back(t.records.begin(), t.records.end());
    }
    const auto n = static_cast<int>(per_vehicle.size());
    for (int vi = 0; vi < n; ++vi) {
      const int count = spec.inject_fuel_while_charging / n + (vi < spec.inject_fuel_while_charging % n ? 1 : 0);
      if (count > 0) inject_fuel(per_vehicle[static_cast<std::size_t>(vi)], count, trace.injected);
    }
    trace.records.clear();
    for (auto& part : per_vehicle) trace.records.insert(trace.records.end(), part.begin(), part.end());
  }

  std::sort(trace.injected.begin(), trace.injected.end(), [](const auto& a, const auto& b) {
    if (a.vehicle_id != b.vehicle_id) return a.vehicle_id < b.vehicle_id;
    return a.at < b.at;
  });
  return trace;
}

}  // namespace nevsim::fleet
