#include "nevsim/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "nevsim/error.hpp"

namespace nevsim::behavior {

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// Weighted share of records satisfying `pred` among those satisfying `in_scope`.
// Falls back to record counts when every in-scope dwell is zero.
template <typename Scope, typename Pred>
double time_fraction(std::span<const TelemetryRecord> records, const std::vector<double>& dwell,
                     Scope in_scope, Pred pred) {
  double total = 0.0, hit = 0.0;
  std::size_t n_total = 0, n_hit = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!in_scope(records[i])) continue;
    total += dwell[i];
    ++n_total;
    if (pred(records[i])) {
      hit += dwell[i];
      ++n_hit;
    }
  }
  if (n_total == 0) return 0.0;
  if (total <= 0.0) return static_cast<double>(n_hit) / static_cast<double>(n_total);
  return std::clamp(hit / total, 0.0, 1.0);
}

}  // namespace

std::string_view to_string(SessionKind k) {
  return k == SessionKind::Parked ? "parked" : "while_driving";
}

std::string_view to_string(AnomalyClass c) {
  switch (c) {
    case AnomalyClass::Temporal: return "temporal";
    case AnomalyClass::State: return "state";
    case AnomalyClass::Mode: return "mode";
  }
  return "unknown";
}

std::string_view to_string(AnomalyCode c) {
  switch (c) {
    case AnomalyCode::NonMonotoneTimestamp: return "NonMonotoneTimestamp";
    case AnomalyCode::DuplicateTimestamp: return "DuplicateTimestamp";
    case AnomalyCode::TimeGap: return "TimeGap";
    case AnomalyCode::ImmediateShutdown: return "ImmediateShutdown";
    case AnomalyCode::SocDropWhileCharging: return "SocDropWhileCharging";
    case AnomalyCode::FuelWhileCharging: return "FuelWhileCharging";
    case AnomalyCode::ShortModeDwell: return "ShortModeDwell";
  }
  return "Unknown";
}

AnomalyClass class_of(AnomalyCode c) {
  switch (c) {
    case AnomalyCode::NonMonotoneTimestamp:
    case AnomalyCode::DuplicateTimestamp:
    case AnomalyCode::TimeGap:
      return AnomalyClass::Temporal;
    case AnomalyCode::ImmediateShutdown:
    case AnomalyCode::SocDropWhileCharging:
      return AnomalyClass::State;
    case AnomalyCode::FuelWhileCharging:
    case AnomalyCode::ShortModeDwell:
      return AnomalyClass::Mode;
  }
  return AnomalyClass::Temporal;
}

const CorrelationPair* CorrelationReport::find(std::string_view a, std::string_view b) const {
  for (const auto& p : pairs) {
    if ((p.a == a && p.b == b) || (p.a == b && p.b == a)) return &p;
  }
  return nullptr;
}

std::vector<double> record_dwells(std::span<const TelemetryRecord> records) {
  std::vector<double> dwell(records.size(), 0.0);
  if (records.size() < 2) return dwell;
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    dwell[i] = std::max<double>(0.0, static_cast<double>(records[i + 1].timestamp - records[i].timestamp));
  }
  dwell.back() = median({dwell.begin(), dwell.end() - 1});
  return dwell;
}

std::vector<StateTransition> detect_state_changes(std::span<const TelemetryRecord> records) {
  std::vector<StateTransition> out;
  if (records.empty()) return out;
  EpochSeconds state_since = records.front().timestamp;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& prev = records[i - 1];
    const auto& cur = records[i];
    if (cur.vehicle_state == prev.vehicle_state) continue;
    out.push_back({cur.vehicle_id, prev.vehicle_state, cur.vehicle_state, cur.timestamp,
                   std::max<EpochSeconds>(0, cur.timestamp - state_since)});
    state_since = cur.timestamp;
  }
  return out;
}

std::vector<Anomaly> detect_anomalies(std::span<const TelemetryRecord> records,
                                      const AnomalyConfig& config) {
  std::vector<Anomaly> out;
  auto emit = [&](const TelemetryRecord& r, AnomalyCode code) {
    out.push_back({class_of(code), r.vehicle_id, r.timestamp, code});
  };

  std::optional<EpochSeconds> startup_at;
  std::vector<std::size_t> switch_index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& cur = records[i];
    const TelemetryRecord* prev = i > 0 ? &records[i - 1] : nullptr;

    if (prev) {
      const auto dt = cur.timestamp - prev->timestamp;
      if (dt < 0) {
        emit(cur, AnomalyCode::NonMonotoneTimestamp);
      } else if (dt == 0) {
        emit(cur, AnomalyCode::DuplicateTimestamp);
      } else if (dt > config.max_gap_s) {
        emit(cur, AnomalyCode::TimeGap);
      }
    }

    const bool entered = !prev || prev->vehicle_state != cur.vehicle_state;
    if (entered && cur.vehicle_state == VehicleState::Startup) {
      startup_at = cur.timestamp;
    } else if (entered && cur.vehicle_state == VehicleState::Shutdown) {
      if (startup_at && cur.timestamp - *startup_at < config.min_session_s) {
        emit(cur, AnomalyCode::ImmediateShutdown);
      }
      startup_at.reset();
    }

    if (prev && prev->charging_status == ChargingStatus::ParkedCharging &&
        cur.charging_status == ChargingStatus::ParkedCharging && cur.soc < prev->soc) {
      emit(cur, AnomalyCode::SocDropWhileCharging);
    }

    if (cur.operation_mode == OperationMode::Fuel && telemetry::is_charging(cur.charging_status)) {
      emit(cur, AnomalyCode::FuelWhileCharging);
    }

    if (prev && prev->operation_mode != cur.operation_mode) switch_index.push_back(i);
  }

  // A mode entered at one switch and left at the next within min_mode_dwell.
  for (std::size_t k = 0; k + 1 < switch_index.size(); ++k) {
    const auto& entered = records[switch_index[k]];
    const auto& left = records[switch_index[k + 1]];
    if (left.timestamp - entered.timestamp < config.min_mode_dwell_s) {
      emit(entered, AnomalyCode::ShortModeDwell);
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const Anomaly& a, const Anomaly& b) {
    if (a.at != b.at) return a.at < b.at;
    return a.detail < b.detail;
  });
  return out;
}

std::vector<ChargingSession> extract_charging_sessions(std::span<const TelemetryRecord> records) {
  std::vector<ChargingSession> out;
  const auto dwell = record_dwells(records);
  std::size_t i = 0;
  while (i < records.size()) {
    const auto status = records[i].charging_status;
    if (!telemetry::is_charging(status)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    double power_sum = 0.0;
    while (j < records.size() && records[j].charging_status == status) {
      power_sum += records[j].power;
      ++j;
    }
    ChargingSession s;
    s.vehicle_id = records[i].vehicle_id;
    s.kind = status == ChargingStatus::ParkedCharging ? SessionKind::Parked : SessionKind::WhileDriving;
    s.start = records[i].timestamp;
    s.end = j < records.size()
                ? records[j].timestamp
                : records[j - 1].timestamp + static_cast<EpochSeconds>(std::llround(dwell[j - 1]));
    // One-second timestamp resolution is the floor on session length.
    if (s.end <= s.start) s.end = s.start + 1;
    s.soc_start = records[i].soc;
    s.soc_end = records[j - 1].soc;
    s.mean_power = power_sum / static_cast<double>(j - i);
    out.push_back(std::move(s));
    i = j;
  }
  return out;
}

ModeStatistics mode_statistics(std::span<const TelemetryRecord> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyStream, "mode_statistics: empty stream");
  ModeStatistics stats;
  auto dwell = record_dwells(records);
  double total = 0.0;
  for (double d : dwell) total += d;
  if (total <= 0.0) {
    std::fill(dwell.begin(), dwell.end(), 1.0);
    total = static_cast<double>(dwell.size());
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    stats.shares[static_cast<std::size_t>(records[i].operation_mode)] += dwell[i] / total;
    if (i > 0 && records[i].operation_mode != records[i - 1].operation_mode) {
      stats.switches.push_back(
          {records[i].timestamp, records[i - 1].operation_mode, records[i].operation_mode});
    }
  }
  return stats;
}

BehaviorProfile build_profile(std::span<const TelemetryRecord> records, const ProfileConfig& config) {
  if (records.empty()) throw Error(ErrorCode::EmptyStream, "build_profile: empty stream");
  BehaviorProfile p;
  p.vehicle_id = records.front().vehicle_id;

  const auto sessions = extract_charging_sessions(records);
  if (!sessions.empty()) {
    std::size_t over = 0;
    double total = 0.0, driving = 0.0;
    for (const auto& s : sessions) {
      if (s.soc_end >= config.high_soc) ++over;
      const auto len = static_cast<double>(s.end - s.start);
      total += len;
      if (s.kind == SessionKind::WhileDriving) driving += len;
    }
    p.overcharge_rate = static_cast<double>(over) / static_cast<double>(sessions.size());
    p.charge_while_driving_share = total > 0.0 ? driving / total : 0.0;
  }

  const auto dwell = record_dwells(records);
  const auto running = [](const TelemetryRecord& r) { return r.vehicle_state == VehicleState::Running; };
  p.deep_discharge_rate =
      time_fraction(records, dwell, running, [&](const auto& r) { return r.soc <= config.low_soc; });
  p.high_speed_fraction = time_fraction(records, dwell, running,
                                        [&](const auto& r) { return r.speed >= config.high_speed_kmh; });
  p.pure_electric_share = time_fraction(records, dwell, running, [](const auto& r) {
    return r.operation_mode == OperationMode::PureElectric;
  });
  p.mode_switch_count = mode_statistics(records).switches.size();
  return p;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::BadInput, "pearson: length mismatch");
  if (a.size() < 2) throw Error(ErrorCode::BadInput, "pearson: need at least two samples");
  const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  if (*amin == *amax || *bmin == *bmax) {
    throw Error(ErrorCode::DegenerateSeries, "pearson: zero variance series");
  }
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) throw Error(ErrorCode::DegenerateSeries, "pearson: zero variance series");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<Trip> extract_trips(std::span<const TelemetryRecord> records) {
  std::vector<Trip> out;
  std::optional<std::size_t> begin;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto state = records[i].vehicle_state;
    const bool entered = i == 0 || records[i - 1].vehicle_state != state;
    if (entered && state == VehicleState::Startup) {
      begin = i;
    } else if (state == VehicleState::Shutdown && begin) {
      const auto& s = records[*begin];
      const auto& e = records[i];
      out.push_back({s.timestamp, e.timestamp, e.sum_mileage - s.sum_mileage, e.soc});
      begin.reset();
    }
  }
  return out;
}

CorrelationReport correlation_report(std::span<const TelemetryRecord> sorted) {
  if (sorted.size() < 2) throw Error(ErrorCode::BadInput, "correlation_report: need at least two records");
  const auto n = sorted.size();
  std::vector<double> soc(n), mileage(n), voltage(n), current(n), power(n), speed(n);
  for (std::size_t i = 0; i < n; ++i) {
    soc[i] = sorted[i].soc;
    mileage[i] = sorted[i].sum_mileage;
    voltage[i] = sorted[i].sum_voltage;
    current[i] = sorted[i].sum_current;
    power[i] = sorted[i].power;
    speed[i] = sorted[i].speed;
  }
  std::vector<double> trip_soc, trip_distance;
  for (const auto& trace : telemetry::split_by_vehicle(sorted)) {
    for (const auto& t : extract_trips(trace.records)) {
      trip_soc.push_back(t.soc_end);
      trip_distance.push_back(t.distance_km);
    }
  }

  CorrelationReport report;
  auto add = [&](std::string_view a_name, const std::vector<double>& a, std::string_view b_name,
                 const std::vector<double>& b) {
    try {
      report.pairs.push_back({std::string(a_name), std::string(b_name), pearson(a, b), a.size()});
    } catch (const Error& e) {
      report.omitted.push_back({std::string(a_name), std::string(b_name), std::string(to_string(e.code()))});
    }
  };
  add("soc", soc, "sum_mileage", mileage);
  add("soc", soc, "sum_voltage", voltage);
  add("soc", soc, "sum_current", current);
  add("soc", soc, "power", power);
  add("soc", trip_soc, "trip_distance", trip_distance);
  add("soc", soc, "speed", speed);
  return report;
}

std::vector<Anomaly> detect_fleet_anomalies(std::span<const TelemetryRecord> sorted,
                                            const AnomalyConfig& config) {
  std::vector<Anomaly> out;
  for (const auto& trace : telemetry::split_by_vehicle(sorted)) {
    auto part = detect_anomalies(trace.records, config);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<BehaviorProfile> build_fleet_profiles(std::span<const TelemetryRecord> sorted,
                                                  const ProfileConfig& config) {
  std::vector<BehaviorProfile> out;
  for (const auto& trace : telemetry::split_by_vehicle(sorted)) {
    out.push_back(build_profile(trace.records, config));
  }
  return out;
}

std::vector<TelemetryRecord> hybrid_vehicle_records(std::span<const TelemetryRecord> sorted) {
  std::vector<TelemetryRecord> out;
  for (const auto& trace : telemetry::split_by_vehicle(sorted)) {
    const bool hybrid = std::any_of(trace.records.begin(), trace.records.end(), [](const auto& r) {
      return r.operation_mode == OperationMode::Hybrid;
    });
    if (hybrid) out.insert(out.end(), trace.records.begin(), trace.records.end());
  }
  return out;
}

}  // namespace nevsim::behavior
