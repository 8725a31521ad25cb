#include "nevsim/telemetry.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "nevsim/error.hpp"

namespace nevsim::telemetry {

namespace {

constexpr std::array<std::string_view, 3> kStateNames{"startup", "running", "shutdown"};
constexpr std::array<std::string_view, 4> kChargingNames{"parked_charging", "driving_charging",
                                                         "not_charging", "charging_complete"};
constexpr std::array<std::string_view, 3> kModeNames{"pure_electric", "hybrid", "fuel"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

// Parses exactly `width` ASCII digits.
bool parse_fixed_digits(std::string_view s, std::size_t pos, std::size_t width, int& out) {
  out = 0;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    out = out * 10 + (s[i] - '0');
  }
  return true;
}

enum Column : std::size_t {
  kDatetime,
  kVehicleId,
  kVehicleState,
  kChargingStatus,
  kOperationMode,
  kSoc,
  kSumMileage,
  kSumVoltage,
  kSumCurrent,
  kSpeed,
  kPower,
  kColumnCount,
};

constexpr std::array<std::string_view, kColumnCount> kColumnNames{
    "datetime", "vehicle_id", "vehicle_state", "charging_status", "operation_mode", "soc",
    "sum_mileage", "sum_voltage", "sum_current", "speed", "power"};

struct RowOutcome {
  std::optional<TelemetryRecord> record;
  std::string reason;
};

RowOutcome parse_row(const std::vector<std::string_view>& fields,
                     const std::array<std::optional<std::size_t>, kColumnCount>& index,
                     std::size_t header_width) {
  RowOutcome out;
  if (fields.size() != header_width) {
    out.reason = "field count";
    return out;
  }
  auto field = [&](Column c) { return fields[*index[c]]; };

  TelemetryRecord r;
  try {
    r.timestamp = normalize_timestamp(field(kDatetime));
  } catch (const Error&) {
    out.reason = "bad datetime";
    return out;
  }
  r.vehicle_id = std::string(field(kVehicleId));
  if (r.vehicle_id.empty()) {
    out.reason = "empty vehicle_id";
    return out;
  }
  const auto state = parse_vehicle_state(field(kVehicleState));
  if (!state) {
    out.reason = "bad vehicle_state";
    return out;
  }
  const auto charging = parse_charging_status(field(kChargingStatus));
  if (!charging) {
    out.reason = "bad charging_status";
    return out;
  }
  const auto mode = parse_operation_mode(field(kOperationMode));
  if (!mode) {
    out.reason = "bad operation_mode";
    return out;
  }
  r.vehicle_state = *state;
  r.charging_status = *charging;
  r.operation_mode = *mode;

  const std::array<std::pair<Column, double*>, 5> numeric{{{kSoc, &r.soc},
                                                           {kSumMileage, &r.sum_mileage},
                                                           {kSumVoltage, &r.sum_voltage},
                                                           {kSumCurrent, &r.sum_current},
                                                           {kSpeed, &r.speed}}};
  for (const auto& [col, dst] : numeric) {
    const auto v = parse_double(field(col));
    if (!v) {
      out.reason = fmt::format("bad number: {}", kColumnNames[col]);
      return out;
    }
    *dst = *v;
  }
  if (index[kPower]) {
    const auto v = parse_double(field(kPower));
    if (!v) {
      out.reason = "bad number: power";
      return out;
    }
    r.power = *v;
  } else {
    r.power = r.sum_voltage * r.sum_current / 1000.0;
  }

  if (r.soc < 0.0 || r.soc > 100.0) {
    out.reason = "soc out of range";
  } else if (r.speed < 0.0) {
    out.reason = "speed out of range";
  } else if (r.sum_mileage < 0.0) {
    out.reason = "sum_mileage out of range";
  } else if (r.sum_voltage < 0.0) {
    out.reason = "sum_voltage out of range";
  } else {
    out.record = std::move(r);
  }
  return out;
}

}  // namespace

std::string_view to_string(VehicleState v) { return kStateNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(ChargingStatus v) { return kChargingNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(OperationMode v) { return kModeNames[static_cast<std::size_t>(v)]; }

std::optional<VehicleState> parse_vehicle_state(std::string_view s) {
  return lookup<VehicleState>(kStateNames, s);
}
std::optional<ChargingStatus> parse_charging_status(std::string_view s) {
  return lookup<ChargingStatus>(kChargingNames, s);
}
std::optional<OperationMode> parse_operation_mode(std::string_view s) {
  return lookup<OperationMode>(kModeNames, s);
}

EpochSeconds normalize_timestamp(std::string_view text) {
  using namespace std::chrono;
  auto fail = [&](std::string_view what) -> EpochSeconds {
    throw Error(ErrorCode::Parse,
                fmt::format("datetime: {} in \"{}\" (expected YYYY-MM-DD hh:mm:ss)", what, text));
  };
  if (text.size() != 19 || text[4] != '-' || text[7] != '-' || text[10] != ' ' ||
      text[13] != ':' || text[16] != ':') {
    return fail("malformed value");
  }
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_fixed_digits(text, 0, 4, y) || !parse_fixed_digits(text, 5, 2, mo) ||
      !parse_fixed_digits(text, 8, 2, d) || !parse_fixed_digits(text, 11, 2, h) ||
      !parse_fixed_digits(text, 14, 2, mi) || !parse_fixed_digits(text, 17, 2, s)) {
    return fail("non-digit character");
  }
  if (mo < 1 || mo > 12) return fail("month out of range");
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return fail("day out of range");
  if (h > 23) return fail("hour out of range");
  if (mi > 59) return fail("minute out of range");
  if (s > 59) return fail("second out of range");
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<EpochSeconds>(days) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_timestamp(EpochSeconds t) {
  using namespace std::chrono;
  auto days = t / 86400;
  auto rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  return fmt::format("{:04d}-{:02d}-{:02d} {:02d}:{:02d}:{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     rem / 3600, (rem / 60) % 60, rem % 60);
}

ParsedTelemetry parse_telemetry(std::istream& source) {
  if (!source) throw Error(ErrorCode::Io, "telemetry source is not readable");

  std::string line;
  if (!std::getline(source, line)) {
    throw Error(ErrorCode::Schema, "telemetry source has no header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_fields(line);
  std::array<std::optional<std::size_t>, kColumnCount> index{};
  for (std::size_t i = 0; i < header.size(); ++i) {
    for (std::size_t c = 0; c < kColumnCount; ++c) {
      if (header[i] == kColumnNames[c]) index[c] = i;
    }
  }
  for (std::size_t c = 0; c < kPower; ++c) {
    if (!index[c]) {
      throw Error(ErrorCode::Schema,
                  fmt::format("missing mandatory header column '{}'", kColumnNames[c]));
    }
  }

  ParsedTelemetry out;
  std::size_t row = 0;
  while (std::getline(source, line)) {
    if (trim(line).empty()) continue;
    ++row;
    auto outcome = parse_row(split_fields(line), index, header.size());
    if (outcome.record) {
      out.records.push_back(std::move(*outcome.record));
      ++out.report.accepted_count;
    } else {
      out.report.rejection_reasons.push_back({row, std::move(outcome.reason)});
      ++out.report.rejected_count;
    }
  }
  if (source.bad()) throw Error(ErrorCode::Io, "read error while parsing telemetry");

  sort_records(out.records);
  return out;
}

ParsedTelemetry parse_telemetry_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open telemetry file '{}'", path.string()));
  return parse_telemetry(in);
}

void write_telemetry_csv(std::ostream& out, std::span<const TelemetryRecord> records) {
  out << "datetime,vehicle_id,vehicle_state,charging_status,operation_mode,soc,sum_mileage,"
         "sum_voltage,sum_current,speed,power\n";
  for (const auto& r : records) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", format_timestamp(r.timestamp),
                       r.vehicle_id, to_string(r.vehicle_state), to_string(r.charging_status),
                       to_string(r.operation_mode), r.soc, r.sum_mileage, r.sum_voltage,
                       r.sum_current, r.speed, r.power);
  }
}

std::string_view to_string(StreamViolationCode c) {
  switch (c) {
    case StreamViolationCode::MileageDecrease: return "MileageDecrease";
    case StreamViolationCode::DuplicateTimestamp: return "DuplicateTimestamp";
  }
  return "Unknown";
}

std::vector<StreamViolation> validate_stream(std::span<const TelemetryRecord> records) {
  std::vector<StreamViolation> out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& prev = records[i - 1];
    const auto& cur = records[i];
    if (prev.vehicle_id != cur.vehicle_id) continue;
    if (cur.timestamp == prev.timestamp) out.push_back({i, StreamViolationCode::DuplicateTimestamp});
    if (cur.sum_mileage < prev.sum_mileage) out.push_back({i, StreamViolationCode::MileageDecrease});
  }
  return out;
}

void sort_records(std::vector<TelemetryRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    if (a.vehicle_id != b.vehicle_id) return a.vehicle_id < b.vehicle_id;
    return a.timestamp < b.timestamp;
  });
}

std::vector<VehicleTrace> split_by_vehicle(std::span<const TelemetryRecord> sorted) {
  std::vector<VehicleTrace> out;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i == sorted.size() || sorted[i].vehicle_id != sorted[begin].vehicle_id) {
      out.push_back({sorted[begin].vehicle_id, sorted.subspan(begin, i - begin)});
      begin = i;
    }
  }
  return out;
}

}  // namespace nevsim::telemetry
