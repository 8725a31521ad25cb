#include <ctime>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "nevsim/error.hpp"
#include "nevsim/telemetry.hpp"

using namespace nevsim;
using namespace nevsim::telemetry;

namespace {

constexpr const char* kHeader =
    "datetime,vehicle_id,vehicle_state,charging_status,operation_mode,soc,sum_mileage,sum_voltage,sum_current,"
    "speed,power\n";

// libc's timegm is an implementation of the calendar independent of ours.
std::int64_t timegm_oracle(int y, int mo, int d, int h, int mi, int s) {
  std::tm tm{};
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = s;
  return static_cast<std::int64_t>(timegm(&tm));
}

ParsedTelemetry parse(const std::string& text) {
  std::istringstream in(text);
  return parse_telemetry(in);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected nevsim::Error";
  return ErrorCode::BadInput;
}

}  // namespace

TEST(Timestamp, EpochOrigin) { EXPECT_EQ(normalize_timestamp("1970-01-01 00:00:00"), 0); }

TEST(Timestamp, MatchesCalendarOracle) {
  // 2024-01-02 03:04:05 UTC: 19724 days after the epoch (54 years, 13 leap
  // days, plus one day into 2024) and 11045 seconds into the day.
  constexpr std::int64_t kExpected = 19724LL * 86400 + 3 * 3600 + 4 * 60 + 5;
  EXPECT_EQ(kExpected, 1704164645);
  EXPECT_EQ(timegm_oracle(2024, 1, 2, 3, 4, 5), kExpected);
  EXPECT_EQ(normalize_timestamp("2024-01-02 03:04:05"), kExpected);
}

TEST(Timestamp, RejectsImpossibleDates) {
  EXPECT_EQ(code_of([] { normalize_timestamp("2024-13-01 00:00:00"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { normalize_timestamp("2024-02-30 00:00:00"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { normalize_timestamp("2023-02-29 00:00:00"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { normalize_timestamp("2024-01-01 24:00:00"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { normalize_timestamp("2024-01-01T00:00:00"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { normalize_timestamp("2024-1-01 00:00:00"); }), ErrorCode::Parse);
  EXPECT_NO_THROW(normalize_timestamp("2024-02-29 23:59:59"));
}

TEST(Timestamp, ErrorNamesTheField) {
  try {
    normalize_timestamp("2024-13-01 00:00:00");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("datetime"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("month"), std::string::npos);
  }
}

TEST(Timestamp, RoundTripsRandomValidDatetimes) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> year(1900, 2200), month(1, 12), day(1, 31), hour(0, 23), minute(0, 59);
  int checked = 0;
  while (checked < 2000) {
    const int y = year(rng), mo = month(rng), d = day(rng), h = hour(rng), mi = minute(rng), s = minute(rng);
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) continue;
    char text[32];
    std::snprintf(text, sizeof text, "%04d-%02d-%02d %02d:%02d:%02d", y, mo, d, h, mi, s);
    const auto t = normalize_timestamp(text);
    EXPECT_EQ(t, timegm_oracle(y, mo, d, h, mi, s)) << text;
    EXPECT_EQ(format_timestamp(t), text);
    ++checked;
  }
}

TEST(ParseTelemetry, HeaderOnly) {
  const auto p = parse(kHeader);
  EXPECT_TRUE(p.records.empty());
  EXPECT_EQ(p.report.accepted_count, 0u);
  EXPECT_EQ(p.report.rejected_count, 0u);
}

TEST(ParseTelemetry, SingleRow) {
  const auto p = parse(std::string(kHeader) +
                       "2024-01-02 03:04:05,EV1,running,not_charging,pure_electric,55.5,1200,350,20,60,7\n");
  ASSERT_EQ(p.records.size(), 1u);
  EXPECT_EQ(p.report.accepted_count, 1u);
  const auto& r = p.records[0];
  EXPECT_EQ(r.timestamp, 1704164645);
  EXPECT_EQ(r.vehicle_id, "EV1");
  EXPECT_EQ(r.vehicle_state, VehicleState::Running);
  EXPECT_EQ(r.charging_status, ChargingStatus::NotCharging);
  EXPECT_EQ(r.operation_mode, OperationMode::PureElectric);
  EXPECT_DOUBLE_EQ(r.soc, 55.5);
  EXPECT_DOUBLE_EQ(r.power, 7.0);
}

TEST(ParseTelemetry, SocOutOfRangeIsQuarantined) {
  const auto p = parse(std::string(kHeader) +
                       "2024-01-02 03:04:05,EV1,running,not_charging,pure_electric,150,1200,350,20,60,7\n");
  EXPECT_TRUE(p.records.empty());
  EXPECT_EQ(p.report.accepted_count, 0u);
  EXPECT_EQ(p.report.rejected_count, 1u);
  ASSERT_EQ(p.report.rejection_reasons.size(), 1u);
  EXPECT_EQ(p.report.rejection_reasons[0], (Rejection{1, "soc out of range"}));
}

TEST(ParseTelemetry, PowerIsDerivedWhenAbsent) {
  const auto p = parse(
      "datetime,vehicle_id,vehicle_state,charging_status,operation_mode,soc,sum_mileage,sum_voltage,sum_current,"
      "speed\n2024-01-01 00:00:00,EV1,running,not_charging,pure_electric,50,10,400,-25,0\n");
  ASSERT_EQ(p.records.size(), 1u);
  EXPECT_DOUBLE_EQ(p.records[0].power, -10.0);
}

TEST(ParseTelemetry, ColumnsInAnyOrderAndBomTolerated) {
  const auto p = parse(
      "\xEF\xBB\xBFvehicle_id,datetime,soc,vehicle_state,charging_status,operation_mode,sum_mileage,sum_voltage,"
      "sum_current,speed\nEV9,2024-01-01 00:00:10,40,startup,parked_charging,hybrid,5,300,-10,0\n");
  ASSERT_EQ(p.records.size(), 1u);
  EXPECT_EQ(p.records[0].vehicle_id, "EV9");
  EXPECT_EQ(p.records[0].timestamp, 1704067200 + 10);
  EXPECT_EQ(p.records[0].charging_status, ChargingStatus::ParkedCharging);
  EXPECT_EQ(p.records[0].operation_mode, OperationMode::Hybrid);
}

TEST(ParseTelemetry, MissingColumnIsSchemaError) {
  EXPECT_EQ(code_of([] { parse("datetime,vehicle_id,vehicle_state\n"); }), ErrorCode::Schema);
  EXPECT_EQ(code_of([] { parse(""); }), ErrorCode::Schema);
}

TEST(ParseTelemetry, MissingFileIsIoError) {
  EXPECT_EQ(code_of([] { parse_telemetry_file("/nonexistent/telemetry.csv"); }), ErrorCode::Io);
}

TEST(ParseTelemetry, RejectionReasons) {
  const std::string rows =
      "2024-01-01 00:00:00,EV1,running,not_charging,pure_electric,50,10,400,1\n"    // field count
      "2024-02-30 00:00:00,EV1,running,not_charging,pure_electric,50,10,400,1,0,0\n"  // bad datetime
      "2024-01-01 00:00:00,,running,not_charging,pure_electric,50,10,400,1,0,0\n"  // empty id
      "2024-01-01 00:00:00,EV1,flying,not_charging,pure_electric,50,10,400,1,0,0\n"
      "2024-01-01 00:00:00,EV1,running,maybe,pure_electric,50,10,400,1,0,0\n"
      "2024-01-01 00:00:00,EV1,running,not_charging,steam,50,10,400,1,0,0\n"
      "2024-01-01 00:00:00,EV1,running,not_charging,pure_electric,abc,10,400,1,0,0\n"
      "2024-01-01 00:00:00,EV1,running,not_charging,pure_electric,50,10,400,1,-3,0\n"
      "2024-01-01 00:00:00,EV1,running,not_charging,pure_electric,50,-1,400,1,0,0\n"
      "2024-01-01 00:00:00,EV1,running,not_charging,pure_electric,50,10,-400,1,0,0\n"
      "2024-01-01 00:00:00,EV1,running,not_charging,pure_electric,50,10,400,1,0,0\n";
  const auto p = parse(std::string(kHeader) + rows);
  EXPECT_EQ(p.report.accepted_count, 1u);
  EXPECT_EQ(p.report.rejected_count, 10u);
  const std::vector<std::string> expected{"field count",         "bad datetime",       "empty vehicle_id",
                                          "bad vehicle_state",   "bad charging_status", "bad operation_mode",
                                          "bad number: soc",     "speed out of range", "sum_mileage out of range",
                                          "sum_voltage out of range"};
  ASSERT_EQ(p.report.rejection_reasons.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(p.report.rejection_reasons[i].row, i + 1);
    EXPECT_EQ(p.report.rejection_reasons[i].reason, expected[i]);
  }
}

TEST(ParseTelemetry, TotalOverArbitraryText) {
  std::mt19937_64 rng(5);
  const std::string alphabet = "0123456789,-:. abcEV\n_";
  for (int trial = 0; trial < 300; ++trial) {
    std::string body;
    const int len = static_cast<int>(rng() % 400);
    for (int i = 0; i < len; ++i) body += alphabet[rng() % alphabet.size()];
    const auto p = parse(std::string(kHeader) + body);
    std::size_t rows = 0;
    std::istringstream lines(body);
    for (std::string line; std::getline(lines, line);) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) ++rows;
    }
    EXPECT_EQ(p.report.accepted_count + p.report.rejected_count, rows);
    EXPECT_EQ(p.records.size(), p.report.accepted_count);
  }
}

TEST(ParseTelemetry, SortIsStableOnEqualKeys) {
  const auto p = parse(std::string(kHeader) +
                       "2024-01-01 00:00:05,B,running,not_charging,pure_electric,1,0,0,0,0,0\n"
                       "2024-01-01 00:00:05,A,running,not_charging,pure_electric,2,0,0,0,0,0\n"
                       "2024-01-01 00:00:01,A,running,not_charging,pure_electric,3,0,0,0,0,0\n"
                       "2024-01-01 00:00:05,A,running,not_charging,pure_electric,4,0,0,0,0,0\n");
  ASSERT_EQ(p.records.size(), 4u);
  EXPECT_EQ(p.records[0].soc, 3);
  EXPECT_EQ(p.records[1].soc, 2);
  EXPECT_EQ(p.records[2].soc, 4);
  EXPECT_EQ(p.records[3].vehicle_id, "B");
}

TEST(ParseTelemetry, CsvRoundTrip) {
  std::vector<TelemetryRecord> records(3);
  for (int i = 0; i < 3; ++i) {
    records[i].timestamp = 1704067200 + i * 60;
    records[i].vehicle_id = "EV7";
    records[i].vehicle_state = VehicleState::Running;
    records[i].soc = 80.125 - i;
    records[i].sum_mileage = 100.5 + i;
    records[i].sum_voltage = 380.25;
    records[i].sum_current = -12.5;
    records[i].speed = 33.75;
    records[i].power = -4.753125;
  }
  std::ostringstream out;
  write_telemetry_csv(out, records);
  EXPECT_EQ(parse(out.str()).records, records);
}

namespace {
TelemetryRecord rec(std::string id, EpochSeconds t, double mileage) {
  TelemetryRecord r;
  r.vehicle_id = std::move(id);
  r.timestamp = t;
  r.sum_mileage = mileage;
  return r;
}
}  // namespace

TEST(ValidateStream, CleanStream) {
  const std::vector<TelemetryRecord> s{rec("A", 0, 1), rec("A", 1, 2), rec("A", 2, 2)};
  EXPECT_TRUE(validate_stream(s).empty());
}

TEST(ValidateStream, MileageDecrease) {
  const std::vector<TelemetryRecord> s{rec("A", 0, 100), rec("A", 1, 90)};
  EXPECT_EQ(validate_stream(s), (std::vector<StreamViolation>{{1, StreamViolationCode::MileageDecrease}}));
}

TEST(ValidateStream, DuplicateTimestamp) {
  const std::vector<TelemetryRecord> s{rec("A", 5, 1), rec("A", 5, 1)};
  EXPECT_EQ(validate_stream(s), (std::vector<StreamViolation>{{1, StreamViolationCode::DuplicateTimestamp}}));
}

TEST(ValidateStream, VehiclesAreIndependent) {
  const std::vector<TelemetryRecord> s{rec("A", 5, 100), rec("B", 5, 1)};
  EXPECT_TRUE(validate_stream(s).empty());
}

TEST(SplitByVehicle, ContiguousSlices) {
  const std::vector<TelemetryRecord> s{rec("A", 0, 0), rec("A", 1, 0), rec("B", 0, 0)};
  const auto traces = split_by_vehicle(s);
  ASSERT_EQ(traces.size(), 2u);
  EXPECT_EQ(traces[0].vehicle_id, "A");
  EXPECT_EQ(traces[0].records.size(), 2u);
  EXPECT_EQ(traces[1].vehicle_id, "B");
}
