#include "nevsim/scenario/serialize.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "json.hpp"
#include "nevsim/error.hpp"

namespace nevsim::scenario {

namespace {

using nlohmann::json;

// Infinite values travel as null; nothing in a result is NaN.
json number(double x) { return std::isinf(x) ? json(nullptr) : json(x); }
double number(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json optional(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }
std::optional<double> optional(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

template <typename Container>
json numbers(const Container& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

template <std::size_t N>
std::array<double, N> fixed(const json& j) {
  if (j.size() != N) throw Error(ErrorCode::Parse, fmt::format("expected {} numbers", N));
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = number(j[i]);
  return out;
}

std::vector<double> doubles(const json& j) {
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(number(x));
  return out;
}

json indicators(const ecomodel::IndicatorVector& v) {
  return {{"ld", v.ld}, {"pc", v.pc}, {"cci", v.cci}, {"fr", v.fr}, {"wtr", v.wtr}, {"lsbct", v.lsbct}};
}

ecomodel::IndicatorVector indicators(const json& j) {
  ecomodel::IndicatorVector v;
  v.ld = j.at("ld").get<double>();
  v.pc = j.at("pc").get<double>();
  v.cci = j.at("cci").get<double>();
  v.fr = j.at("fr").get<double>();
  v.wtr = j.at("wtr").get<double>();
  v.lsbct = j.at("lsbct").get<double>();
  return v;
}

json hyperparams(const forecast::Hyperparams& hp) {
  return {{"hidden_size", hp.hidden_size},
          {"learning_rate", hp.learning_rate},
          {"window", hp.window},
          {"epochs", hp.epochs},
          {"seed", hp.seed}};
}

forecast::Hyperparams hyperparams(const json& j) {
  forecast::Hyperparams hp;
  hp.hidden_size = j.at("hidden_size").get<int>();
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.window = j.at("window").get<int>();
  hp.epochs = j.at("epochs").get<int>();
  hp.seed = j.at("seed").get<std::uint64_t>();
  return hp;
}

json coefficients(const ecomodel::CoefficientSet& k) {
  return {{"l", numbers(k.l)},         {"g_pc", numbers(k.g_pc)},
          {"c", numbers(k.c)},         {"d", numbers(k.d)},
          {"e", numbers(k.e)},         {"g_lsbct", numbers(k.g_lsbct)},
          {"w", numbers(k.w)},         {"noise_sigma", numbers(k.noise_sigma)},
          {"seed", k.seed}};
}

ecomodel::CoefficientSet coefficients(const json& j) {
  ecomodel::CoefficientSet k;
  k.l = fixed<4>(j.at("l"));
  k.g_pc = fixed<4>(j.at("g_pc"));
  k.c = fixed<2>(j.at("c"));
  k.d = fixed<3>(j.at("d"));
  k.e = fixed<2>(j.at("e"));
  k.g_lsbct = fixed<3>(j.at("g_lsbct"));
  k.w = fixed<7>(j.at("w"));
  k.noise_sigma = fixed<ecomodel::kEquationCount>(j.at("noise_sigma"));
  k.seed = j.at("seed").get<std::uint64_t>();
  return k;
}

json diagnostics(const forecast::FitDiagnostics& d) {
  return {{"loss_curve", numbers(d.loss_curve)},
          {"r2_train", optional(d.r2_train)},
          {"r2_test", optional(d.r2_test)},
          {"mse_train", d.mse_train},
          {"mse_test", d.mse_test},
          {"mse_train_raw", d.mse_train_raw},
          {"mse_test_raw", d.mse_test_raw},
          {"mse_ratio", optional(d.mse_ratio)},
          {"test_actual", numbers(d.test_actual)},
          {"test_predicted", numbers(d.test_predicted)}};
}

forecast::FitDiagnostics diagnostics(const json& j) {
  forecast::FitDiagnostics d;
  d.loss_curve = doubles(j.at("loss_curve"));
  d.r2_train = optional(j.at("r2_train"));
  d.r2_test = optional(j.at("r2_test"));
  d.mse_train = j.at("mse_train").get<double>();
  d.mse_test = j.at("mse_test").get<double>();
  d.mse_train_raw = j.at("mse_train_raw").get<double>();
  d.mse_test_raw = j.at("mse_test_raw").get<double>();
  d.mse_ratio = optional(j.at("mse_ratio"));
  d.test_actual = doubles(j.at("test_actual"));
  d.test_predicted = doubles(j.at("test_predicted"));
  return d;
}

json forecast_json(const SeriesForecast& f) {
  json log = json::array();
  for (const auto& e : f.tuning_log) {
    log.push_back({{"index", e.index},
                   {"initial", e.initial},
                   {"hyperparams", hyperparams(e.hp)},
                   {"validation_mse", number(e.validation_mse)}});
  }
  return {{"series", f.series},
          {"best", hyperparams(f.best)},
          {"best_validation_mse", number(f.best_validation_mse)},
          {"tuning_log", log},
          {"diagnostics", diagnostics(f.diagnostics)}};
}

SeriesForecast forecast_from(const json& j) {
  SeriesForecast f;
  f.series = j.at("series").get<std::string>();
  f.best = hyperparams(j.at("best"));
  f.best_validation_mse = number(j.at("best_validation_mse"));
  for (const auto& e : j.at("tuning_log")) {
    forecast::TuningEvaluation t;
    t.index = e.at("index").get<std::size_t>();
    t.initial = e.at("initial").get<bool>();
    t.hp = hyperparams(e.at("hyperparams"));
    t.validation_mse = number(e.at("validation_mse"));
    f.tuning_log.push_back(t);
  }
  f.diagnostics = diagnostics(j.at("diagnostics"));
  return f;
}

}  // namespace

std::string result_to_json(const ScenarioResult& r) {
  json weights = {{"weights", numbers(r.weights.weights)},
                  {"entropies", numbers(r.weights.entropies)},
                  {"degenerate_columns", r.weights.degenerate_columns},
                  {"uniform_fallback", r.weights.uniform_fallback}};

  json by_code = json::array();
  for (const auto& c : r.anomalies.by_code) by_code.push_back({{"code", c.code}, {"count", c.count}});

  json pairs = json::array();
  for (const auto& p : r.correlations.pairs) {
    pairs.push_back({{"a", p.a}, {"b", p.b}, {"r", p.r}, {"samples", p.samples}});
  }
  json omitted = json::array();
  for (const auto& p : r.correlations.omitted) omitted.push_back({{"a", p.a}, {"b", p.b}, {"reason", p.reason}});

  json forecasts = json::array();
  for (const auto& f : r.forecasts) forecasts.push_back(forecast_json(f));

  json root = {
      {"seed", r.seed},
      {"horizon", r.horizon},
      {"records", r.records},
      {"rejected_rows", r.rejected_rows},
      {"vehicles", r.vehicles},
      {"before", indicators(r.before)},
      {"after", indicators(r.after)},
      {"nevi_before", r.nevi_before},
      {"nevi_after", r.nevi_after},
      {"efficiency_before", r.efficiency_before},
      {"efficiency_after", r.efficiency_after},
      {"coefficients", coefficients(r.coefficients)},
      {"weights", weights},
      {"delta_nev_population", r.delta_nev_population},
      {"delta_nev_efficiency", r.delta_nev_efficiency},
      {"standardized_growth", optional(r.standardized_growth)},
      {"standardized_efficiency", optional(r.standardized_efficiency)},
      {"anomalies",
       {{"total", r.anomalies.total}, {"by_code", by_code}, {"stream_violations", r.anomalies.stream_violations}}},
      {"correlations", {{"pairs", pairs}, {"omitted", omitted}}},
      {"forecasts", forecasts},
      {"notes", r.notes},
  };
  return root.dump(2) + "\n";
}

ScenarioResult result_from_json(std::string_view text) {
  try {
    const json j = json::parse(text.begin(), text.end());
    ScenarioResult r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.horizon = j.at("horizon").get<int>();
    r.records = j.at("records").get<std::size_t>();
    r.rejected_rows = j.at("rejected_rows").get<std::size_t>();
    r.vehicles = j.at("vehicles").get<std::size_t>();
    r.before = indicators(j.at("before"));
    r.after = indicators(j.at("after"));
    r.nevi_before = j.at("nevi_before").get<double>();
    r.nevi_after = j.at("nevi_after").get<double>();
    r.efficiency_before = j.at("efficiency_before").get<double>();
    r.efficiency_after = j.at("efficiency_after").get<double>();
    r.coefficients = coefficients(j.at("coefficients"));

    const auto& w = j.at("weights");
    r.weights.weights = doubles(w.at("weights"));
    r.weights.entropies = doubles(w.at("entropies"));
    r.weights.degenerate_columns = w.at("degenerate_columns").get<std::vector<std::size_t>>();
    r.weights.uniform_fallback = w.at("uniform_fallback").get<bool>();

    r.delta_nev_population = j.at("delta_nev_population").get<double>();
    r.delta_nev_efficiency = j.at("delta_nev_efficiency").get<double>();
    r.standardized_growth = optional(j.at("standardized_growth"));
    r.standardized_efficiency = optional(j.at("standardized_efficiency"));

    const auto& a = j.at("anomalies");
    r.anomalies.total = a.at("total").get<std::size_t>();
    for (const auto& c : a.at("by_code")) {
      r.anomalies.by_code.push_back({c.at("code").get<std::string>(), c.at("count").get<std::size_t>()});
    }
    r.anomalies.stream_violations = a.at("stream_violations").get<std::size_t>();

    const auto& c = j.at("correlations");
    for (const auto& p : c.at("pairs")) {
      r.correlations.pairs.push_back({p.at("a").get<std::string>(), p.at("b").get<std::string>(),
                                      p.at("r").get<double>(), p.at("samples").get<std::size_t>()});
    }
    for (const auto& p : c.at("omitted")) {
      r.correlations.omitted.push_back(
          {p.at("a").get<std::string>(), p.at("b").get<std::string>(), p.at("reason").get<std::string>()});
    }
    for (const auto& f : j.at("forecasts")) r.forecasts.push_back(forecast_from(f));
    r.notes = j.at("notes").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, fmt::format("scenario result: {}", e.what()));
  }
}

std::string model_to_json(const forecast::ForecastModel& m) {
  json root = {{"hyperparams", hyperparams(m.hp)},
               {"scaler", {{"min", m.scaler.min}, {"max", m.scaler.max}}},
               {"input_dim", m.params.input_dim()},
               {"hidden", m.params.hidden()},
               {"params", numbers(m.params.values())}};
  return root.dump(2) + "\n";
}

forecast::ForecastModel model_from_json(std::string_view text) {
  try {
    const json j = json::parse(text.begin(), text.end());
    forecast::ForecastModel m;
    m.hp = hyperparams(j.at("hyperparams"));
    m.scaler.min = j.at("scaler").at("min").get<double>();
    m.scaler.max = j.at("scaler").at("max").get<double>();
    m.params = forecast::LstmParams(j.at("input_dim").get<std::size_t>(), j.at("hidden").get<std::size_t>());
    const auto values = doubles(j.at("params"));
    if (values.size() != m.params.size()) throw Error(ErrorCode::Parse, "model: parameter count mismatch");
    std::copy(values.begin(), values.end(), m.params.values().begin());
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, fmt::format("model: {}", e.what()));
  }
}

}  // namespace nevsim::scenario
