#pragma once

#include <string>
#include <string_view>

#include "nevsim/forecast/trainer.hpp"
#include "nevsim/scenario/pipeline.hpp"

namespace nevsim::scenario {

/// Pretty-printed JSON. Doubles are written with round-trip precision and
/// +inf as null, so result_from_json(result_to_json(r)) == r.
std::string result_to_json(const ScenarioResult& result);

/// Throws Error{Parse} on malformed or incomplete input.
ScenarioResult result_from_json(std::string_view text);

std::string model_to_json(const forecast::ForecastModel& model);
forecast::ForecastModel model_from_json(std::string_view text);

}  // namespace nevsim::scenario
