#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string_view>

#include "nevsim/behavior.hpp"

namespace nevsim::ecomodel {

/// Raw drivers of the indicator equations. Units are carried here only.
struct IndicatorInputs {
  double pop = 0.0;              // population density, persons/km^2
  double t_r = 0.0;              // regional temperature change rate, degC/yr
  double alpha = 0.0;            // land-use pattern parameter
  double area = 0.0;             // km^2
  double c_industrial = 0.0;     // mg/m^3
  double c_traffic = 0.0;        // mg/m^3
  double c_waste = 0.0;          // mg/m^3
  double rad = 0.0;              // residential-area disturbance degree
  double d_temperature = 0.0;    // degC
  double d_precipitation = 0.0;  // mm
  double vfc = 0.0;              // vegetation cover fraction
  double di = 0.0;               // forest destruction index
  double r_recovery = 0.0;       // forest recovery rate, fraction/yr
  double p_policy = 0.0;         // waste-treatment policy efficiency
  double charging_behavior = 0.0;
  double temperature_stress = 0.0;  // degC-equivalent
  double driving_speed = 0.0;       // km/h
  double nevi = 0.0;                // NEV penetration fraction

  bool operator==(const IndicatorInputs&) const = default;
};

/// Field names in declaration order, matching the JSON keys.
inline constexpr std::array<std::string_view, 18> kInputFieldNames{
    "pop", "t_r", "alpha", "area", "c_industrial", "c_traffic", "c_waste", "rad", "d_temperature",
    "d_precipitation", "vfc", "di", "r_recovery", "p_policy", "charging_behavior",
    "temperature_stress", "driving_speed", "nevi"};

/// Pointer to the named field, or nullptr.
double* input_field(IndicatorInputs& inputs, std::string_view name);
double input_field(const IndicatorInputs& inputs, std::string_view name);

/// Range checks: finite everywhere, fractions (vfc, r_recovery, nevi) in
/// [0, 1], concentrations nonnegative. Throws Error{BadInput}.
void validate(const IndicatorInputs& inputs);

enum class Equation : std::size_t { LD, PC, CCI, FR, WTR, LSBCT, E };
inline constexpr std::size_t kEquationCount = 7;
std::string_view to_string(Equation eq);

struct CoefficientSet {
  std::array<double, 4> l{1, 1, 1, 1};        // land degradation
  std::array<double, 4> g_pc{1, 1, 1, 1};     // pollutant concentration
  std::array<double, 2> c{1, 1};              // climate change impact
  std::array<double, 3> d{1, 1, 1};           // forest restoration
  std::array<double, 2> e{1, 1};              // waste treatment rate
  std::array<double, 3> g_lsbct{1, 1, 1};     // battery chemical toxicity
  std::array<double, 7> w{1, 1, 1, 1, 1, 1, 1};  // LD, PC, CCI, FR, WTR, NEVI, LSBCT
  std::array<double, kEquationCount> noise_sigma{};  // indexed by Equation
  std::uint64_t seed = 0;

  bool operator==(const CoefficientSet&) const = default;
};

struct IndicatorVector {
  double ld = 0.0;     // index
  double pc = 0.0;     // mg/m^3
  double cci = 0.0;    // degC
  double fr = 0.0;     // %
  double wtr = 0.0;    // %
  double lsbct = 0.0;  // index

  bool operator==(const IndicatorVector&) const = default;
};

/// Zero-mean Gaussian error terms, one stream per equation so that the draws
/// of one equation do not depend on how often another is evaluated.
class NoiseSource {
 public:
  NoiseSource(const std::array<double, kEquationCount>& sigma, std::uint64_t seed);

  double draw(Equation eq);
  double sigma(Equation eq) const { return sigma_[static_cast<std::size_t>(eq)]; }

 private:
  std::array<double, kEquationCount> sigma_;
  std::array<std::mt19937_64, kEquationCount> streams_;
};

double land_degradation(const IndicatorInputs& in, const CoefficientSet& k, double epsilon);
double pollutant_concentration(const IndicatorInputs& in, const CoefficientSet& k, double epsilon);
double climate_change_impact(const IndicatorInputs& in, const CoefficientSet& k, double epsilon);
double forest_restoration(const IndicatorInputs& in, const CoefficientSet& k, double epsilon);
double waste_treatment_rate(const IndicatorInputs& in, const CoefficientSet& k, double epsilon);

/// Optional per-input response curves for the toxicity equation; an empty
/// function is the identity, which gives the linear form.
struct LsbctResponse {
  std::function<double(double)> charging_behavior;
  std::function<double(double)> temperature;
  std::function<double(double)> driving_speed;
};

double lsbct(const IndicatorInputs& in, const CoefficientSet& k, double epsilon,
             const LsbctResponse& response = {});

/// a * overcharge_rate + b * deep_discharge_rate.
double charging_behavior(const behavior::BehaviorProfile& profile, double a = 0.5, double b = 0.5);

/// Weighted sum w1 LD + w2 PC + w3 CCI + w4 FR + w5 WTR + w6 NEVI + w7 LSBCT + epsilon.
double nev_efficiency(const IndicatorVector& v, double nevi, const std::array<double, 7>& w, double epsilon);

/// kWh times kg CO2 per kWh. Throws Error{BadInput} on negative inputs.
double electricity_to_co2(double energy_kwh, double grid_factor);

/// delta_value / delta_nev_population. Throws Error{DegenerateDenominator} on zero.
double standardize(double delta_value, double delta_nev_population);

/// Evaluates the six indicators, drawing noise (when given) in equation order.
IndicatorVector evaluate_indicators(const IndicatorInputs& in, const CoefficientSet& k,
                                    NoiseSource* noise = nullptr, const LsbctResponse& response = {});

}  // namespace nevsim::ecomodel
