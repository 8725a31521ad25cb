#include "nevsim/ecomodel.hpp"

#include <cmath>
#include <initializer_list>

#include <fmt/format.h>

#include "nevsim/error.hpp"
#include "nevsim/random.hpp"

namespace nevsim::ecomodel {

namespace {

void require_finite(std::string_view op, std::initializer_list<double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw Error(ErrorCode::BadInput, fmt::format("{}: non-finite input", op));
  }
}

template <std::size_t N>
void require_finite(std::string_view op, const std::array<double, N>& xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw Error(ErrorCode::BadInput, fmt::format("{}: non-finite coefficient", op));
  }
}

double apply(const std::function<double(double)>& f, double x) { return f ? f(x) : x; }

}  // namespace

double* input_field(IndicatorInputs& in, std::string_view name) {
  double* fields[] = {&in.pop,     &in.t_r,           &in.alpha,
                      &in.area,    &in.c_industrial,  &in.c_traffic,
                      &in.c_waste, &in.rad,           &in.d_temperature,
                      &in.d_precipitation, &in.vfc,   &in.di,
                      &in.r_recovery, &in.p_policy,   &in.charging_behavior,
                      &in.temperature_stress, &in.driving_speed, &in.nevi};
  for (std::size_t i = 0; i < kInputFieldNames.size(); ++i) {
    if (kInputFieldNames[i] == name) return fields[i];
  }
  return nullptr;
}

double input_field(const IndicatorInputs& in, std::string_view name) {
  auto copy = in;
  const double* p = input_field(copy, name);
  if (!p) throw Error(ErrorCode::BadInput, fmt::format("unknown indicator input '{}'", name));
  return *p;
}

void validate(const IndicatorInputs& in) {
  for (auto name : kInputFieldNames) {
    const double v = input_field(in, name);
    if (!std::isfinite(v)) throw Error(ErrorCode::BadInput, fmt::format("input '{}' is not finite", name));
  }
  for (auto [name, v] : {std::pair{"vfc", in.vfc}, {"r_recovery", in.r_recovery}, {"nevi", in.nevi}}) {
    if (v < 0.0 || v > 1.0) throw Error(ErrorCode::BadInput, fmt::format("input '{}' must lie in [0, 1]", name));
  }
  for (auto [name, v] : {std::pair{"c_industrial", in.c_industrial}, {"c_traffic", in.c_traffic},
                         {"c_waste", in.c_waste}}) {
    if (v < 0.0) throw Error(ErrorCode::BadInput, fmt::format("input '{}' must be nonnegative", name));
  }
}

std::string_view to_string(Equation eq) {
  switch (eq) {
    case Equation::LD: return "ld";
    case Equation::PC: return "pc";
    case Equation::CCI: return "cci";
    case Equation::FR: return "fr";
    case Equation::WTR: return "wtr";
    case Equation::LSBCT: return "lsbct";
    case Equation::E: return "e";
  }
  return "unknown";
}

NoiseSource::NoiseSource(const std::array<double, kEquationCount>& sigma, std::uint64_t seed) : sigma_(sigma) {
  for (std::size_t i = 0; i < kEquationCount; ++i) {
    if (!(sigma[i] >= 0.0) || !std::isfinite(sigma[i])) {
      throw Error(ErrorCode::BadInput, "noise sigma must be finite and nonnegative");
    }
    streams_[i].seed(derive_seed(seed, to_string(static_cast<Equation>(i))));
  }
}

double NoiseSource::draw(Equation eq) {
  const auto i = static_cast<std::size_t>(eq);
  if (sigma_[i] == 0.0) return 0.0;
  return sigma_[i] * standard_normal(streams_[i]);
}

double land_degradation(const IndicatorInputs& in, const CoefficientSet& k, double epsilon) {
  require_finite("land_degradation", {in.pop, in.t_r, in.alpha, in.area, epsilon});
  require_finite("land_degradation", k.l);
  return k.l[0] * in.pop + k.l[1] * in.t_r + k.l[2] * in.alpha + k.l[3] * in.area + epsilon;
}

double pollutant_concentration(const IndicatorInputs& in, const CoefficientSet& k, double epsilon) {
  require_finite("pollutant_concentration", {in.c_industrial, in.c_traffic, in.c_waste, in.rad, epsilon});
  require_finite("pollutant_concentration", k.g_pc);
  return k.g_pc[0] * in.c_industrial + k.g_pc[1] * in.c_traffic + k.g_pc[2] * in.c_waste +
         k.g_pc[3] * in.rad + epsilon;
}

double climate_change_impact(const IndicatorInputs& in, const CoefficientSet& k, double epsilon) {
  require_finite("climate_change_impact", {in.d_temperature, in.d_precipitation, epsilon});
  require_finite("climate_change_impact", k.c);
  return k.c[0] * in.d_temperature + k.c[1] * in.d_precipitation + epsilon;
}

double forest_restoration(const IndicatorInputs& in, const CoefficientSet& k, double epsilon) {
  require_finite("forest_restoration", {in.vfc, in.di, in.r_recovery, epsilon});
  require_finite("forest_restoration", k.d);
  return k.d[0] * in.vfc + k.d[1] * in.di + k.d[2] * in.r_recovery + epsilon;
}

double waste_treatment_rate(const IndicatorInputs& in, const CoefficientSet& k, double epsilon) {
  require_finite("waste_treatment_rate", {in.c_waste, in.p_policy, epsilon});
  require_finite("waste_treatment_rate", k.e);
  return k.e[0] * in.c_waste + k.e[1] * in.p_policy + epsilon;
}

double lsbct(const IndicatorInputs& in, const CoefficientSet& k, double epsilon, const LsbctResponse& response) {
  require_finite("lsbct", {in.charging_behavior, in.temperature_stress, in.driving_speed, epsilon});
  require_finite("lsbct", k.g_lsbct);
  const double cb = apply(response.charging_behavior, in.charging_behavior);
  const double temp = apply(response.temperature, in.temperature_stress);
  const double speed = apply(response.driving_speed, in.driving_speed);
  require_finite("lsbct", {cb, temp, speed});
  return k.g_lsbct[0] * cb + k.g_lsbct[1] * temp + k.g_lsbct[2] * speed + epsilon;
}

double charging_behavior(const behavior::BehaviorProfile& profile, double a, double b) {
  return a * profile.overcharge_rate + b * profile.deep_discharge_rate;
}

double nev_efficiency(const IndicatorVector& v, double nevi, const std::array<double, 7>& w, double epsilon) {
  require_finite("nev_efficiency", {v.ld, v.pc, v.cci, v.fr, v.wtr, v.lsbct, nevi, epsilon});
  require_finite("nev_efficiency", w);
  return w[0] * v.ld + w[1] * v.pc + w[2] * v.cci + w[3] * v.fr + w[4] * v.wtr + w[5] * nevi +
         w[6] * v.lsbct + epsilon;
}

double electricity_to_co2(double energy_kwh, double grid_factor) {
  if (!std::isfinite(energy_kwh) || !std::isfinite(grid_factor) || energy_kwh < 0.0 || grid_factor < 0.0) {
    throw Error(ErrorCode::BadInput, "electricity_to_co2: energy and factor must be finite and nonnegative");
  }
  return energy_kwh * grid_factor;
}

double standardize(double delta_value, double delta_nev_population) {
  if (delta_nev_population == 0.0) {
    throw Error(ErrorCode::DegenerateDenominator, "standardize: NEV population delta is zero");
  }
  return delta_value / delta_nev_population;
}

IndicatorVector evaluate_indicators(const IndicatorInputs& in, const CoefficientSet& k, NoiseSource* noise,
                                    const LsbctResponse& response) {
  auto eps = [&](Equation eq) { return noise ? noise->draw(eq) : 0.0; };
  IndicatorVector v;
  v.ld = land_degradation(in, k, eps(Equation::LD));
  v.pc = pollutant_concentration(in, k, eps(Equation::PC));
  v.cci = climate_change_impact(in, k, eps(Equation::CCI));
  v.fr = forest_restoration(in, k, eps(Equation::FR));
  v.wtr = waste_treatment_rate(in, k, eps(Equation::WTR));
  v.lsbct = lsbct(in, k, eps(Equation::LSBCT), response);
  return v;
}

}  // namespace nevsim::ecomodel
