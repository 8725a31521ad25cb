#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nevsim/behavior.hpp"
#include "nevsim/scenario/pipeline.hpp"

namespace nevsim::scenario {

/// Plot area geometry shared by every chart, in SVG user units.
struct PlotFrame {
  double width = 640.0;
  double height = 480.0;
  double margin = 60.0;
};

/// One polyline over epochs, or nullopt for an empty curve.
std::optional<std::string> loss_curve_svg(std::span<const double> loss, std::string_view title,
                                          const PlotFrame& frame = {});

/// Predicted against actual on a square plot with equal axis ranges, so the
/// identity line is the plot diagonal. Nullopt when there are no points.
std::optional<std::string> scatter_svg(std::span<const double> actual, std::span<const double> predicted,
                                       std::string_view title, const PlotFrame& frame = {});

/// One horizontal bar per correlation pair, r in [-1, 1].
std::string correlation_svg(const behavior::CorrelationReport& report, const PlotFrame& frame = {});

/// Observed values followed by the extension, split at the observed end.
std::optional<std::string> series_svg(const SeriesArchive& series, const PlotFrame& frame = {});

struct PlotFile {
  std::string name;  // file name, e.g. "loss_soc_stress.svg"
  std::string svg;
};

struct PlotSet {
  std::vector<PlotFile> files;
  std::vector<std::string> notes;  // one per skipped plot
};

PlotSet emit_plots(const ScenarioResult& result, std::span<const SeriesArchive> archive);

}  // namespace nevsim::scenario
