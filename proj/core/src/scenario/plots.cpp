#include "nevsim/scenario/plots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace nevsim::scenario {

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string px(double v) { return fmt::format("{:.2f}", v); }

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  static Range of(std::span<const double> a, std::span<const double> b = {}) {
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (double x : a) r.lo = std::min(r.lo, x), r.hi = std::max(r.hi, x);
    for (double x : b) r.lo = std::min(r.lo, x), r.hi = std::max(r.hi, x);
    if (r.lo == r.hi) {
      const double pad = std::max(std::abs(r.lo), 1.0) * 0.5;
      r.lo -= pad;
      r.hi += pad;
    }
    return r;
  }

  double unit(double x) const { return (x - lo) / (hi - lo); }
};

std::string open_svg(const PlotFrame& f, std::string_view title) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"{3}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{4}</text>\n",
      px(f.width), px(f.height), px(f.width / 2), px(f.margin / 2), escape(title));
}

std::string axes(double x0, double y0, double x1, double y1) {
  return fmt::format(
      "<line x1=\"{0}\" y1=\"{3}\" x2=\"{2}\" y2=\"{3}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{3}\" stroke=\"black\"/>\n",
      px(x0), px(y0), px(x1), px(y1));
}

std::string label(double x, double y, std::string_view text, std::string_view anchor = "middle") {
  return fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                     px(x), px(y), anchor, escape(text));
}

std::string tick(double v) { return fmt::format("{:.4g}", v); }

}  // namespace

std::optional<std::string> loss_curve_svg(std::span<const double> loss, std::string_view title,
                                          const PlotFrame& f) {
  if (loss.empty()) return std::nullopt;
  const double x0 = f.margin, x1 = f.width - f.margin;
  const double y0 = f.margin, y1 = f.height - f.margin;
  const Range r = Range::of(loss);
  const double steps = loss.size() > 1 ? static_cast<double>(loss.size() - 1) : 1.0;

  std::string svg = open_svg(f, title) + axes(x0, y0, x1, y1);
  svg += label((x0 + x1) / 2, f.height - f.margin / 4, "epoch");
  svg += label(x0 - 6, y1, tick(r.lo), "end");
  svg += label(x0 - 6, y0 + 4, tick(r.hi), "end");
  svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < loss.size(); ++i) {
    const double x = loss.size() > 1 ? x0 + (x1 - x0) * static_cast<double>(i) / steps : (x0 + x1) / 2;
    const double y = y1 - (y1 - y0) * r.unit(loss[i]);
    if (i) svg += ' ';
    svg += px(x) + "," + px(y);
  }
  svg += "\"/>\n</svg>\n";
  return svg;
}

std::optional<std::string> scatter_svg(std::span<const double> actual, std::span<const double> predicted,
                                       std::string_view title, const PlotFrame& f) {
  const std::size_t n = std::min(actual.size(), predicted.size());
  if (n == 0) return std::nullopt;
  actual = actual.first(n);
  predicted = predicted.first(n);
  // Square plot with one shared range so that y = x is the diagonal.
  const double side = std::min(f.width, f.height) - 2 * f.margin;
  const double x0 = f.margin, y0 = f.margin, x1 = x0 + side, y1 = y0 + side;
  const Range r = Range::of(actual, predicted);

  std::string svg = open_svg(f, title) + axes(x0, y0, x1, y1);
  svg += label((x0 + x1) / 2, y1 + f.margin / 2, "actual");
  svg += label(x0 - 6, y1, tick(r.lo), "end");
  svg += label(x0 - 6, y0 + 4, tick(r.hi), "end");
  svg += fmt::format("<line class=\"identity\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n",
                     px(x0), px(y1), px(x1), px(y0));
  for (std::size_t i = 0; i < n; ++i) {
    svg += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"darkorange\"/>\n", px(x0 + side * r.unit(actual[i])),
                       px(y1 - side * r.unit(predicted[i])));
  }
  svg += "</svg>\n";
  return svg;
}

std::string correlation_svg(const behavior::CorrelationReport& report, const PlotFrame& f) {
  const double x0 = f.margin * 3, x1 = f.width - f.margin;
  const double mid = (x0 + x1) / 2, half = (x1 - x0) / 2;
  const std::size_t rows = std::max<std::size_t>(report.pairs.size() + report.omitted.size(), 1);
  const double band = (f.height - 2 * f.margin) / static_cast<double>(rows);

  std::string svg = open_svg(f, "SOC correlations");
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", px(mid), px(f.margin),
                     px(f.height - f.margin));
  svg += label(x0, f.height - f.margin / 2, "-1");
  svg += label(mid, f.height - f.margin / 2, "0");
  svg += label(x1, f.height - f.margin / 2, "1");
  double y = f.margin;
  for (const auto& p : report.pairs) {
    const double len = half * std::abs(p.r);
    const double left = p.r < 0 ? mid - len : mid;
    svg += label(x0 - 8, y + band / 2 + 4, p.a + " vs " + p.b, "end");
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", px(left), px(y + band * 0.2),
                       px(len), px(band * 0.6), p.r < 0 ? "indianred" : "seagreen");
    svg += label(p.r < 0 ? left - 4 : left + len + 4, y + band / 2 + 4, fmt::format("{:.3f}", p.r),
                 p.r < 0 ? "end" : "start");
    y += band;
  }
  for (const auto& o : report.omitted) {
    svg += label(x0 - 8, y + band / 2 + 4, o.a + " vs " + o.b, "end");
    svg += label(mid + 4, y + band / 2 + 4, "omitted: " + o.reason, "start");
    y += band;
  }
  svg += "</svg>\n";
  return svg;
}

std::optional<std::string> series_svg(const SeriesArchive& series, const PlotFrame& f) {
  if (series.values.empty()) return std::nullopt;
  const double x0 = f.margin, x1 = f.width - f.margin;
  const double y0 = f.margin, y1 = f.height - f.margin;
  const Range r = Range::of(series.values);
  const double steps = series.values.size() > 1 ? static_cast<double>(series.values.size() - 1) : 1.0;
  auto point = [&](std::size_t i) {
    return px(x0 + (x1 - x0) * static_cast<double>(i) / steps) + "," + px(y1 - (y1 - y0) * r.unit(series.values[i]));
  };

  std::string svg = open_svg(f, series.name) + axes(x0, y0, x1, y1);
  svg += label((x0 + x1) / 2, f.height - f.margin / 4, "bucket");
  svg += label(x0 - 6, y1, tick(r.lo), "end");
  svg += label(x0 - 6, y0 + 4, tick(r.hi), "end");
  const std::size_t observed = std::clamp<std::size_t>(series.observed, 1, series.values.size());
  svg += "<polyline class=\"observed\" fill=\"none\" stroke=\"steelblue\" points=\"";
  for (std::size_t i = 0; i < observed; ++i) svg += (i ? " " : "") + point(i);
  svg += "\"/>\n";
  if (observed < series.values.size()) {
    svg += "<polyline class=\"extension\" fill=\"none\" stroke=\"darkorange\" points=\"";
    for (std::size_t i = observed - 1; i < series.values.size(); ++i) svg += (i + 1 > observed ? " " : "") + point(i);
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

PlotSet emit_plots(const ScenarioResult& result, std::span<const SeriesArchive> archive) {
  PlotSet set;
  for (const auto& f : result.forecasts) {
    if (auto svg = loss_curve_svg(f.diagnostics.loss_curve, "Training loss: " + f.series)) {
      set.files.push_back({"loss_" + f.series + ".svg", std::move(*svg)});
    } else {
      set.notes.push_back(fmt::format("loss plot for {} skipped: empty loss curve", f.series));
    }
    if (auto svg = scatter_svg(f.diagnostics.test_actual, f.diagnostics.test_predicted, "Test fit: " + f.series)) {
      set.files.push_back({"fit_" + f.series + ".svg", std::move(*svg)});
    } else {
      set.notes.push_back(fmt::format("fit plot for {} skipped: no test predictions", f.series));
    }
  }
  if (result.correlations.pairs.empty() && result.correlations.omitted.empty()) {
    set.notes.push_back("correlation plot skipped: no correlations");
  } else {
    set.files.push_back({"correlations.svg", correlation_svg(result.correlations)});
  }
  for (const auto& s : archive) {
    if (auto svg = series_svg(s)) set.files.push_back({"series_" + s.name + ".svg", std::move(*svg)});
  }
  return set;
}

}  // namespace nevsim::scenario
