#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rsed/eval.hpp"
#include "rsed/features.hpp"

namespace rsed {

/// Geometry of the SVG canvas; times map linearly onto [left, left + plot_width].
struct PlotGeometry {
  double left = 70.0;
  double plot_width = 1000.0;
  double truth_top = 40.0;
  double lane_row = 20.0;  // one row per event kind
  double spec_top = 110.0;
  double spec_height = 260.0;
  double detect_top = 380.0;
  double width() const { return left + plot_width + 30.0; }
  double height() const { return detect_top + 3 * lane_row + 40.0; }
  double x_of(double t_s) const { return left + t_s * plot_width / kClipSeconds; }
};

struct PlotBar {
  EventKind kind = EventKind::I;
  bool truth = true;
  double start_s = 0.0, end_s = 0.0;
  double x = 0.0, y = 0.0, width = 0.0, height = 0.0;
};

/// Truth bars in the upper lane, detections in the lower lane, one row per kind.
std::vector<PlotBar> plot_bars(std::span<const LabelEvent> labels,
                               std::span<const DetectedEvent> detections,
                               const PlotGeometry& g = {});

/// Log-power spectrogram heatmap with both event lanes. Byte-identical for identical inputs.
std::string render_svg(const std::string& title, const Spectrogram& spec,
                       std::span<const LabelEvent> labels,
                       std::span<const DetectedEvent> detections);

/// Writes render_svg(...) to `path`; returns the drawn bars.
std::vector<PlotBar> emit_plot(const std::filesystem::path& path, const std::string& title,
                               const Spectrogram& spec, std::span<const LabelEvent> labels,
                               std::span<const DetectedEvent> detections);

}  // namespace rsed
