#include "rsed/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "rsed/report.hpp"

namespace rsed {
namespace {

constexpr int kFramesPerCell = 4;
constexpr int kBinsPerCell = 2;
constexpr int kGrayLevels = 16;
constexpr double kDynamicRangeDb = 80.0;

const char* kind_color(EventKind k) {
  switch (k) {
    case EventKind::I: return "#1f77b4";
    case EventKind::E: return "#2ca02c";
    case EventKind::C: return "#d62728";
  }
  return "#000000";
}

std::string num(double v) { return format_fixed(v, 3); }

std::string xml_escape(const std::string& s) {
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

void heatmap(std::ostream& os, const Spectrogram& spec, const PlotGeometry& g) {
  const auto frames = static_cast<int>(spec.power.rows());
  const auto bins = static_cast<int>(spec.power.cols());
  if (frames == 0 || bins == 0) return;
  const int cols = (frames + kFramesPerCell - 1) / kFramesPerCell;
  const int rows = (bins + kBinsPerCell - 1) / kBinsPerCell;

  std::vector<double> db(static_cast<std::size_t>(cols) * rows);
  double top = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double sum = 0.0;
      int n = 0;
      for (int f = c * kFramesPerCell; f < std::min(frames, (c + 1) * kFramesPerCell); ++f) {
        for (int b = r * kBinsPerCell; b < std::min(bins, (r + 1) * kBinsPerCell); ++b) {
          sum += spec.power(f, b);
          ++n;
        }
      }
      const double v = 10.0 * std::log10(sum / n + 1e-12);
      db[static_cast<std::size_t>(r) * cols + c] = v;
      top = std::max(top, v);
    }
  }
  const double floor_db = top - kDynamicRangeDb;
  const double cell_w = g.plot_width * kFramesPerCell / static_cast<double>(frames);
  const double cell_h = g.spec_height / rows;

  os << "<g shape-rendering=\"crispEdges\">\n";
  for (int r = 0; r < rows; ++r) {
    const double y = g.spec_top + g.spec_height - (r + 1) * cell_h;
    int c = 0;
    while (c < cols) {
      const auto level_at = [&](int cc) {
        const double v = std::clamp((db[static_cast<std::size_t>(r) * cols + cc] - floor_db) / kDynamicRangeDb, 0.0, 1.0);
        return static_cast<int>(std::lround(v * (kGrayLevels - 1)));
      };
      const int level = level_at(c);
      int run = c + 1;
      while (run < cols && level_at(run) == level) ++run;
      const int shade = 255 - level * 255 / (kGrayLevels - 1);
      char color[8];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", shade, shade, shade);
      const double w = std::min(run * cell_w, g.plot_width) - c * cell_w;
      os << "<rect x=\"" << num(g.left + c * cell_w) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
         << "\" height=\"" << num(cell_h) << "\" fill=\"" << color << "\"/>\n";
      c = run;
    }
  }
  os << "</g>\n";
}

}  // namespace

std::vector<PlotBar> plot_bars(std::span<const LabelEvent> labels,
                               std::span<const DetectedEvent> detections, const PlotGeometry& g) {
  std::vector<PlotBar> out;
  const auto add = [&](EventKind kind, bool truth, double s, double e) {
    PlotBar b;
    b.kind = kind;
    b.truth = truth;
    b.start_s = s;
    b.end_s = e;
    b.x = g.x_of(s);
    b.width = g.x_of(e) - b.x;
    b.y = (truth ? g.truth_top : g.detect_top) + static_cast<int>(kind) * g.lane_row + 2.0;
    b.height = g.lane_row - 4.0;
    out.push_back(b);
  };
  for (const LabelEvent& e : labels) add(e.kind, true, e.start_s, e.end_s);
  for (const DetectedEvent& e : detections) add(e.kind, false, e.start_s, e.end_s);
  return out;
}

std::string render_svg(const std::string& title, const Spectrogram& spec,
                       std::span<const LabelEvent> labels,
                       std::span<const DetectedEvent> detections) {
  const PlotGeometry g;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(g.width()) << "\" height=\""
     << num(g.height()) << "\" viewBox=\"0 0 " << num(g.width()) << ' ' << num(g.height())
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n"
     << "<text x=\"" << num(g.left) << "\" y=\"20\" font-size=\"14\">" << xml_escape(title) << "</text>\n";

  for (EventKind k : kAllKinds) {
    const double row = static_cast<int>(k) * g.lane_row + g.lane_row * 0.7;
    os << "<text x=\"8\" y=\"" << num(g.truth_top + row) << "\">truth " << to_char(k) << "</text>\n"
       << "<text x=\"8\" y=\"" << num(g.detect_top + row) << "\">pred " << to_char(k) << "</text>\n";
  }
  os << "<rect x=\"" << num(g.left) << "\" y=\"" << num(g.truth_top) << "\" width=\"" << num(g.plot_width)
     << "\" height=\"" << num(3 * g.lane_row) << "\" fill=\"none\" stroke=\"#999999\"/>\n"
     << "<rect x=\"" << num(g.left) << "\" y=\"" << num(g.detect_top) << "\" width=\"" << num(g.plot_width)
     << "\" height=\"" << num(3 * g.lane_row) << "\" fill=\"none\" stroke=\"#999999\"/>\n";

  heatmap(os, spec, g);
  os << "<text x=\"8\" y=\"" << num(g.spec_top + 12) << "\">2000 Hz</text>\n"
     << "<text x=\"8\" y=\"" << num(g.spec_top + g.spec_height) << "\">0 Hz</text>\n";

  for (const PlotBar& b : plot_bars(labels, detections, g)) {
    os << "<rect x=\"" << num(b.x) << "\" y=\"" << num(b.y) << "\" width=\"" << num(b.width)
       << "\" height=\"" << num(b.height) << "\" fill=\"" << kind_color(b.kind) << "\"/>\n";
  }

  const double axis_y = g.detect_top + 3 * g.lane_row;
  for (int s = 0; s <= static_cast<int>(kClipSeconds); ++s) {
    const double x = g.x_of(s);
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(axis_y) << "\" x2=\"" << num(x) << "\" y2=\""
       << num(axis_y + 5) << "\" stroke=\"#000000\"/>\n"
       << "<text x=\"" << num(x) << "\" y=\"" << num(axis_y + 18) << "\" text-anchor=\"middle\">" << s
       << "</text>\n";
  }
  os << "<text x=\"" << num(g.left + g.plot_width / 2) << "\" y=\"" << num(axis_y + 34)
     << "\" text-anchor=\"middle\">time (s)</text>\n"
     << "</svg>\n";
  return os.str();
}

std::vector<PlotBar> emit_plot(const std::filesystem::path& path, const std::string& title,
                               const Spectrogram& spec, std::span<const LabelEvent> labels,
                               std::span<const DetectedEvent> detections) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write plot " + path.string());
  out << render_svg(title, spec, labels, detections);
  if (!out) throw DataError("failed writing plot " + path.string());
  return plot_bars(labels, detections);
}

}  // namespace rsed
