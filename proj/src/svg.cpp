#include "storecast/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "storecast/errors.hpp"

namespace storecast {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0, kRight = 24.0, kTop = 44.0, kBottom = 56.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

const char* color_for(std::size_t i) { return kPalette[i % kPaletteSize]; }

std::string fmt(double v, const char* spec = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string tick_label(double v) {
  if (v == 0.0) return "0";  // avoid "-0"
  return fmt(v, "%.6g");
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  static Range of(double a, double b) { return {a, b}; }
};

Range empty_range() {
  return {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
}

/// Pad 5% each side; a degenerate span widens to +-0.5 around the value.
Range padded(Range r) {
  if (r.lo > r.hi) return {0.0, 1.0};
  if (r.lo == r.hi) return {r.lo - 0.5, r.hi + 0.5};
  const double pad = 0.05 * (r.hi - r.lo);
  return {r.lo - pad, r.hi + pad};
}

/// Tick positions at a "nice" step (1, 2 or 5 times a power of ten).
std::vector<double> nice_ticks(const Range& r, int target = 6) {
  const double span = r.hi - r.lo;
  if (!(span > 0.0)) return {r.lo};
  const double raw = span / std::max(1, target - 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  double t = std::ceil(r.lo / step) * step;
  for (; t <= r.hi + 1e-9 * step; t += step) {
    ticks.push_back(std::fabs(t) < 1e-12 * step ? 0.0 : t);
  }
  return ticks;
}

void require_finite(const std::vector<double>& v) {
  for (double value : v) {
    if (!std::isfinite(value)) raise(Errc::DegenerateData, "plot data must be finite");
  }
}

class Canvas {
 public:
  Canvas(const PlotSpec& spec, Range xr, Range yr) : x_(xr), y_(yr) {
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth, "%.0f") +
            "\" height=\"" + fmt(kHeight, "%.0f") + "\" viewBox=\"0 0 " +
            fmt(kWidth, "%.0f") + " " + fmt(kHeight, "%.0f") + "\">\n";
    out_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out_ += "<text x=\"" + fmt(kWidth / 2) +
            "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            "font-size=\"15\" fill=\"#222\">" +
            xml_escape(spec.title) + "</text>\n";
    axes(spec);
  }

  double sx(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * kPlotW; }
  double sy(double v) const { return kTop + kPlotH - (v - y_.lo) / (y_.hi - y_.lo) * kPlotH; }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const char* color) {
    out_ += "<polyline fill=\"none\" stroke=\"";
    out_ += color;
    out_ += "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out_ += ' ';
      out_ += fmt(sx(xs[i])) + "," + fmt(sy(ys[i]));
    }
    out_ += "\"/>\n";
  }

  void dots(const std::vector<double>& xs, const std::vector<double>& ys, const char* color) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      out_ += "<circle cx=\"" + fmt(sx(xs[i])) + "\" cy=\"" + fmt(sy(ys[i])) +
              "\" r=\"2.5\" fill=\"";
      out_ += color;
      out_ += "\" fill-opacity=\"0.7\"/>\n";
    }
  }

  void bar(double x0, double x1, double height, const char* color) {
    const double top = sy(height);
    out_ += "<rect x=\"" + fmt(sx(x0)) + "\" y=\"" + fmt(top) + "\" width=\"" +
            fmt(sx(x1) - sx(x0)) + "\" height=\"" + fmt(sy(0.0) - top) + "\" fill=\"";
    out_ += color;
    out_ += "\" fill-opacity=\"0.65\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
  }

  void cell(double px, double py, double w, double h, const std::string& color) {
    out_ += "<rect x=\"" + fmt(px) + "\" y=\"" + fmt(py) + "\" width=\"" + fmt(w) +
            "\" height=\"" + fmt(h) + "\" fill=\"" + color + "\"/>\n";
  }

  void legend(const std::vector<PlotSeries>& series) {
    if (series.size() < 2) return;
    const double x = kLeft + kPlotW - 150.0;
    double y = kTop + 14.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
      out_ += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(y - 4.0) + "\" x2=\"" +
              fmt(x + 22.0) + "\" y2=\"" + fmt(y - 4.0) + "\" stroke=\"";
      out_ += color_for(i);
      out_ += "\" stroke-width=\"2\"/>\n";
      out_ += "<text x=\"" + fmt(x + 28.0) + "\" y=\"" + fmt(y) +
              "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">" +
              xml_escape(series[i].label) + "</text>\n";
      y += 17.0;
    }
  }

  std::string finish() {
    out_ += "</svg>\n";
    return std::move(out_);
  }

 private:
  void axes(const PlotSpec& spec) {
    out_ += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(kPlotW) +
            "\" height=\"" + fmt(kPlotH) + "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (double t : nice_ticks(x_)) {
      const double px = sx(t);
      out_ += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(kTop + kPlotH) + "\" x2=\"" +
              fmt(px) + "\" y2=\"" + fmt(kTop + kPlotH + 5.0) + "\" stroke=\"#333\"/>\n";
      out_ += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(kTop + kPlotH + 19.0) +
              "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
              "fill=\"#222\">" +
              tick_label(t) + "</text>\n";
    }
    for (double t : nice_ticks(y_)) {
      const double py = sy(t);
      out_ += "<line x1=\"" + fmt(kLeft - 5.0) + "\" y1=\"" + fmt(py) + "\" x2=\"" +
              fmt(kLeft) + "\" y2=\"" + fmt(py) + "\" stroke=\"#333\"/>\n";
      out_ += "<text x=\"" + fmt(kLeft - 8.0) + "\" y=\"" + fmt(py + 4.0) +
              "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
              "fill=\"#222\">" +
              tick_label(t) + "</text>\n";
    }
    out_ += "<text x=\"" + fmt(kLeft + kPlotW / 2) + "\" y=\"" + fmt(kHeight - 14.0) +
            "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
            "fill=\"#222\">" +
            xml_escape(spec.x_label) + "</text>\n";
    out_ += "<text x=\"18\" y=\"" + fmt(kTop + kPlotH / 2) +
            "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
            "fill=\"#222\" transform=\"rotate(-90 18 " +
            fmt(kTop + kPlotH / 2) + ")\">" + xml_escape(spec.y_label) + "</text>\n";
  }

  Range x_, y_;
  std::string out_;
};

void require_series(const PlotSpec& spec, bool paired) {
  if (spec.series.empty()) raise(Errc::EmptySeries, "plot has no series");
  for (const auto& s : spec.series) {
    if (s.y.empty()) raise(Errc::EmptySeries, "series \"" + s.label + "\" is empty");
    require_finite(s.y);
    if (paired) {
      if (s.x.size() != s.y.size()) {
        raise(Errc::LengthMismatch, "series \"" + s.label + "\" x/y lengths differ");
      }
      require_finite(s.x);
    }
  }
}

std::string emit_xy(const PlotSpec& spec) {
  require_series(spec, true);
  Range xr = empty_range(), yr = empty_range();
  for (const auto& s : spec.series) {
    for (double v : s.x) xr.include(v);
    for (double v : s.y) yr.include(v);
  }
  Canvas canvas(spec, padded(xr), padded(yr));
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    if (spec.kind == PlotKind::Line) {
      canvas.polyline(spec.series[i].x, spec.series[i].y, color_for(i));
    } else {
      canvas.dots(spec.series[i].x, spec.series[i].y, color_for(i));
    }
  }
  canvas.legend(spec.series);
  return canvas.finish();
}

std::string emit_histogram(const PlotSpec& spec) {
  require_series(spec, false);
  if (spec.bins < 1) raise(Errc::BadFlag, "need at least one histogram bin");
  Range xr = empty_range();
  for (const auto& s : spec.series) {
    for (double v : s.y) xr.include(v);
  }
  if (xr.lo == xr.hi) xr = Range::of(xr.lo - 0.5, xr.hi + 0.5);

  const auto bins = static_cast<std::size_t>(spec.bins);
  const double width = (xr.hi - xr.lo) / static_cast<double>(bins);
  std::vector<std::vector<double>> counts(spec.series.size(), std::vector<double>(bins, 0.0));
  double peak = 1.0;
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    for (double v : spec.series[i].y) {
      auto b = static_cast<std::size_t>((v - xr.lo) / width);
      counts[i][std::min(b, bins - 1)] += 1.0;
    }
    peak = std::max(peak, *std::max_element(counts[i].begin(), counts[i].end()));
  }

  Canvas canvas(spec, xr, padded(Range::of(0.0, peak)));
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    for (std::size_t b = 0; b < bins; ++b) {
      const double x0 = xr.lo + static_cast<double>(b) * width;
      canvas.bar(x0, x0 + width, counts[i][b], color_for(i));
    }
  }
  canvas.legend(spec.series);
  return canvas.finish();
}

std::string emit_density(const PlotSpec& spec) {
  require_series(spec, false);
  constexpr std::size_t kGridPoints = 200;
  std::vector<std::vector<double>> xs(spec.series.size()), ys(spec.series.size());
  Range xr = empty_range(), yr = Range::of(0.0, 0.0);
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const auto& sample = spec.series[i].y;
    const auto n = static_cast<double>(sample.size());
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : sample) var += (v - mean) * (v - mean);
    var /= std::max(1.0, n - 1.0);
    // Silverman's rule; a constant sample still gets a positive bandwidth
    double bw = 1.06 * std::sqrt(var) * std::pow(n, -0.2);
    if (bw <= 0.0) bw = 1.0;

    const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
    const double lo = *mn - 3.0 * bw, hi = *mx + 3.0 * bw;
    for (std::size_t g = 0; g < kGridPoints; ++g) {
      const double x = lo + (hi - lo) * static_cast<double>(g) /
                                static_cast<double>(kGridPoints - 1);
      double density = 0.0;
      for (double v : sample) {
        const double z = (x - v) / bw;
        density += std::exp(-0.5 * z * z);
      }
      density /= n * bw * std::sqrt(2.0 * 3.14159265358979323846);
      xs[i].push_back(x);
      ys[i].push_back(density);
      yr.include(density);
    }
    xr.include(lo);
    xr.include(hi);
  }

  Canvas canvas(spec, xr, padded(yr));
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    canvas.polyline(xs[i], ys[i], color_for(i));
  }
  canvas.legend(spec.series);
  return canvas.finish();
}

/// Five-stop blue-to-yellow ramp, interpolated per channel.
std::string heat_color(double t) {
  static constexpr int stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(t));
  const double f = t - k;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
  return buf;
}

std::string emit_heatmap(const PlotSpec& spec) {
  if (spec.grid.empty() || spec.grid_rows == 0 || spec.grid_cols == 0) {
    raise(Errc::EmptySeries, "heatmap grid is empty");
  }
  if (spec.grid.size() != spec.grid_rows * spec.grid_cols) {
    raise(Errc::LengthMismatch, "heatmap grid size does not match its dimensions");
  }
  if (!(spec.grid_x1 > spec.grid_x0) || !(spec.grid_y1 > spec.grid_y0)) {
    raise(Errc::BadFlag, "heatmap axis ranges must be increasing");
  }
  require_finite(spec.grid);

  const auto [mn, mx] = std::minmax_element(spec.grid.begin(), spec.grid.end());
  const double lo = *mn, span = *mx - *mn;
  Canvas canvas(spec, Range::of(spec.grid_x0, spec.grid_x1),
                Range::of(spec.grid_y0, spec.grid_y1));
  const double cw = kPlotW / static_cast<double>(spec.grid_cols);
  const double ch = kPlotH / static_cast<double>(spec.grid_rows);
  for (std::size_t r = 0; r < spec.grid_rows; ++r) {
    for (std::size_t c = 0; c < spec.grid_cols; ++c) {
      const double v = spec.grid[r * spec.grid_cols + c];
      const double t = span > 0.0 ? (v - lo) / span : 0.5;
      // row 0 at the bottom
      canvas.cell(kLeft + static_cast<double>(c) * cw,
                  kTop + kPlotH - static_cast<double>(r + 1) * ch, cw, ch, heat_color(t));
    }
  }
  return canvas.finish();
}

}  // namespace

std::string emit_svg(const PlotSpec& spec) {
  switch (spec.kind) {
    case PlotKind::Line:
    case PlotKind::Scatter: return emit_xy(spec);
    case PlotKind::Histogram: return emit_histogram(spec);
    case PlotKind::Density: return emit_density(spec);
    case PlotKind::Heatmap: return emit_heatmap(spec);
  }
  raise(Errc::KindMismatch, "unknown plot kind");
}

}  // namespace storecast
