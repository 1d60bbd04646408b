#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mccr {

// Small static SVG chart writer: line series, scatter markers, axes with
// round tick values, and a legend. Enough to mirror the paper's figures.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label)
      : title_(std::move(title)),
        x_label_(std::move(x_label)),
        y_label_(std::move(y_label)) {}

  void add_line(std::vector<std::pair<double, double>> points,
                const std::string& color, const std::string& label,
                double width = 2.0) {
    series_.push_back({std::move(points), color, label, width, Kind::kLine});
  }

  void add_scatter(std::vector<std::pair<double, double>> points,
                   const std::string& color, const std::string& label,
                   bool cross = false) {
    series_.push_back({std::move(points), color, label, cross ? 1.5 : 1.0,
                       cross ? Kind::kCross : Kind::kCircle});
  }

  void set_log_log(bool enabled) { log_log_ = enabled; }

  void write(const std::string& path) const {
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series_) {
      for (const auto& [x, y] : s.points) {
        const double tx = tr_x(x), ty = tr_y(y);
        if (!std::isfinite(tx) || !std::isfinite(ty)) continue;
        x_min = std::min(x_min, tx);
        x_max = std::max(x_max, tx);
        y_min = std::min(y_min, ty);
        y_max = std::max(y_max, ty);
      }
    }
    if (!(x_max >= x_min)) throw std::runtime_error("svg plot: no finite data");
    if (x_max == x_min) {
      x_min -= 0.5;
      x_max += 0.5;
    }
    if (y_max == y_min) {
      y_min -= 0.5;
      y_max += 0.5;
    }
    const double x_pad = 0.03 * (x_max - x_min);
    const double y_pad = 0.06 * (y_max - y_min);
    x_min -= x_pad;
    x_max += x_pad;
    y_min -= y_pad;
    y_max += y_pad;

    const double w = 760, h = 520, ml = 72, mr = 16, mt = 40, mb = 52;
    const double pw = w - ml - mr, ph = h - mt - mb;
    auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
    auto py = [&](double y) { return mt + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title_ << "</text>\n";

    // Gridlines and tick labels.
    for (const double t : ticks(x_min, x_max)) {
      const double x = px(t);
      out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(x)
          << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"#e0e0e0\"/>\n";
      out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(mt + ph + 18)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
          << tick_label(t) << "</text>\n";
    }
    for (const double t : ticks(y_min, y_max)) {
      const double y = py(t);
      out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(y) << "\" x2=\""
          << fmt(ml + pw) << "\" y2=\"" << fmt(y) << "\" stroke=\"#e0e0e0\"/>\n";
      out << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(y + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
          << tick_label(t) << "</text>\n";
    }
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#404040\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"" << h - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << axis_label(x_label_, false) << "</text>\n";
    out << "<text x=\"18\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << mt + ph / 2 << ")\">"
        << axis_label(y_label_, true) << "</text>\n";

    for (const auto& s : series_) {
      if (s.kind == Kind::kLine) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"" << s.width << "\" points=\"";
        for (const auto& [x, y] : s.points) {
          const double tx = tr_x(x), ty = tr_y(y);
          if (!std::isfinite(tx) || !std::isfinite(ty)) continue;
          out << fmt(px(tx)) << "," << fmt(py(ty)) << " ";
        }
        out << "\"/>\n";
      } else {
        for (const auto& [x, y] : s.points) {
          const double tx = tr_x(x), ty = tr_y(y);
          if (!std::isfinite(tx) || !std::isfinite(ty)) continue;
          const double cx = px(tx), cy = py(ty);
          if (s.kind == Kind::kCircle) {
            out << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy)
                << "\" r=\"3\" fill=\"none\" stroke=\"" << s.color << "\"/>\n";
          } else {
            out << "<path d=\"M" << fmt(cx - 3.2) << " " << fmt(cy - 3.2) << " L"
                << fmt(cx + 3.2) << " " << fmt(cy + 3.2) << " M" << fmt(cx - 3.2)
                << " " << fmt(cy + 3.2) << " L" << fmt(cx + 3.2) << " "
                << fmt(cy - 3.2) << "\" stroke=\"" << s.color
                << "\" stroke-width=\"1.6\"/>\n";
          }
        }
      }
    }

    // Legend, top-right corner of the plot area.
    double ly = mt + 14;
    for (const auto& s : series_) {
      if (s.label.empty()) continue;
      const double lx = ml + pw - 150;
      if (s.kind == Kind::kLine) {
        out << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 26
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color
            << "\" stroke-width=\"" << s.width << "\"/>\n";
      } else if (s.kind == Kind::kCircle) {
        out << "<circle cx=\"" << lx + 13 << "\" cy=\"" << ly - 4
            << "\" r=\"3\" fill=\"none\" stroke=\"" << s.color << "\"/>\n";
      } else {
        out << "<path d=\"M" << lx + 10 << " " << ly - 7 << " L" << lx + 16 << " "
            << ly - 1 << " M" << lx + 10 << " " << ly - 1 << " L" << lx + 16 << " "
            << ly - 7 << "\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"/>\n";
      }
      out << "<text x=\"" << lx + 32 << "\" y=\"" << ly
          << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
          << "</text>\n";
      ly += 18;
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("write failed: " + path);
  }

 private:
  enum class Kind { kLine, kCircle, kCross };
  struct Series {
    std::vector<std::pair<double, double>> points;
    std::string color;
    std::string label;
    double width;
    Kind kind;
  };

  double tr_x(double x) const { return log_log_ ? std::log10(x) : x; }
  double tr_y(double y) const { return log_log_ ? std::log10(y) : y; }

  std::string axis_label(const std::string& base, bool /*y*/) const {
    return log_log_ ? "log10 " + base : base;
  }

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
  }

  static std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
  }

  static std::vector<double> ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    if (raw / mag >= 5.0) {
      step = 5.0 * mag;
    } else if (raw / mag >= 2.0) {
      step = 2.0 * mag;
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step) {
      out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    }
    return out;
  }

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  bool log_log_ = false;
};

}  // namespace mccr
