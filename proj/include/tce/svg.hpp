#pragma once

// Small dependency-free SVG charts for the plot-data CSVs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "tce/core.hpp"

namespace tce::svg {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string o;
  for (char ch : s) {
    switch (ch) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += ch;
    }
  }
  return o;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors[i % 10];
}

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool step = false;
  bool dashed = false;
};

struct Bars {
  std::string name;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> height;
};

class Chart {
 public:
  Chart(std::string title, std::string x_label, std::string y_label)
      : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

  void add(Series s) { series_.push_back(std::move(s)); }
  void add(Bars b) { bars_.push_back(std::move(b)); }
  void points(std::vector<Vec2> p) { points_ = std::move(p); }
  void rect(Rect r, std::string label) { rects_.push_back({r, std::move(label)}); }
  void vline(double x, std::string label) { vlines_.push_back({x, std::move(label)}); }
  void x_range(double lo, double hi) { xr_ = {lo, hi}; }
  void y_range(double lo, double hi) { yr_ = {lo, hi}; }

  std::string render() const {
    auto [x0, x1, y0, y1] = bounds();
    const double w = 640, h = 400, left = 60, right = 150, top = 40, bottom = 50;
    const double pw = w - left - right, ph = h - top - bottom;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
      << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title_)
      << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
      o << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(top + ph + 15) << "\" text-anchor=\"middle\">"
        << num(xv) << "</text>\n";
      o << "<text x=\"" << num(left - 5) << "\" y=\"" << num(sy(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
        << "</text>\n";
    }
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">" << escape(x_label_)
      << "</text>\n";
    o << "<text transform=\"translate(15," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(y_label_) << "</text>\n";

    for (const auto& [r, label] : rects_) {
      o << "<rect x=\"" << num(sx(r.min.x)) << "\" y=\"" << num(sy(r.max.y)) << "\" width=\""
        << num(sx(r.max.x) - sx(r.min.x)) << "\" height=\"" << num(sy(r.min.y) - sy(r.max.y))
        << "\" fill=\"none\" stroke=\"#555\" stroke-dasharray=\"4 2\"/>\n";
      o << "<text x=\"" << num(sx(r.min.x) + 3) << "\" y=\"" << num(sy(r.max.y) + 12) << "\" fill=\"#555\">"
        << escape(label) << "</text>\n";
    }
    for (std::size_t b = 0; b < bars_.size(); ++b) {
      const auto& bar = bars_[b];
      const double n = static_cast<double>(bars_.size());
      for (std::size_t i = 0; i < bar.height.size(); ++i) {
        const double width = (bar.hi[i] - bar.lo[i]) / n;
        const double bx = bar.lo[i] + width * static_cast<double>(b);
        o << "<rect x=\"" << num(sx(bx)) << "\" y=\"" << num(sy(bar.height[i])) << "\" width=\""
          << num(sx(bx + width) - sx(bx)) << "\" height=\"" << num(sy(y0) - sy(bar.height[i])) << "\" fill=\""
          << palette(b) << "\" fill-opacity=\"0.8\"/>\n";
      }
    }
    if (!points_.empty()) {
      o << "<g fill=\"#1f77b4\" fill-opacity=\"0.25\">\n";
      for (const auto& p : points_) o << "<circle cx=\"" << num(sx(p.x)) << "\" cy=\"" << num(sy(p.y)) << "\" r=\"1\"/>\n";
      o << "</g>\n";
    }
    for (std::size_t s = 0; s < series_.size(); ++s) {
      const auto& se = series_[s];
      o << "<polyline fill=\"none\" stroke=\"" << palette(s) << "\" stroke-width=\"1.5\""
        << (se.dashed ? " stroke-dasharray=\"5 3\"" : "") << " points=\"";
      for (std::size_t i = 0; i < se.x.size(); ++i) {
        if (se.step && i > 0) o << num(sx(se.x[i])) << ',' << num(sy(se.y[i - 1])) << ' ';
        o << num(sx(se.x[i])) << ',' << num(sy(se.y[i])) << ' ';
      }
      o << "\"/>\n";
    }
    for (const auto& [x, label] : vlines_) {
      o << "<line x1=\"" << num(sx(x)) << "\" y1=\"" << top << "\" x2=\"" << num(sx(x)) << "\" y2=\"" << top + ph
        << "\" stroke=\"black\" stroke-dasharray=\"2 2\"/>\n";
      o << "<text x=\"" << num(sx(x) + 3) << "\" y=\"" << top + 12 << "\">" << escape(label) << "</text>\n";
    }
    std::size_t legend = 0;
    auto legend_entry = [&](const std::string& name, const char* color) {
      const double ly = top + 10 + 16.0 * static_cast<double>(legend++);
      o << "<rect x=\"" << left + pw + 10 << "\" y=\"" << ly - 8 << "\" width=\"10\" height=\"10\" fill=\"" << color
        << "\"/>\n<text x=\"" << left + pw + 25 << "\" y=\"" << ly << "\">" << escape(name) << "</text>\n";
    };
    for (std::size_t s = 0; s < series_.size(); ++s) legend_entry(series_[s].name, palette(s));
    for (std::size_t b = 0; b < bars_.size(); ++b) legend_entry(bars_[b].name, palette(b));
    o << "</svg>\n";
    return o.str();
  }

 private:
  struct Range {
    double lo, hi;
  };

  std::tuple<double, double, double, double> bounds() const {
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto take = [&](double x, double y) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    };
    for (const auto& s : series_)
      for (std::size_t i = 0; i < s.x.size(); ++i) take(s.x[i], s.y[i]);
    for (const auto& b : bars_)
      for (std::size_t i = 0; i < b.height.size(); ++i) {
        take(b.lo[i], 0.0);
        take(b.hi[i], b.height[i]);
      }
    for (const auto& p : points_) take(p.x, p.y);
    for (const auto& [r, label] : rects_) {
      take(r.min.x, r.min.y);
      take(r.max.x, r.max.y);
    }
    if (xr_) x0 = xr_->lo, x1 = xr_->hi;
    if (yr_) y0 = yr_->lo, y1 = yr_->hi;
    if (!std::isfinite(x0)) x0 = 0, x1 = 1;
    if (!std::isfinite(y0)) y0 = 0, y1 = 1;
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    return {x0, x1, y0, y1};
  }

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  std::vector<Bars> bars_;
  std::vector<Vec2> points_;
  std::vector<std::pair<Rect, std::string>> rects_;
  std::vector<std::pair<double, std::string>> vlines_;
  std::optional<Range> xr_, yr_;
};

}  // namespace tce::svg
