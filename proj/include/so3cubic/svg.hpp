#pragma once

// Minimal static SVG line plots of 3D curves under an orthographic camera.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "so3cubic/io.hpp"
#include "so3cubic/so3_algebra.hpp"

namespace so3cubic {

/// Orthographic view direction given by azimuth (about the third axis) and
/// elevation, both in degrees.
struct Projection {
  double azimuth_deg = 35.0;
  double elevation_deg = 25.0;

  static Projection plane(const std::string& name) {
    if (name == "xy") return {-90.0, 90.0};
    if (name == "xz") return {-90.0, 0.0};
    if (name == "yz") return {0.0, 0.0};
    throw Error(ErrorCode::InvalidArgument, "unknown projection plane '" + name + "'");
  }

  std::pair<double, double> operator()(const So3Vector& p) const {
    const double az = azimuth_deg * kPi / 180.0;
    const double el = elevation_deg * kPi / 180.0;
    const So3Vector right(-std::sin(az), std::cos(az), 0.0);
    const So3Vector up(-std::sin(el) * std::cos(az), -std::sin(el) * std::sin(az), std::cos(el));
    return {right.dot(p), up.dot(p)};
  }
};

class SvgPlot {
 public:
  struct Curve {
    std::string label;
    std::string color;
    bool dashed = false;
    std::vector<So3Vector> points;
  };
  struct Marker {
    std::string label;
    std::string color;
    So3Vector point;
  };

  SvgPlot(std::string title, Projection projection) : title_(std::move(title)), proj_(projection) {}

  void add_curve(Curve c) { curves_.push_back(std::move(c)); }
  void add_marker(Marker m) { markers_.push_back(std::move(m)); }

  void write(std::ostream& os) const {
    constexpr double width = 800.0, height = 640.0, margin = 48.0;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    auto extend = [&](const So3Vector& p) {
      const auto [x, y] = proj_(p);
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    };
    for (const auto& c : curves_) std::for_each(c.points.begin(), c.points.end(), extend);
    for (const auto& m : markers_) extend(m.point);
    if (!std::isfinite(xmin)) xmin = xmax = ymin = ymax = 0.0;
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double scale = std::min(width, height - 40.0) / span * (1.0 - 2.0 * margin / width);
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    auto to_screen = [&](const So3Vector& p) {
      const auto [x, y] = proj_(p);
      return std::pair{0.5 * width + (x - cx) * scale, 0.5 * height + 20.0 - (y - cy) * scale};
    };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"16\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" << title_ << "</text>\n";
    double legend_y = 44.0;
    for (const auto& c : curves_) {
      os << "<polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"1.5\"";
      if (c.dashed) os << " stroke-dasharray=\"6,4\"";
      os << " points=\"";
      for (std::size_t i = 0; i < c.points.size(); ++i) {
        const auto [x, y] = to_screen(c.points[i]);
        if (i) os << ' ';
        os << format_coord(x) << ',' << format_coord(y);
      }
      os << "\"/>\n";
      os << "<text x=\"16\" y=\"" << legend_y << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
         << c.color << "\">" << c.label << "</text>\n";
      legend_y += 16.0;
    }
    for (const auto& m : markers_) {
      const auto [x, y] = to_screen(m.point);
      os << "<circle cx=\"" << format_coord(x) << "\" cy=\"" << format_coord(y) << "\" r=\"3\" fill=\""
         << m.color << "\"/>\n";
      if (!m.label.empty()) {
        os << "<text x=\"" << format_coord(x + 5.0) << "\" y=\"" << format_coord(y - 5.0)
           << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" << m.color << "\">" << m.label
           << "</text>\n";
      }
    }
    os << "</svg>\n";
  }

 private:
  static std::string format_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
  }

  std::string title_;
  Projection proj_;
  std::vector<Curve> curves_;
  std::vector<Marker> markers_;
};

}  // namespace so3cubic
