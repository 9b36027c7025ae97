#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgdlab/error.hpp"
#include "sgdlab/geometry.hpp"

namespace sgdlab {

/// Fixed 9-significant-digit formatting so repeated runs give byte-identical files.
inline std::string fmt9(double x) {
  std::ostringstream os;
  os.precision(9);
  os << x;
  return os.str();
}

struct Polyline {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<Vec2> points;
};

struct SvgPlot {
  std::string title;
  double width = 480.0;
  double height = 480.0;
  std::vector<Polyline> lines;
  std::vector<std::pair<Vec2, std::string>> markers;
  std::vector<std::pair<Vec2, Vec2>> arrows;  // (tail, head) in data coordinates

  std::string render() const {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    auto grow = [&](const Vec2& p) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    };
    for (const auto& l : lines) std::for_each(l.points.begin(), l.points.end(), grow);
    for (const auto& m : markers) grow(m.first);
    for (const auto& [a, b] : arrows) grow(a), grow(b);
    if (x0 > x1) x0 = y0 = 0.0, x1 = y1 = 1.0;
    const double span = std::max({x1 - x0, y1 - y0, 1e-12});
    const double pad = 40.0;
    const double s = std::min(width, height) - 2 * pad;
    auto px = [&](const Vec2& p) { return Vec2{pad + (p.x - x0) / span * s, height - pad - (p.y - y0) / span * s}; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt9(width) << "\" height=\"" << fmt9(height)
       << "\">\n";
    os << "<text x=\"" << fmt9(pad) << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
    double legend_y = 36.0;
    for (const auto& l : lines) {
      os << "<polyline fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1\" points=\"";
      for (std::size_t i = 0; i < l.points.size(); ++i) {
        const Vec2 q = px(l.points[i]);
        os << (i ? " " : "") << fmt9(q.x) << ',' << fmt9(q.y);
      }
      os << "\"/>\n";
      os << "<text x=\"" << fmt9(width - 150) << "\" y=\"" << fmt9(legend_y) << "\" font-size=\"11\" fill=\""
         << l.color << "\">" << l.label << "</text>\n";
      legend_y += 14.0;
    }
    for (const auto& [a, b] : arrows) {
      const Vec2 p = px(a), q = px(b);
      os << "<line x1=\"" << fmt9(p.x) << "\" y1=\"" << fmt9(p.y) << "\" x2=\"" << fmt9(q.x) << "\" y2=\""
         << fmt9(q.y) << "\" stroke=\"#555\" stroke-width=\"0.8\"/>\n";
      os << "<circle cx=\"" << fmt9(q.x) << "\" cy=\"" << fmt9(q.y) << "\" r=\"1.2\" fill=\"#555\"/>\n";
    }
    for (const auto& [p, label] : markers) {
      const Vec2 q = px(p);
      os << "<circle cx=\"" << fmt9(q.x) << "\" cy=\"" << fmt9(q.y) << "\" r=\"3\"/>\n";
      os << "<text x=\"" << fmt9(q.x + 5) << "\" y=\"" << fmt9(q.y - 5) << "\" font-size=\"11\">" << label
         << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
  }
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Records what was run and which files it produced.
struct RunManifest {
  std::string command;
  double wall_clock_seconds = 0.0;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> files;
  bool pass = true;

  nlohmann::json to_json() const {
    return {{"schema_version", 1},       {"artifact_version", kArtifactVersion},
            {"command", command},       {"seed", seed},
            {"wall_clock_seconds", wall_clock_seconds},
            {"config", config},    {"files", files},     {"pass", pass}};
  }
};

}  // namespace sgdlab
