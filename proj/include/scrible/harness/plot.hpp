#ifndef SCRIBLE_HARNESS_PLOT_HPP
#define SCRIBLE_HARNESS_PLOT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "scrible/error.hpp"

namespace scrible::harness {

/// Mean regret against epsilon, one series per algorithm.
struct PlotData {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
};

inline nlohmann::ordered_json plot_to_json(const PlotData& p) {
  nlohmann::ordered_json j;
  j["seed"] = p.seed;
  j["config_hash"] = p.config_hash;
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [name, pts] : p.series) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [x, y] : pts) arr.push_back({x, y});
    s[name] = arr;
  }
  j["series"] = s;
  return j;
}

template <class Json>
PlotData plot_from_json(const Json& j) {
  PlotData p;
  try {
    p.seed = j.at("seed").template get<std::uint64_t>();
    p.config_hash = j.at("config_hash").template get<std::string>();
    for (const auto& [name, arr] : j.at("series").items())
      for (const auto& pt : arr) p.series[name].push_back({pt.at(0).template get<double>(), pt.at(1).template get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("plot data is malformed: ") + e.what());
  }
  return p;
}

namespace detail {

inline std::string num(double v, const char* f = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

inline std::string series_color(const std::string& name, std::size_t index) {
  if (name == "algorithm1") return "#e6a800";
  if (name == "scrible_baseline") return "#1f77b4";
  static const char* const extra[] = {"#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  return extra[index % 4];
}

inline std::pair<double, double> padded_range(double lo, double hi) {
  if (hi - lo <= 0.0) {
    const double pad = std::max(std::abs(lo) * 0.1, 1e-3);
    return {lo - pad, hi + pad};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

inline std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

}  // namespace detail

/// Self-contained SVG line chart. Series with a single point are drawn as markers only.
inline std::string render_svg(const PlotData& p) {
  constexpr double W = 640, H = 400, left = 80, right = 170, top = 30, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& [name, pts] : p.series)
    for (const auto& [x, y] : pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!std::isfinite(xmin)) xmin = xmax = ymin = ymax = 0.0;
  const auto [x0, x1] = detail::padded_range(xmin, xmax);
  const auto [y0, y1] = detail::padded_range(ymin, ymax);
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " "
    << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    const std::string X = detail::num(sx(xv)), Y = detail::num(sy(yv));
    o << "<line x1=\"" << X << "\" y1=\"" << detail::num(top + ph) << "\" x2=\"" << X << "\" y2=\""
      << detail::num(top + ph + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << X << "\" y=\"" << detail::num(top + ph + 18) << "\" text-anchor=\"middle\">"
      << detail::num(xv, "%.4g") << "</text>\n";
    o << "<line x1=\"" << detail::num(left - 5) << "\" y1=\"" << Y << "\" x2=\"" << detail::num(left) << "\" y2=\"" << Y
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << detail::num(left - 8) << "\" y=\"" << Y << "\" text-anchor=\"end\" dominant-baseline=\"middle\">"
      << detail::num(yv, "%.4g") << "</text>\n";
  }
  o << "<text x=\"" << detail::num(left + pw / 2) << "\" y=\"" << detail::num(H - 22)
    << "\" text-anchor=\"middle\">ε</text>\n";
  o << "<text x=\"18\" y=\"" << detail::num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << detail::num(top + ph / 2) << ")\">mean regret</text>\n";

  std::size_t index = 0;
  for (const auto& [name, pts] : p.series) {
    const std::string color = detail::series_color(name, index);
    if (pts.size() == 1) {
      o << "<circle cx=\"" << detail::num(sx(pts[0].first)) << "\" cy=\"" << detail::num(sy(pts[0].second))
        << "\" r=\"4\" fill=\"" << color << "\"/>\n";
    } else if (!pts.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i)
        o << (i ? " " : "") << detail::num(sx(pts[i].first)) << "," << detail::num(sy(pts[i].second));
      o << "\"/>\n";
    }
    const double ly = top + 10 + 20.0 * static_cast<double>(index);
    o << "<line x1=\"" << detail::num(left + pw + 15) << "\" y1=\"" << detail::num(ly) << "\" x2=\""
      << detail::num(left + pw + 40) << "\" y2=\"" << detail::num(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << detail::num(left + pw + 45) << "\" y=\"" << detail::num(ly)
      << "\" dominant-baseline=\"middle\">" << detail::escape(name) << "</text>\n";
    ++index;
  }
  o << "<text x=\"" << detail::num(W - 8) << "\" y=\"" << detail::num(H - 6) << "\" text-anchor=\"end\" font-size=\"10\">seed "
    << p.seed << ", config " << detail::escape(p.config_hash) << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

/// Reads the plot data from a sweep.json / summary.json file or a directory
/// holding one, and writes the SVG to `out`.
inline std::filesystem::path emit_plot(const std::filesystem::path& from, std::filesystem::path out = {}) {
  namespace fs = std::filesystem;
  fs::path src = from;
  if (fs::is_directory(from)) {
    if (fs::exists(from / "sweep.json")) src = from / "sweep.json";
    else if (fs::exists(from / "summary.json")) src = from / "summary.json";
    else throw ConfigError("no sweep.json or summary.json in '" + from.string() + "'");
  }
  std::ifstream in(src);
  if (!in) throw ConfigError("cannot open artifacts '" + src.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse '" + src.string() + "': " + e.what());
  }
  if (!j.contains("plot")) throw ConfigError("'" + src.string() + "' has no plot data");
  if (out.empty()) out = src.parent_path() / (src.stem().string() == "sweep" ? "sweep.svg" : "plot.svg");
  std::ofstream o(out, std::ios::binary);
  if (!o) throw Error("cannot open '" + out.string() + "' for writing");
  o << render_svg(plot_from_json(j.at("plot")));
  if (!o.flush()) throw Error("write to '" + out.string() + "' failed");
  return out;
}

}  // namespace scrible::harness

#endif  // SCRIBLE_HARNESS_PLOT_HPP
