#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <string>

#include "sigconc/errors.hpp"
#include "sigconc/harness.hpp"
#include "sigconc/io.hpp"

namespace sigconc::harness {

namespace {

constexpr double kLeft = 70.0, kRight = 610.0, kTop = 30.0, kBottom = 430.0;
constexpr double kLogFloor = -6.0;
constexpr int kReferencePoints = 200;

const char* const kCurveColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};
const char* const kReferenceColors[] = {"#555555", "#ff7f0e", "#17becf", "#bcbd22"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Mapping {
  double t_max;
  double x(double t) const { return kLeft + (kRight - kLeft) * t / t_max; }
  double y(double survival) const {
    return kTop + (kBottom - kTop) * (-std::log10(survival)) / (-kLogFloor);
  }
};

std::string polyline(const Mapping& map, const std::vector<double>& t, const std::vector<double>& s,
                     const std::string& color, bool dashed) {
  std::string pts;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(s[i] >= std::pow(10.0, kLogFloor)) || t[i] < 0.0 || t[i] > map.t_max) continue;
    if (!pts.empty()) pts += ' ';
    pts += fmt(map.x(t[i])) + "," + fmt(map.y(std::min(s[i], 1.0)));
  }
  std::string line = "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"";
  if (dashed) line += " stroke-dasharray=\"6,4\"";
  return line + " points=\"" + pts + "\"/>\n";
}

}  // namespace

std::string emit_plot(std::span<const PlotCurve> curves, std::span<const int> reference_k) {
  if (curves.empty() && reference_k.empty()) throw DomainError("emit_plot: nothing to draw");
  for (const auto& c : curves)
    if (c.t.size() != c.survival.size() || c.t.empty()) throw DomainError("emit_plot: malformed curve " + c.label);
  for (int k : reference_k)
    if (k < 1) throw DomainError("emit_plot: reference k must be >= 1");

  double t_max = 0.0;
  for (const auto& c : curves) t_max = std::max(t_max, *std::max_element(c.t.begin(), c.t.end()));
  t_max = curves.empty() ? 6.0 : std::max(1.0, std::ceil(t_max));
  const Mapping map{t_max};

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(kRight - kLeft) + "\" height=\"" +
         fmt(kBottom - kTop) + "\" fill=\"none\" stroke=\"black\"/>\n";

  const int x_ticks = static_cast<int>(t_max);
  const int x_stride = std::max(1, x_ticks / 10);
  for (int i = 0; i <= x_ticks; i += x_stride) {
    const double x = map.x(i);
    svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kBottom) + "\" x2=\"" + fmt(x) + "\" y2=\"" + fmt(kBottom + 5) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kBottom + 18) + "\" text-anchor=\"middle\">" +
           std::to_string(i) + "</text>\n";
  }
  for (int e = 0; e >= static_cast<int>(kLogFloor); --e) {
    const double y = map.y(std::pow(10.0, e));
    svg += "<line x1=\"" + fmt(kLeft - 5) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kLeft) + "\" y2=\"" + fmt(y) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(y + 4) + "\" text-anchor=\"end\">1e" +
           std::to_string(e) + "</text>\n";
  }
  svg += "<text x=\"" + fmt((kLeft + kRight) / 2) + "\" y=\"" + fmt(kBottom + 40) +
         "\" text-anchor=\"middle\">t</text>\n";
  svg += "<text x=\"20\" y=\"" + fmt((kTop + kBottom) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         fmt((kTop + kBottom) / 2) + ")\">P(|F| &gt;= t)</text>\n";

  std::vector<std::pair<std::string, std::string>> legend;
  for (std::size_t r = 0; r < reference_k.size(); ++r) {
    const int k = reference_k[r];
    std::vector<double> t(kReferencePoints + 1), s(kReferencePoints + 1);
    for (int i = 0; i <= kReferencePoints; ++i) {
      t[i] = t_max * i / kReferencePoints;
      s[i] = std::exp(-std::pow(t[i], 2.0 / k));
    }
    const std::string color = kReferenceColors[r % std::size(kReferenceColors)];
    svg += polyline(map, t, s, color, true);
    legend.emplace_back(color, "exp(-t^(2/" + std::to_string(k) + "))");
  }
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const std::string color = kCurveColors[c % std::size(kCurveColors)];
    svg += polyline(map, curves[c].t, curves[c].survival, color, false);
    legend.emplace_back(color, curves[c].label);
  }
  for (std::size_t i = 0; i < legend.size(); ++i) {
    const double y = kTop + 15 + 16.0 * static_cast<double>(i);
    svg += "<line x1=\"" + fmt(kRight - 170) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kRight - 145) + "\" y2=\"" +
           fmt(y) + "\" stroke=\"" + legend[i].first + "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"" + fmt(kRight - 140) + "\" y=\"" + fmt(y + 4) + "\">" + escape(legend[i].second) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

PlotCurve read_tail_csv(std::istream& in, std::string label) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("tail CSV is empty");
  const auto header = io::split_csv_line(line);
  const std::vector<std::string_view> expected{"threshold", "scaled_threshold", "survival", "std_err"};
  if (header != expected) throw DomainError("tail CSV header must be threshold,scaled_threshold,survival,std_err");
  PlotCurve curve{std::move(label), {}, {}};
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (io::trim(line).empty()) continue;
    const auto fields = io::split_csv_line(line);
    if (fields.size() != 4) throw DomainError("tail CSV row " + std::to_string(row) + " must have 4 fields");
    curve.t.push_back(io::parse_double(fields[1]));
    curve.survival.push_back(io::parse_double(fields[2]));
  }
  if (curve.t.empty()) throw DomainError("tail CSV has no rows");
  return curve;
}

}  // namespace sigconc::harness
