#include <algorithm>
#include <cmath>
#include <limits>

#include "bandgap_qed/cli.hpp"

namespace bgq::cli {
namespace {

constexpr double kWidth = 720.0, kHeight = 480.0;
constexpr double kLeft = 80.0, kRight = 170.0, kTop = 40.0, kBottom = 60.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const PlotSpec& plot, const std::vector<Series>& series) {
  const auto transform_y = [&](double y) { return plot.log_y ? std::log10(y) : y; };
  const auto usable = [&](double y) { return std::isfinite(y) && (!plot.log_y || y > 0.0); };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.y[i]) || !std::isfinite(s.x[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, transform_y(s.y[i]));
      y1 = std::max(y1, transform_y(s.y[i]));
    }
  }
  if (!(x1 > x0)) {
    x0 = std::isfinite(x0) ? x0 - 1.0 : 0.0;
    x1 = x0 + 2.0;
  }
  if (!(y1 > y0)) {
    y0 = std::isfinite(y0) ? y0 - 1.0 : 0.0;
    y1 = y0 + 2.0;
  }
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  const auto sy = [&](double y) { return kTop + (1.0 - (transform_y(y) - y0) / (y1 - y0)) * ph; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(kWidth) + "\" height=\"" + px(kHeight) +
         "\" viewBox=\"0 0 " + px(kWidth) + " " + px(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + px(kLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         escape(plot.title) + "</text>\n";
  out += "<rect x=\"" + px(kLeft) + "\" y=\"" + px(kTop) + "\" width=\"" + px(pw) + "\" height=\"" + px(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0;
    const double fy = y0 + (y1 - y0) * i / 4.0;
    const double X = kLeft + pw * i / 4.0, Y = kTop + ph * (1.0 - i / 4.0);
    out += "<line x1=\"" + px(X) + "\" y1=\"" + px(kTop + ph) + "\" x2=\"" + px(X) + "\" y2=\"" +
           px(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + px(X) + "\" y=\"" + px(kTop + ph + 20) + "\" text-anchor=\"middle\" font-size=\"11\">" +
           format_number(fx) + "</text>\n";
    out += "<line x1=\"" + px(kLeft - 5) + "\" y1=\"" + px(Y) + "\" x2=\"" + px(kLeft) + "\" y2=\"" + px(Y) +
           "\" stroke=\"black\"/>\n";
    const std::string label = plot.log_y ? "1e" + format_number(fy) : format_number(fy);
    out += "<text x=\"" + px(kLeft - 8) + "\" y=\"" + px(Y + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
           escape(label) + "</text>\n";
  }
  out += "<text x=\"" + px(kLeft + pw / 2) + "\" y=\"" + px(kHeight - 15) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + escape(plot.x_label) + "</text>\n";
  out += "<text x=\"18\" y=\"" + px(kTop + ph / 2) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
         px(kTop + ph / 2) + ")\">" + escape(plot.y_label) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    out += "<!-- series " + escape(s.name) + ":";
    for (std::size_t i = 0; i < s.x.size(); ++i) out += " " + format_number(s.x[i]) + "," + format_number(s.y[i]);
    out += " -->\n";
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.y[i])) continue;
      points += px(sx(s.x[i])) + "," + px(sy(s.y[i])) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + points +
           "\"/>\n";
    const double ly = kTop + 16.0 * (k + 1);
    out += "<line x1=\"" + px(kWidth - kRight + 12) + "\" y1=\"" + px(ly - 4) + "\" x2=\"" +
           px(kWidth - kRight + 36) + "\" y2=\"" + px(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + px(kWidth - kRight + 42) + "\" y=\"" + px(ly) + "\" font-size=\"11\">" + escape(s.name) +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace bgq::cli
