#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace bds::tools {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 60.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", v);
  return buffer;
}

double transform(double v, bool log_scale) {
  if (!log_scale) return v;
  if (!(v > 0.0)) throw std::invalid_argument("log-scale plot needs positive values");
  return std::log10(v);
}

}  // namespace

void emit_plot(const std::string& path, const std::vector<PlotSeries>& series,
               const PlotOptions& options) {
  if (series.empty()) throw std::invalid_argument("emit_plot: no series");

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    if (s.points.empty()) throw std::invalid_argument("emit_plot: empty series");
    for (const auto& [x, y] : s.points) {
      const double tx = transform(x, options.log_x);
      const double ty = transform(y, options.log_y);
      xmin = std::min(xmin, tx);
      xmax = std::max(xmax, tx);
      ymin = std::min(ymin, ty);
      ymax = std::max(ymax, ty);
    }
  }
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }

  auto sx = [&](double x) {
    return kMargin + (transform(x, options.log_x) - xmin) / (xmax - xmin) * (kWidth - 2 * kMargin);
  };
  auto sy = [&](double y) {
    return kHeight - kMargin -
           (transform(y, options.log_y) - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin);
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << options.title << "</text>\n";

  // Axes.
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
      << "\" text-anchor=\"middle\" font-size=\"12\">" << options.x_label
      << (options.log_x ? " (log)" : "") << "</text>\n";
  out << "<text x=\"18\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 18 " << kHeight / 2
      << ")\">" << options.y_label << (options.log_y ? " (log)" : "") << "</text>\n";

  // Tick labels at the corners of the data range.
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16
      << "\" font-size=\"10\" text-anchor=\"middle\">"
      << num(options.log_x ? std::pow(10.0, xmin) : xmin) << "</text>\n";
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16
      << "\" font-size=\"10\" text-anchor=\"middle\">"
      << num(options.log_x ? std::pow(10.0, xmax) : xmax) << "</text>\n";
  out << "<text x=\"" << kMargin - 6 << "\" y=\"" << kHeight - kMargin
      << "\" font-size=\"10\" text-anchor=\"end\">"
      << num(options.log_y ? std::pow(10.0, ymin) : ymin) << "</text>\n";
  out << "<text x=\"" << kMargin - 6 << "\" y=\"" << kMargin + 4
      << "\" font-size=\"10\" text-anchor=\"end\">"
      << num(options.log_y ? std::pow(10.0, ymax) : ymax) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[s].points) out << num(sx(x)) << ',' << num(sy(y)) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : series[s].points)
      out << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"2.5\" fill=\""
          << color << "\"/>\n";
    out << "<text x=\"" << kWidth - kMargin + 4 << "\" y=\"" << kMargin + 14 * double(s)
        << "\" font-size=\"11\" fill=\"" << color << "\">" << series[s].label << "</text>\n";
  }
  out << "</svg>\n";
}

void emit_timeline(const std::string& path, const std::vector<double>& swap_times,
                   const std::vector<double>& demographic_times, double horizon,
                   const std::string& title) {
  if (!(horizon > 0.0)) throw std::invalid_argument("emit_timeline: bad horizon");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const double width = 720.0, height = 140.0, margin = 40.0, axis_y = 90.0;
  auto sx = [&](double t) { return margin + t / horizon * (width - 2 * margin); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << axis_y << "\" x2=\"" << width - margin
      << "\" y2=\"" << axis_y << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (double t : swap_times)
    out << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << axis_y - 12 << "\" x2=\"" << num(sx(t))
        << "\" y2=\"" << axis_y << "\" stroke=\"#d62728\" stroke-width=\"1\"/>\n";
  for (double t : demographic_times)
    out << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << axis_y - 28 << "\" x2=\"" << num(sx(t))
        << "\" y2=\"" << axis_y << "\" stroke=\"#1f77b4\" stroke-width=\"1.8\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"" << axis_y + 18 << "\" font-size=\"10\">0</text>\n";
  out << "<text x=\"" << width - margin << "\" y=\"" << axis_y + 18
      << "\" font-size=\"10\" text-anchor=\"end\">" << num(horizon) << "</text>\n";
  out << "<text x=\"" << margin << "\" y=\"40\" font-size=\"11\" fill=\"#d62728\">swap events"
      << "</text>\n<text x=\"" << margin << "\" y=\"54\" font-size=\"11\" fill=\"#1f77b4\">"
      << "demographic events</text>\n";
  out << "</svg>\n";
}

}  // namespace bds::tools
