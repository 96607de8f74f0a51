#include "beamspin/svg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <ostream>

namespace beamspin {

namespace {

constexpr int kWidth = 640, kHeight = 480;
constexpr int kLeft = 70, kRight = 30, kTop = 40, kBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Scale {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double px0 = 0.0, px1 = 1.0;

  double operator()(double v) const {
    double t;
    if (log)
      t = (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
    else
      t = (v - lo) / (hi - lo);
    return px0 + t * (px1 - px0);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void expand(double v, double& lo, double& hi) {
  if (!std::isfinite(v)) return;
  lo = std::min(lo, v);
  hi = std::max(hi, v);
}

std::vector<double> ticks(double lo, double hi, bool log) {
  std::vector<double> out;
  if (log) {
    const int e0 = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
    const int e1 = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
    const int step = std::max(1, (e1 - e0) / 6);
    for (int e = e0; e <= e1; e += step) out.push_back(std::pow(10.0, e));
    if (out.empty()) out = {lo, hi};
    return out;
  }
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (const double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  const double start = std::ceil(lo / step) * step;
  for (double v = start; v <= hi + 0.5 * step; v += step) out.push_back(v);
  return out;
}

void emit_header(std::ostream& out, const PlotOptions& opt) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  if (opt.timestamp) {
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "<!-- generated: " << buf << " -->\n";
  }
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << opt.title << "</text>\n";
}

void emit_axes(std::ostream& out, const Scale& xs, const Scale& ys, const PlotOptions& opt) {
  out << "<g stroke=\"black\" fill=\"none\" stroke-width=\"1\">\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
      << kWidth - kRight << "\" y2=\"" << kHeight - kBottom << "\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kHeight - kBottom << "\"/>\n</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (const double t : ticks(xs.lo, xs.hi, xs.log)) {
    const double px = xs(t);
    out << "<line x1=\"" << px << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << px
        << "\" y2=\"" << kHeight - kBottom + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
  }
  for (const double t : ticks(ys.lo, ys.hi, ys.log)) {
    const double py = ys(t);
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\"" << kLeft << "\" y2=\""
        << py << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << kLeft - 8 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">"
        << num(t) << "</text>\n";
  }
  out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << opt.x_label << "</text>\n"
      << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << (kTop + kHeight - kBottom) / 2 << ")\">" << opt.y_label << "</text>\n</g>\n";
}

// five-stop viridis-like map, t in [0,1]
std::string heat_color(double t) {
  static const double stops[5][3] = {{0.267, 0.005, 0.329},
                                     {0.229, 0.322, 0.546},
                                     {0.128, 0.567, 0.551},
                                     {0.369, 0.789, 0.383},
                                     {0.993, 0.906, 0.144}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(static_cast<int>(t), 3);
  const double f = t - i;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(255 * (stops[i][0] * (1 - f) + stops[i + 1][0] * f)),
                static_cast<int>(255 * (stops[i][1] * (1 - f) + stops[i + 1][1] * f)),
                static_cast<int>(255 * (stops[i][2] * (1 - f) + stops[i + 1][2] * f)));
  return buf;
}

} // namespace

void write_svg_lines(std::ostream& out, std::span<const LineSeries> series,
                     const PlotOptions& opt) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      expand(s.x[i], xlo, xhi);
      expand(s.y[i], ylo, yhi);
    }
  if (!(xlo < xhi)) xhi = xlo + 1.0;
  if (!(ylo < yhi)) yhi = ylo + 1.0;
  if (!opt.y_log) {
    const double pad = 0.05 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
  }

  const Scale xs{xlo, xhi, opt.x_log, static_cast<double>(kLeft),
                 static_cast<double>(kWidth - kRight)};
  const Scale ys{ylo, yhi, opt.y_log, static_cast<double>(kHeight - kBottom),
                 static_cast<double>(kTop)};

  emit_header(out, opt);
  emit_axes(out, xs, ys, opt);
  int color = 0;
  double legend_y = kTop + 8;
  for (const auto& s : series) {
    const char* c = kPalette[color++ % 6];
    out << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      out << xs(s.x[i]) << "," << ys(s.y[i]) << " ";
    }
    out << "\"/>\n";
    if (!s.label.empty()) {
      out << "<text x=\"" << kWidth - kRight - 8 << "\" y=\"" << legend_y
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << c
          << "\">" << s.label << "</text>\n";
      legend_y += 15;
    }
  }
  out << "</svg>\n";
}

void write_svg_heatmap(std::ostream& out, const SweepResult& sweep, const PlotOptions& opt) {
  const int n1 = static_cast<int>(sweep.axis1.size());
  const int n2 = static_cast<int>(sweep.axis2.size());
  double vlo = std::numeric_limits<double>::infinity(), vhi = -vlo;
  for (const double v : sweep.values) expand(v, vlo, vhi);
  if (!(vlo < vhi)) vhi = vlo + 1.0;

  emit_header(out, opt);
  const double cell_w = static_cast<double>(kWidth - kLeft - kRight) / n2;
  const double cell_h = static_cast<double>(kHeight - kTop - kBottom) / n1;
  out << "<g stroke=\"none\">\n";
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const double v = sweep.values[static_cast<std::size_t>(i) * n2 + j];
      const std::string c =
          std::isfinite(v) ? heat_color((v - vlo) / (vhi - vlo)) : std::string("#cccccc");
      // axis1 increases upward
      const double px = kLeft + j * cell_w;
      const double py = kHeight - kBottom - (i + 1) * cell_h;
      out << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cell_w * 1.02
          << "\" height=\"" << cell_h * 1.02 << "\" fill=\"" << c << "\"/>\n";
    }
  out << "</g>\n";

  const Scale xs{sweep.axis2.front(), sweep.axis2.back(), opt.x_log,
                 static_cast<double>(kLeft), static_cast<double>(kWidth - kRight)};
  const Scale ys{sweep.axis1.front(), sweep.axis1.back(), opt.y_log,
                 static_cast<double>(kHeight - kBottom), static_cast<double>(kTop)};
  emit_axes(out, xs, ys, opt);
  out << "<text x=\"" << kWidth - kRight - 8 << "\" y=\"" << kTop - 8
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">[" << num(vlo)
      << ", " << num(vhi) << "]</text>\n";
  out << "</svg>\n";
}

} // namespace beamspin
