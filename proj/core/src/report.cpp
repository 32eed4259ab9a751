#include "excursion/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace excursion {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;  // legend column
constexpr double kTop = 50.0;
constexpr double kBottom = 70.0;

constexpr std::array<std::string_view, 6> kPalette = {"#d62728", "#1f77b4", "#e3b505",
                                                      "#2ca02c", "#9467bd", "#8c564b"};

std::string escape_xml(std::string_view s) {
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

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

LineChart method_chart(const SimulationResult& result, bool fdr) {
  const auto& cfg = result.config;
  LineChart chart;
  chart.title = std::string(fdr ? "Empirical FDR" : "Empirical FNDR") + ", " +
                std::string(to_string(cfg.signal.kind)) + " signal, " +
                std::to_string(cfg.reps) + " reps";
  chart.x_label = "c";
  chart.y_label = fdr ? "empirical FDR" : "empirical FNDR";
  chart.x_min = cfg.c_grid.front();
  chart.x_max = cfg.c_grid.back();
  if (chart.x_max == chart.x_min) {
    chart.x_min -= 0.5;
    chart.x_max += 0.5;
  }
  chart.y_min = 0.0;
  chart.y_max = fdr ? 0.2 : 1.0;
  if (fdr) chart.reference_y = cfg.alpha;
  for (Method m : cfg.methods) {
    ChartSeries s;
    s.label = std::string(to_string(m));
    for (std::size_t ci = 0; ci < cfg.c_grid.size(); ++ci) {
      const auto& cell = result.cell(ci, m);
      s.x.push_back(cell.c);
      s.y.push_back(fdr ? cell.empirical_fdr : cell.empirical_fndr);
    }
    chart.series.push_back(std::move(s));
  }
  return chart;
}

}  // namespace

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_result_csv(std::ostream& out, const SimulationResult& result) {
  const auto& cfg = result.config;
  out << kResultCsvHeader << '\n';
  for (const auto& cell : result.cells) {
    out << to_string(cfg.signal.kind) << ',' << format_number(cfg.signal.signal_fwhm) << ','
        << format_number(cfg.noise.fwhm) << ',' << cfg.n << ',' << cell.reps << ','
        << format_number(cfg.alpha) << ',' << format_number(cell.c) << ','
        << to_string(cell.method) << ',' << format_number(cell.empirical_fdr) << ','
        << format_number(cell.fdr_se) << ',' << format_number(cell.empirical_fndr) << ','
        << format_number(cell.fndr_se) << '\n';
  }
}

void render_svg(std::ostream& out, const LineChart& chart) {
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double x_span = chart.x_max - chart.x_min;
  const double y_span = chart.y_max - chart.y_min;
  auto px = [&](double x) { return kLeft + (x - chart.x_min) / x_span * plot_w; };
  auto py = [&](double y) {
    const double clipped = std::clamp(y, chart.y_min, chart.y_max);
    return kTop + plot_h - (clipped - chart.y_min) / y_span * plot_h;
  };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" "
         "height=\"600\" viewBox=\"0 0 800 600\">\n"
      << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"18\">" << escape_xml(chart.title)
      << "</text>\n";

  // Axes, ticks and grid.
  out << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\"/>\n</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double xv = chart.x_min + x_span * i / kTicks;
    const double yv = chart.y_min + y_span * i / kTicks;
    out << "<line x1=\"" << px(xv) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << px(xv)
        << "\" y2=\"" << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px(xv) << "\" y=\"" << kTop + plot_h + 20
        << "\" text-anchor=\"middle\">" << fixed(xv, 2) << "</text>\n"
        << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << kLeft
        << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << py(yv) << "\" x2=\"" << kLeft + plot_w
        << "\" y2=\"" << py(yv) << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\">" << fixed(yv, 3) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 25
      << "\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(chart.x_label)
      << "</text>\n"
      << "<text x=\"20\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
      << kTop + plot_h / 2 << ")\">" << escape_xml(chart.y_label) << "</text>\n</g>\n";

  if (chart.reference_y) {
    out << "<line x1=\"" << kLeft << "\" y1=\"" << py(*chart.reference_y) << "\" x2=\""
        << kLeft + plot_w << "\" y2=\"" << py(*chart.reference_y)
        << "\" stroke=\"red\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
  }

  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const auto& series = chart.series[s];
    const auto colour = kPalette[s % kPalette.size()];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series.x.size(); ++i) {
      if (i) out << ' ';
      out << fixed(px(series.x[i]), 2) << ',' << fixed(py(series.y[i]), 2);
    }
    out << "\"/>\n";
    const double ly = kTop + 20.0 + 22.0 * static_cast<double>(s);
    out << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << ly << "\" x2=\""
        << kWidth - kRight + 45 << "\" y2=\"" << ly << "\" stroke=\"" << colour
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << kWidth - kRight + 52 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(series.label)
        << "</text>\n";
  }
  out << "</svg>\n";
}

LineChart fdr_chart(const SimulationResult& result) { return method_chart(result, true); }

LineChart fndr_chart(const SimulationResult& result) { return method_chart(result, false); }

}  // namespace excursion
