#pragma once

// Result emission: the simulation CSV table and a minimal SVG line chart.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "excursion/simgen.hpp"

namespace excursion {

inline constexpr std::string_view kResultCsvHeader =
    "signal,signal_fwhm,noise_fwhm,n,reps,alpha,c,method,"
    "empirical_fdr,fdr_se,empirical_fndr,fndr_se";

/// Shortest decimal string that round-trips to `v`.
std::string format_number(double v);

/// Header line plus one row per (c, method), ascending c then method order.
void write_result_csv(std::ostream& out, const SimulationResult& result);

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  std::vector<ChartSeries> series;
  /// Dashed horizontal reference line, e.g. the nominal level.
  std::optional<double> reference_y;
};

/// 800x600 SVG 1.1 document. Points outside the y range are clipped to it.
void render_svg(std::ostream& out, const LineChart& chart);

/// Empirical FDR against c, one series per method, y in [0, 0.2], dashed
/// line at alpha.
LineChart fdr_chart(const SimulationResult& result);

/// Empirical FNDR against c, y in [0, 1].
LineChart fndr_chart(const SimulationResult& result);

}  // namespace excursion
