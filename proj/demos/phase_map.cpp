// Prints an ASCII map of the quasi-static phase diagram over the reservoir
// density square (rho_minus, rho_plus), plus the classification of a few
// landmark points. Everything here is closed form; no simulation runs.

#include <cstdio>

#include "qsep/theory.hpp"

namespace {

char phase_char(qsep::phase_label label) {
  switch (label) {
    case qsep::phase_label::low_density: return '.';
    case qsep::phase_label::high_density: return '#';
    case qsep::phase_label::max_current: return 'M';
    case qsep::phase_label::critical_non_unique: return 'C';
  }
  return '?';
}

}  // namespace

int main() {
  const double p_bar = 1.0;
  const int cells = 33;

  std::printf("Quasi-static phase map, totally asymmetric bulk (p_bar = %.1f)\n",
              p_bar);
  std::printf("  . low density    # high density    M max current    C coexistence\n\n");

  // Rows sweep rho_plus from high to low so the vertical axis points up.
  for (int row = cells - 1; row >= 0; --row) {
    const double rho_plus = (row + 0.5) / cells;
    std::printf("  %4.2f |", rho_plus);
    for (int col = 0; col < cells; ++col) {
      const double rho_minus = (col + 0.5) / cells;
      // Snap to the coexistence segment when the cell straddles it, so the
      // measure-zero line is visible at finite resolution.
      const bool on_line = rho_minus < 0.5 &&
                           std::abs(rho_minus + rho_plus - 1.0) < 0.5 / cells;
      const auto point = on_line
          ? qsep::quasi_static_profile(p_bar, rho_minus, 1.0 - rho_minus)
          : qsep::quasi_static_profile(p_bar, rho_minus, rho_plus);
      std::putchar(phase_char(point.label));
    }
    std::printf("|\n");
  }
  std::printf("       +");
  for (int col = 0; col < cells; ++col) std::putchar('-');
  std::printf("+\n        rho_minus: 0 ... 1 (rho_plus on the vertical axis)\n\n");

  const double landmarks[][2] = {
      {0.30, 0.60}, {0.70, 0.90}, {0.80, 0.20}, {0.30, 0.70}, {0.50, 0.50},
  };
  std::printf("  %-12s %-12s %-18s %-12s %s\n", "rho_minus", "rho_plus", "phase",
              "bulk", "current");
  for (const auto& lm : landmarks) {
    const auto point = qsep::quasi_static_profile(p_bar, lm[0], lm[1]);
    std::printf("  %-12.2f %-12.2f %-18s %-12.4f %.4f%s\n", lm[0], lm[1],
                qsep::phase_name(point.label), point.bulk_density, point.current,
                point.unique ? "" : "   (profile not unique)");
  }
  return 0;
}
