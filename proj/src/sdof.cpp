#include "cbcc/sdof.hpp"

#include <cmath>
#include <string>

#include <Eigen/QR>

#include "cbcc/errors.hpp"

namespace cbcc {

double power_from_db(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

void validate_sdof_grid(std::span<const double> grid) {
  if (grid.size() < 3) {
    throw InvalidGrid("s.d.o.f. grid needs at least 3 points, got " + std::to_string(grid.size()));
  }
  double lo = grid[0];
  double hi = grid[0];
  for (double g : grid) {
    if (!std::isfinite(g)) throw InvalidGrid("s.d.o.f. grid has a non-finite point");
    if (g < 40.0) throw InvalidGrid("s.d.o.f. grid point " + std::to_string(g) + " dB is below 40 dB");
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  if (hi - lo < 20.0) {
    throw InvalidGrid("s.d.o.f. grid spans " + std::to_string(hi - lo) + " dB, need at least 20 dB");
  }
}

SdofEstimate fit_sdof(std::span<const double> grid, std::span<const double> rates) {
  validate_sdof_grid(grid);
  if (rates.size() != grid.size()) throw InvalidGrid("rate count does not match grid size");
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = std::log2(power_from_db(grid[static_cast<std::size_t>(i)]));
    design(i, 1) = 1.0;
    y(i) = rates[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - design * coef;
  return {coef(0), coef(1), std::sqrt(resid.squaredNorm() / static_cast<double>(n))};
}

SdofEstimate estimate_sdof(const std::function<double(double)>& rate_of_power,
                           std::span<const double> grid) {
  validate_sdof_grid(grid);
  std::vector<double> rates;
  rates.reserve(grid.size());
  for (double g : grid) rates.push_back(rate_of_power(power_from_db(g)));
  return fit_sdof(grid, rates);
}

std::vector<SdofEstimate> estimate_sdof_components(
    const std::function<Eigen::VectorXd(double)>& rates_of_power, std::span<const double> grid) {
  validate_sdof_grid(grid);
  std::vector<Eigen::VectorXd> samples;
  for (double g : grid) samples.push_back(rates_of_power(power_from_db(g)));
  const Eigen::Index components = samples.front().size();
  std::vector<SdofEstimate> out;
  for (Eigen::Index c = 0; c < components; ++c) {
    std::vector<double> col;
    for (const auto& s : samples) {
      if (s.size() != components) throw InvalidGrid("evaluator returned inconsistent sizes");
      col.push_back(s(c));
    }
    out.push_back(fit_sdof(grid, col));
  }
  return out;
}

}  // namespace cbcc
