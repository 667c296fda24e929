#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace cbcc {

/// Least-squares fit of rate (bits) against log2(P).
struct SdofEstimate {
  double slope = 0.0;      // the s.d.o.f. estimate
  double intercept = 0.0;
  double residual = 0.0;   // RMS of the fit residuals, bits
};

/// Slope-estimation SNR grid used unless configured otherwise.
inline const std::vector<double> kDefaultSnrGridDb{60.0, 80.0, 100.0};

/// Linear transmit power for an SNR in dB (noise power is 1).
double power_from_db(double snr_db);

/// Throws InvalidGrid unless the grid has >= 3 finite points, spans at
/// least 20 dB and lies entirely at or above 40 dB.
void validate_sdof_grid(std::span<const double> snr_db_grid);

/// Fits rates sampled on the grid. Sizes must match.
SdofEstimate fit_sdof(std::span<const double> snr_db_grid, std::span<const double> rates);

SdofEstimate estimate_sdof(const std::function<double(double)>& rate_of_power,
                           std::span<const double> snr_db_grid);

/// One estimate per component of a vector-valued evaluator (e.g. R0, R1, R2).
std::vector<SdofEstimate> estimate_sdof_components(
    const std::function<Eigen::VectorXd(double)>& rates_of_power,
    std::span<const double> snr_db_grid);

}  // namespace cbcc
