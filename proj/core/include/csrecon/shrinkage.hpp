#pragma once

namespace csrecon {

/// Soft threshold: u - k above k, u + k below -k, zero on the closed band
/// [-k, k]. Throws std::invalid_argument for k < 0.
double soft_threshold(double u, double k);

/// Derivative of soft_threshold in u: 1 when |u| > k, otherwise 0. The band
/// edge |u| == k counts as inside the dead zone.
double soft_threshold_deriv(double u, double k);

}  // namespace csrecon
