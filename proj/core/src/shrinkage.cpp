#include "csrecon/shrinkage.hpp"

#include <cmath>
#include <stdexcept>

namespace csrecon {

namespace {
void require_nonnegative(double k) {
  if (!(k >= 0.0)) throw std::invalid_argument("soft threshold parameter k must be >= 0");
}
}  // namespace

double soft_threshold(double u, double k) {
  require_nonnegative(k);
  if (u > k) return u - k;
  if (u < -k) return u + k;
  return 0.0;
}

double soft_threshold_deriv(double u, double k) {
  require_nonnegative(k);
  return std::abs(u) > k ? 1.0 : 0.0;
}

}  // namespace csrecon
