#include "popperlab/quadrature.hpp"

namespace popperlab {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) {
    throw std::invalid_argument("rel_tol must be finite and > 0");
  }
  if (!(abs_tol >= 0.0) || !std::isfinite(abs_tol)) {
    throw std::invalid_argument("abs_tol must be finite and >= 0");
  }
  if (max_subdivisions < 1) {
    throw std::invalid_argument("max_subdivisions must be >= 1");
  }
  if (!(tail_cutoff_multiplier >= 6.0) || !std::isfinite(tail_cutoff_multiplier)) {
    throw std::invalid_argument("tail_cutoff_multiplier must be >= 6");
  }
}

} // namespace popperlab
