#pragma once

// Partial-transposition test at the correlation-matrix level. Necessary for
// separability; also sufficient when each side holds a single mode.

#include <sstream>

#include "gaussep/gaussian.hpp"

namespace gaussep {

struct PptResult {
  bool ppt = false;
  /// lambda_min(partial_transpose(gamma) - iJ)
  Real margin = 0.0;
};

inline PptResult ppt_check(const BipartiteCM& bip, const ToleranceConfig& tol = {}) {
  const CmValidity v = validate_cm(bip, tol);
  if (!v.valid) {
    std::ostringstream os;
    os << "ppt_check: input is not a valid correlation matrix (lambda_min(gamma - iJ) = "
       << v.margin << ")";
    throw InputError(os.str());
  }
  const PsdResult r = psd_check(minus_i_j(assemble(partial_transpose(bip))), tol);
  return {r.is_psd, r.lambda_min};
}

}  // namespace gaussep
