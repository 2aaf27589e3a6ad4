#pragma once

#include <vector>

#include "snn/engine.hpp"

namespace snn {

struct CalibrationStep {
    double j_ext = 0.0;
    double rate_hz = 0.0;
};

struct CalibrationResult {
    double j_ext = 0.0;
    double rate_hz = 0.0;
    bool converged = false;
    std::vector<CalibrationStep> history;
};

/// Bisection on the external efficacy, everything else fixed, until the
/// single-rank network rate lands in [rate_lo, rate_hi]. The rate must be
/// increasing in j_ext over [lo, hi].
CalibrationResult calibrate_external_drive(SimConfig base, double lo, double hi, double rate_lo = 3.0,
                                           double rate_hi = 3.4, int max_iterations = 30);

}  // namespace snn
