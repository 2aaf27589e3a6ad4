#pragma once

#include <cmath>
#include <cstdint>

#include "snn/energy.hpp"

namespace snn::testing {

// Idle at `baseline` W, then `baseline + excess` W over [run_start,
// run_start + duration], then idle again for `tail` s. Sampled at
// t = i / rate so the run edges fall on samples.
inline energy::PowerTrace step_trace(double baseline, double excess, double run_start, double duration,
                                     double tail = 5.0, double rate = 10.0) {
    energy::PowerTrace trace;
    trace.source = "synthetic";
    const double run_end = run_start + duration;
    const auto n = static_cast<std::int64_t>(std::llround((run_end + tail) * rate));
    for (std::int64_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / rate;
        const bool running = t >= run_start - 1e-9 && t <= run_end + 1e-9;
        trace.samples.push_back({t, running ? baseline + excess : baseline});
    }
    return trace;
}

}  // namespace snn::testing
