#include "snn/calibration.hpp"

#include "snn/error.hpp"
#include "snn/inproc_transport.hpp"

namespace snn {

namespace {

double network_rate(const SimConfig& config) {
    InprocHub hub(1);
    auto transport = hub.endpoint(0);
    return run(config, 0, *transport).mean_rate_hz;
}

}  // namespace

CalibrationResult calibrate_external_drive(SimConfig base, double lo, double hi, double rate_lo,
                                           double rate_hi, int max_iterations) {
    if (!(lo < hi)) throw ConfigError("calibration bracket must satisfy lo < hi");
    base.n_ranks = 1;
    base.record_raster = false;
    base.record_step_profiles = false;

    CalibrationResult result;
    for (int i = 0; i < max_iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        base.drive.j_ext = mid;
        const double rate = network_rate(base);
        result.history.push_back({mid, rate});
        result.j_ext = mid;
        result.rate_hz = rate;
        if (rate >= rate_lo && rate <= rate_hi) {
            result.converged = true;
            break;
        }
        (rate < rate_lo ? lo : hi) = mid;
    }
    return result;
}

}  // namespace snn
