#pragma once

#include <cstdint>
#include <vector>

#include "snn/aer.hpp"

namespace snn {

/// Ring of per-step slots holding spikes that are in flight along axons.
/// A spike emitted at step s with delay d is returned by drain(s + d).
class DelayQueue {
public:
    DelayQueue(std::uint32_t d_min, std::uint32_t d_max);

    /// Throws ContractError if the delay is outside [d_min, d_max] or the
    /// delivery step has already been drained.
    void schedule(const AxonalSpike& spike, std::uint32_t delay);

    /// Spikes due at `step`, sorted by (source, emission step). Each step
    /// can be drained once; a second drain returns nothing.
    std::vector<AxonalSpike> drain(Step step);

    /// Spikes scheduled but not yet drained.
    std::size_t pending() const noexcept { return pending_; }
    Step next_step() const noexcept { return next_drain_; }

private:
    std::vector<AxonalSpike>& slot(Step step) noexcept { return slots_[step % slots_.size()]; }

    std::uint32_t d_min_;
    std::uint32_t d_max_;
    Step next_drain_ = 0;
    std::size_t pending_ = 0;
    std::vector<std::vector<AxonalSpike>> slots_;
};

}  // namespace snn
