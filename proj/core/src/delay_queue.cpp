#include "snn/delay_queue.hpp"

#include <algorithm>
#include <string>

#include "snn/error.hpp"

namespace snn {

// Scheduling happens after the current step was drained, so the in-flight
// window is (current, current + d_max]: d_max slots are needed whatever d_min is.
DelayQueue::DelayQueue(std::uint32_t d_min, std::uint32_t d_max)
    : d_min_(d_min), d_max_(d_max), slots_(d_max + 1) {
    if (d_min < 1 || d_min > d_max) throw ConfigError("delay queue needs 1 <= d_min <= d_max");
}

void DelayQueue::schedule(const AxonalSpike& spike, std::uint32_t delay) {
    if (delay < d_min_ || delay > d_max_) {
        throw ContractError("delay " + std::to_string(delay) + " outside [" + std::to_string(d_min_) +
                            ", " + std::to_string(d_max_) + "]");
    }
    const Step due = spike.step + delay;
    if (due < next_drain_) {
        throw ContractError("delivery step " + std::to_string(due) + " was already drained");
    }
    if (due >= next_drain_ + slots_.size()) {
        throw ContractError("delivery step " + std::to_string(due) + " beyond queue horizon");
    }
    slot(due).push_back(spike);
    ++pending_;
}

std::vector<AxonalSpike> DelayQueue::drain(Step step) {
    if (step < next_drain_) return {};
    for (Step s = next_drain_; s < step && s < next_drain_ + slots_.size(); ++s) {
        if (!slot(s).empty()) {
            throw ContractError("drain(" + std::to_string(step) + ") would skip spikes due at step " +
                                std::to_string(s));
        }
    }
    std::vector<AxonalSpike> due;
    due.swap(slot(step));
    next_drain_ = step + 1;
    pending_ -= due.size();
    std::sort(due.begin(), due.end());
    return due;
}

}  // namespace snn
