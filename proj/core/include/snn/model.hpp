#pragma once

// Leaky integrate-and-fire neuron with spike-frequency adaptation.
//
//   dv/dt = -(v - v_rest) / tau_m - g_c * c
//   dc/dt = -c / tau_c
//
// Synaptic input is a delta current: each impulse moves v by its weight.
// On a threshold crossing the neuron emits a spike, v resets, c grows by
// alpha_c and the neuron ignores input for tau_arp ms. Between events the
// state is advanced with the exact closed-form solution, so integration is
// purely event-driven.

#include <cstdint>
#include <optional>

namespace snn {

using NeuronId = std::uint32_t;
using Step = std::uint64_t;

struct NeuronParams {
    double tau_m = 20.0;     // ms
    double v_rest = 0.0;     // mV
    double v_theta = 20.0;   // mV
    double v_reset = 0.0;    // mV
    double tau_arp = 2.0;    // ms
    double tau_c = 500.0;    // ms
    double alpha_c = 1.0;    // adaptation units per spike
    double g_c = 0.0;        // mV per adaptation unit per ms
    bool is_excitatory = true;

    /// Throws ConfigError when an invariant is broken.
    void validate() const;
};

/// Calibrated population defaults. Inhibitory neurons have no adaptation.
NeuronParams default_excitatory_params();
NeuronParams default_inhibitory_params();

struct NeuronState {
    double v = 0.0;                  // mV
    double c = 0.0;                  // adaptation units
    double last_update = 0.0;        // ms
    double refractory_until = -1e300;  // ms

    bool refractory_at(double t) const noexcept { return t < refractory_until; }
};

struct ExternalDrive {
    std::uint32_t n_ext = 400;  // synapses per neuron
    double rate_ext = 3.0;      // Hz per synapse
    double j_ext = 0.0;         // mV per impulse

    void validate() const;

    /// Expected impulses per neuron per 1 ms step.
    double mean_per_step() const noexcept { return n_ext * rate_ext * 1e-3; }
};

ExternalDrive default_external_drive();

/// Precomputed decay factors for a fixed interval. Advancing with a
/// propagator gives the same bits as evolve_to over the same interval.
class Propagator {
public:
    Propagator(const NeuronParams& params, double dt);

    /// Advances v and c by the interval; does not touch last_update.
    void apply(NeuronState& state) const noexcept;

    double dt() const noexcept { return dt_; }

private:
    double dt_;
    double v_rest_;
    double decay_m_;  // e^{-dt/tau_m}
    double decay_c_;  // e^{-dt/tau_c}
    double coupling_; // multiplies c0 in the v update
};

/// Advances the state to time t with the closed-form solution. No
/// threshold check. Throws ContractError if t < state.last_update.
NeuronState evolve_to(NeuronState state, const NeuronParams& params, double t);

/// Instantaneous jump of v by weight, unless the neuron is refractory at
/// its last_update time, in which case the impulse is discarded.
inline NeuronState apply_impulse(NeuronState state, double weight) noexcept {
    if (!state.refractory_at(state.last_update)) state.v += weight;
    return state;
}

struct SpikeEmission {
    double time;
};

/// Threshold test at time t (state must already be at t). On a spike the
/// state is reset in place.
std::optional<SpikeEmission> fire_check(NeuronState& state, const NeuronParams& params,
                                        double t) noexcept;

/// Number of external Poisson impulses neuron `id` receives during `step`.
/// Pure function of its arguments.
std::uint64_t external_events(NeuronId id, Step step, const ExternalDrive& drive,
                              std::uint64_t seed) noexcept;

/// external_events with the per-drive constants hoisted out; returns the
/// same counts.
class ExternalDriveSampler {
public:
    ExternalDriveSampler(const ExternalDrive& drive, std::uint64_t seed) noexcept;

    std::uint64_t operator()(NeuronId id, Step step) const noexcept;

private:
    double mean_;
    double knuth_limit_;
    std::uint64_t seed_;
};

}  // namespace snn
