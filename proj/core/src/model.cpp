#include "snn/model.hpp"

#include <cmath>
#include <string>

#include "snn/error.hpp"
#include "snn/rng.hpp"

namespace snn {

namespace {

// Calibrated operating point (see `snnbench calibrate`): with these values a
// network of any size at the default fan-out fires at about 3.2 Hz.
constexpr double kDefaultGc = 0.1;
constexpr double kDefaultJext = 1.08;

}  // namespace

void NeuronParams::validate() const {
    if (!(tau_m > 0.0)) throw ConfigError("tau_m must be positive");
    if (!(tau_c > 0.0)) throw ConfigError("tau_c must be positive");
    if (!(v_theta > v_rest)) throw ConfigError("v_theta must exceed v_rest");
    if (!(tau_arp >= 0.0)) throw ConfigError("tau_arp must be non-negative");
    if (alpha_c < 0.0) throw ConfigError("alpha_c must be non-negative");
    if (!is_excitatory && alpha_c != 0.0) {
        throw ConfigError("inhibitory neurons must have alpha_c = 0");
    }
}

NeuronParams default_excitatory_params() {
    NeuronParams p;
    p.g_c = kDefaultGc;
    return p;
}

NeuronParams default_inhibitory_params() {
    NeuronParams p;
    p.alpha_c = 0.0;
    p.g_c = 0.0;
    p.is_excitatory = false;
    return p;
}

void ExternalDrive::validate() const {
    if (!(rate_ext >= 0.0)) throw ConfigError("rate_ext must be non-negative");
}

ExternalDrive default_external_drive() {
    ExternalDrive d;
    d.j_ext = kDefaultJext;
    return d;
}

Propagator::Propagator(const NeuronParams& params, double dt)
    : dt_(dt),
      v_rest_(params.v_rest),
      decay_m_(std::exp(-dt / params.tau_m)),
      decay_c_(std::exp(-dt / params.tau_c)) {
    // Adaptation drive integrated against the membrane kernel:
    //   -g_c c0 tau_m tau_c / (tau_c - tau_m) (e^{-dt/tau_c} - e^{-dt/tau_m})
    // rewritten with expm1 so it stays accurate when tau_c ~ tau_m.
    const double x = dt * (params.tau_c - params.tau_m) / (params.tau_m * params.tau_c);
    const double ratio = (x == 0.0) ? 1.0 : std::expm1(x) / x;
    coupling_ = -params.g_c * dt * decay_m_ * ratio;
}

void Propagator::apply(NeuronState& state) const noexcept {
    state.v = v_rest_ + (state.v - v_rest_) * decay_m_ + coupling_ * state.c;
    state.c *= decay_c_;
}

NeuronState evolve_to(NeuronState state, const NeuronParams& params, double t) {
    if (t < state.last_update) {
        throw ContractError("evolve_to: target time " + std::to_string(t) +
                            " precedes last update " + std::to_string(state.last_update));
    }
    if (t == state.last_update) return state;
    Propagator(params, t - state.last_update).apply(state);
    state.last_update = t;
    return state;
}

std::optional<SpikeEmission> fire_check(NeuronState& state, const NeuronParams& params,
                                        double t) noexcept {
    if (state.v < params.v_theta || state.refractory_at(t)) return std::nullopt;
    state.v = params.v_reset;
    state.c += params.alpha_c;
    state.refractory_until = t + params.tau_arp;
    return SpikeEmission{t};
}

std::uint64_t external_events(NeuronId id, Step step, const ExternalDrive& drive,
                              std::uint64_t seed) noexcept {
    return ExternalDriveSampler(drive, seed)(id, step);
}

ExternalDriveSampler::ExternalDriveSampler(const ExternalDrive& drive, std::uint64_t seed) noexcept
    : mean_(drive.mean_per_step()), knuth_limit_(std::exp(-mean_)), seed_(seed) {}

std::uint64_t ExternalDriveSampler::operator()(NeuronId id, Step step) const noexcept {
    if (!(mean_ > 0.0)) return 0;
    CounterRng rng(seed_, StreamTag::kExternal, id, step);
    return rng.poisson(mean_, knuth_limit_);
}

}  // namespace snn
