#pragma once

// Energy-to-solution analysis of a sampled power trace: idle baseline from
// the pre-run pause, run boundaries from the knee after it, the trapezoidal
// integral of power above baseline, and the cost per synaptic event.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace snn::energy {

struct PowerSample {
    double t = 0.0;      // s
    double watts = 0.0;  // W
};

enum class SamplingMode { kUnknown, kAC, kDC };

struct PowerTrace {
    std::vector<PowerSample> samples;
    std::string source;
    SamplingMode mode = SamplingMode::kUnknown;

    double t_begin() const noexcept { return samples.empty() ? 0.0 : samples.front().t; }
    double t_end() const noexcept { return samples.empty() ? 0.0 : samples.back().t; }
};

/// CSV "t_seconds,watts", optional header line. Throws ParseError with the
/// line number on malformed rows, non-increasing time or negative power.
PowerTrace parse_trace(const std::string& text, std::string source = "<memory>");
PowerTrace load_trace(const std::filesystem::path& path);

struct Window {
    double begin = 0.0;
    double end = 0.0;
};

/// Parses "a:b" (seconds). Throws ParseError.
Window parse_window(const std::string& text);

/// Mean of the samples inside the closed window; needs at least 3.
double estimate_baseline(const PowerTrace& trace, Window pause);

/// Sample standard deviation over the same window.
double baseline_spread(const PowerTrace& trace, Window pause);

/// First and last samples after the pause whose power exceeds
/// baseline + k * sigma. Throws EnergyError when nothing rises above it.
Window detect_run_window(const PowerTrace& trace, Window pause, double baseline, double sigma,
                         double k = 5.0);

/// Trapezoidal integral of max(p - baseline, 0) over [start, end], with
/// the trace linearly interpolated at the boundaries.
double energy_to_solution(const PowerTrace& trace, double baseline, double start, double end);

/// Throws EnergyError when events == 0.
double joules_per_event(double energy_joules, double events);

struct EnergyReport {
    std::string source;
    double baseline_w = 0.0;
    double baseline_sigma_w = 0.0;
    double start_s = 0.0;
    double end_s = 0.0;
    double energy_j = 0.0;
    double recurrent_events = 0.0;
    double external_events = 0.0;
    // Both denominator conventions, in joules per event.
    std::optional<double> j_per_event_recurrent;
    std::optional<double> j_per_event_total;

    double duration_s() const noexcept { return end_s - start_s; }
    double mean_excess_w() const noexcept {
        return end_s > start_s ? energy_j / (end_s - start_s) : 0.0;
    }
};

struct AnalysisOptions {
    Window pause;
    std::optional<double> start;  // overrides knee detection
    std::optional<double> end;
    double k_sigma = 5.0;
    double recurrent_events = 0.0;
    double external_events = 0.0;
};

EnergyReport analyze(const PowerTrace& trace, const AnalysisOptions& options);

/// Structured text (JSON), SI units, 3 decimals for seconds, watts and joules.
std::string report_to_json(const EnergyReport& report);

/// Synaptic events of a run: neurons * synapses per neuron * rate * time.
double synaptic_events(double n_neurons, double synapses_per_neuron, double rate_hz, double seconds);

/// One published time/power/energy row.
struct TableRow {
    std::string label;
    double time_s = 0.0;
    double power_w = 0.0;
    double energy_j = 0.0;
};

struct RowCheck {
    TableRow row;
    double product_j = 0.0;      // time * power
    double discrepancy_j = 0.0;  // product - published energy
    bool consistent = true;
};

/// Flags rows where time * power differs from the stated energy by more
/// than `tolerance_j`.
std::vector<RowCheck> check_table(const std::vector<TableRow>& rows, double tolerance_j = 0.1);

/// CSV "label,time_s,power_w,energy_j" with optional header.
std::vector<TableRow> parse_table(const std::string& text);

}  // namespace snn::energy
