// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any check fails. Names given on the command line restrict
// the run to those checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "snn/aer.hpp"
#include "snn/connectivity.hpp"
#include "snn/energy.hpp"
#include "snn/engine.hpp"
#include "snn/model.hpp"
#include "support/euler_oracle.hpp"
#include "support/published_tables.hpp"
#include "support/synthetic_trace.hpp"

namespace {

using namespace snn;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return buf;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Outcome partition_invariance() {
    const auto t0 = Clock::now();
    std::string detail;
    bool pass = true;
    for (std::uint64_t seed : {1, 2, 3}) {
        auto config = default_sim_config(2048, seed);
        config.duration_ms = 1000;
        config.record_step_profiles = false;
        std::vector<AxonalSpike> reference;
        for (std::uint32_t ranks : {1u, 2u, 4u, 8u}) {
            config.n_ranks = ranks;
            const auto merged = merge_reports(run_inproc(config));
            if (ranks == 1) {
                reference = merged.raster;
                detail += fmt("seed %llu: %zu spikes; ", static_cast<unsigned long long>(seed), reference.size());
            } else if (merged.raster != reference) {
                pass = false;
                detail += fmt("seed %llu differs at %u ranks; ", static_cast<unsigned long long>(seed), ranks);
            }
        }
        pass = pass && !reference.empty();
    }
    const double elapsed = since(t0);
    pass = pass && elapsed < 120.0;
    return {pass, detail + fmt("ranks 1/2/4/8 identical, %.1f s total (limit 120 s)", elapsed)};
}

Outcome integrator_oracle() {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> v0(-10.0, 20.0), c0(0.0, 10.0), gc(0.0, 0.3), delta(0.001, 20.0),
        tau_m(10.0, 30.0), tau_c(100.0, 1000.0);
    double max_ref = 0.0, max_euler = 0.0, max_euler_half = 0.0;
    for (int i = 0; i < 1000; ++i) {
        NeuronParams p;
        p.tau_m = tau_m(gen);
        p.tau_c = tau_c(gen);
        p.g_c = gc(gen);
        NeuronState s;
        s.v = v0(gen);
        s.c = c0(gen);
        const double d = delta(gen);
        const double v = evolve_to(s, p, d).v;
        const auto coarse = testing::forward_euler(s.v, s.c, p, d, 1e-4);
        const auto fine = testing::forward_euler(s.v, s.c, p, d, 5e-5);
        const double extrapolated = 2 * fine.v - coarse.v;
        max_ref = std::max(max_ref, std::fabs(v - extrapolated));
        max_euler = std::max(max_euler, std::fabs(v - coarse.v));
        max_euler_half = std::max(max_euler_half, std::fabs(v - fine.v));
    }
    // The raw Euler gap must be Euler's own first-order truncation error:
    // halving dt halves it.
    const double ratio = max_euler / max_euler_half;
    const bool first_order = ratio > 1.9 && ratio < 2.1;
    return {max_ref <= 1e-6 && first_order,
            fmt("max |dv| vs Euler dt=1e-4 ms with one Richardson step %.2e mV (limit 1e-6); "
                "raw Euler %.2e mV, halves to %.2e at dt/2 (ratio %.3f)",
                max_ref, max_euler, max_euler_half, ratio)};
}

Outcome regime_calibration() {
    std::string detail;
    bool pass = true;
    for (std::uint32_t n : {2048u, 20480u}) {
        auto config = default_sim_config(n, 1);
        config.duration_ms = 10'000;
        config.record_raster = false;
        config.record_step_profiles = false;
        const auto t0 = Clock::now();
        const auto merged = merge_reports(run_inproc(config));
        const bool ok = merged.mean_rate_hz >= 3.0 && merged.mean_rate_hz <= 3.4;
        pass = pass && ok;
        detail += fmt("%u neurons %.3f Hz (%.1f s wall); ", n, merged.mean_rate_hz, since(t0));
    }
    return {pass, detail + "band [3.0, 3.4] Hz, external 400 x 3 Hz"};
}

Outcome connectivity_accounting() {
    const auto spec = default_network_spec(20480, 1);
    const auto total = spec.total_synapses();
    const double rel = std::fabs(static_cast<double>(total) - 2.30e7) / 2.30e7;
    const auto whole = build_table(spec, partition(spec.n_neurons, 1, 0));
    bool equal = whole.size() == total;
    std::uint64_t union_size = 0;
    constexpr std::uint32_t kRanks = 4;
    std::vector<SynapseTable> parts;
    for (std::uint32_t r = 0; r < kRanks; ++r) {
        parts.push_back(build_table(spec, partition(spec.n_neurons, kRanks, r)));
        union_size += parts.back().size();
    }
    // Bucket by bucket: the ranks' local targets, shifted back to global ids
    // and concatenated in rank order, must equal the single-rank bucket.
    std::vector<std::uint32_t> joined;
    for (NeuronId src = 0; src < spec.n_neurons && equal; ++src) {
        for (std::uint32_t d = spec.d_min; d <= spec.d_max && equal; ++d) {
            joined.clear();
            for (const auto& t : parts)
                for (auto local : t.bucket(src, d)) joined.push_back(local + t.part().lo);
            const auto ref = whole.bucket(src, d);
            equal = std::equal(joined.begin(), joined.end(), ref.begin(), ref.end());
        }
    }
    equal = equal && union_size == total;
    return {total == 23'040'000 && rel <= 0.002 && equal,
            fmt("%llu synapses, %.3f%% from 2.30e7 (limit 0.2%%); union of %u rank tables %s single-rank table",
                static_cast<unsigned long long>(total), 100 * rel, kRanks, equal ? "equals" : "DIFFERS from")};
}

Outcome wire_format() {
    std::mt19937_64 gen(12);
    std::uniform_int_distribution<std::uint32_t> src;
    std::uniform_int_distribution<std::uint64_t> step;
    std::uniform_int_distribution<int> len(0, 256);
    int bad = 0;
    std::uint64_t spikes_total = 0;
    for (int i = 0; i < 10'000; ++i) {
        std::vector<AxonalSpike> spikes(len(gen));
        for (auto& s : spikes) s = {src(gen), step(gen)};
        const auto bytes = encode(spikes);
        spikes_total += spikes.size();
        if (bytes.size() != spikes.size() * 12 || decode(bytes) != spikes) ++bad;
    }
    return {bad == 0 && kSpikeWireBytes == 12,
            fmt("10000 lists, %llu spikes, %d mismatches, 12 bytes per spike",
                static_cast<unsigned long long>(spikes_total), bad)};
}

Outcome energy_arithmetic() {
    std::string detail;
    bool pass = true;
    double worst = 0.0;
    auto check_rows = [&](const std::vector<energy::TableRow>& rows, double baseline, std::size_t skip) {
        for (std::size_t i = skip; i < rows.size(); ++i) {
            const auto& row = rows[i];
            const auto trace = testing::step_trace(baseline, row.power_w, 5.0, row.time_s);
            energy::AnalysisOptions o;
            o.pause = {0.0, 4.9};
            const auto report = energy::analyze(trace, o);
            const double err = std::fabs(report.energy_j - row.energy_j);
            worst = std::max(worst, err);
            if (err > 0.1) {
                pass = false;
                detail += fmt("row %s %.3f J vs %.1f J; ", row.label.c_str(), report.energy_j, row.energy_j);
            }
        }
    };
    check_rows(testing::x86_rows(), testing::kServerBaselineW, 0);
    // The first ARM row does not satisfy time x power = energy; it is the
    // one that must be flagged.
    check_rows(testing::arm_rows(), testing::kEmbeddedBaselineW, 1);
    const auto arm = energy::check_table(testing::arm_rows());
    const auto x86 = energy::check_table(testing::x86_rows());
    const bool flagged = !arm[0].consistent &&
                         std::all_of(arm.begin() + 1, arm.end(), [](const auto& c) { return c.consistent; }) &&
                         std::all_of(x86.begin(), x86.end(), [](const auto& c) { return c.consistent; });
    pass = pass && flagged;
    return {pass, detail + fmt("10 x86 rows and 3 ARM rows from synthetic traces, max error %.4f J (limit 0.1); "
                               "ARM row 1 %s (636.8 x 2.2 = %.2f J vs 1273.6 J)",
                               worst, arm[0].consistent ? "NOT flagged" : "flagged", arm[0].product_j)};
}

Outcome metric_bracketing() {
    const double recurrent = energy::synaptic_events(20480, 1125, 3.2, 10.0);
    const double external = energy::synaptic_events(20480, 400, 3.0, 10.0);
    const double arm_rec = energy::joules_per_event(1110.0, recurrent) * 1e6;
    const double arm_tot = energy::joules_per_event(1110.0, recurrent + external) * 1e6;
    const double intel_rec = energy::joules_per_event(3137.2, recurrent) * 1e6;
    const double intel_tot = energy::joules_per_event(3137.2, recurrent + external) * 1e6;
    auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
    const bool pass = in(arm_rec, 1.0, 1.6) && in(arm_tot, 1.0, 1.6) && in(intel_rec, 3.1, 4.4) &&
                      in(intel_tot, 3.1, 4.4);
    return {pass, fmt("ARM 1110 J: %.3f (recurrent) / %.3f (recurrent+external) uJ/event in [1.0, 1.6]; "
                      "Intel 3137.2 J: %.3f / %.3f uJ/event in [3.1, 4.4]",
                      arm_rec, arm_tot, intel_rec, intel_tot)};
}

Outcome profiling_trend() {
    constexpr int kRepetitions = 3;
    std::vector<double> medians;
    std::string detail;
    for (std::uint32_t ranks : {2u, 4u, 8u}) {
        std::vector<double> fractions;
        for (int rep = 0; rep < kRepetitions; ++rep) {
            auto config = default_sim_config(2048, 1);
            config.n_ranks = ranks;
            config.record_raster = false;
            config.record_step_profiles = false;
            fractions.push_back(profile_summary(run_inproc(config)).communication);
        }
        std::sort(fractions.begin(), fractions.end());
        medians.push_back(fractions[kRepetitions / 2]);
        detail += fmt("%u ranks %.1f%%; ", ranks, 100 * medians.back());
    }
    const bool pass = std::is_sorted(medians.begin(), medians.end());
    return {pass, detail + fmt("communication fraction, median of %d runs, 2048 neurons", kRepetitions)};
}

struct PhaseGap {
    std::size_t steps = 0;
    std::size_t over = 0;
    double worst = 0.0;
};

PhaseGap phase_gap(std::uint32_t n_neurons) {
    auto config = default_sim_config(n_neurons, 1);
    config.duration_ms = 1000;
    config.record_raster = false;
    const auto reports = run_inproc(config);
    const auto& r = reports.front();
    PhaseGap g;
    g.steps = r.steps.size();
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto& p = r.steps[i];
        const double measured = p.computation + p.communication + p.barrier;
        const double rel = std::fabs(r.step_wall[i] - measured) / r.step_wall[i];
        g.worst = std::max(g.worst, rel);
        if (rel > 0.02) ++g.over;
    }
    return g;
}

// Run at the full benchmark size. At 2048 neurons a step lasts ~130 us, so
// one interrupt between the last phase timestamp and the step-end read can
// exceed 2% on its own; that figure is reported but not judged.
Outcome phase_accounting() {
    const auto big = phase_gap(20480);
    const auto small = phase_gap(2048);
    const bool pass = big.steps == 1000 && big.over == 0;
    return {pass, fmt("20480 neurons, %zu steps: computation+communication+barrier within %.3f%% of step "
                      "wall-clock at worst (limit 2%%), %zu steps over; 2048 neurons: worst %.3f%%, %zu over",
                      big.steps, 100 * big.worst, big.over, 100 * small.worst, small.over)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> only(argv + 1, argv + argc);
    const std::vector<std::pair<const char*, std::function<Outcome()>>> checks = {
        {"partition-invariance", partition_invariance}, {"integrator-oracle", integrator_oracle},
        {"regime-calibration", regime_calibration},     {"connectivity-accounting", connectivity_accounting},
        {"wire-format", wire_format},                   {"energy-arithmetic", energy_arithmetic},
        {"metric-bracketing", metric_bracketing},       {"profiling-trend", profiling_trend},
        {"phase-accounting", phase_accounting},
    };
    int failed = 0;
    std::size_t ran = 0;
    for (const auto& [name, check] : checks) {
        if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
        ++ran;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu acceptance checks passed\n", static_cast<int>(ran) - failed, ran);
    return failed == 0 && ran > 0 ? 0 : 1;
}
