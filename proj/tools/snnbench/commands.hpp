#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace snn::cli {

/// Parses argv and dispatches to a subcommand. Returns the process exit
/// code: 0 on success, 2 on usage errors, 1 on runtime failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct SweepSpec {
    std::vector<std::uint32_t> sizes;
    std::vector<std::uint32_t> ranks;
    std::string transport = "inproc";
    int repetitions = 1;
    std::uint64_t seed = 1;
    std::uint64_t duration_ms = 1000;

    /// Throws ConfigError on empty lists or repetitions < 1.
    void validate() const;
};

struct ScaleRow {
    std::uint32_t neurons = 0;
    std::uint32_t ranks = 0;
    int repetition = 0;
    std::string transport;
    std::uint64_t duration_ms = 0;
    double wall_clock_s = 0.0;
    double computation = 0.0;
    double communication = 0.0;
    double barrier = 0.0;
    double other = 0.0;
    bool real_time = false;
    std::uint64_t total_spikes = 0;
    double mean_rate_hz = 0.0;
    std::uint64_t messages = 0;
    double bytes_per_message = 0.0;
    std::string status = "ok";
};

/// Column names of the scale CSV, in order.
const std::vector<std::string_view>& scale_columns();
std::string scale_csv_header();
std::string format_scale_row(const ScaleRow& row);

/// Runs every (size, ranks, repetition) cell; failures become rows with a
/// non-"ok" status and the sweep continues.
std::vector<ScaleRow> run_sweep(const SweepSpec& sweep, std::ostream* progress = nullptr);

}  // namespace snn::cli
