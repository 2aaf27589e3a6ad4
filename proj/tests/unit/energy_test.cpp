#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "snn/energy.hpp"
#include "snn/error.hpp"
#include "support/published_tables.hpp"
#include "support/synthetic_trace.hpp"

namespace snn::energy {
namespace {

PowerTrace constant_trace(double watts, double seconds, double dt = 0.1) {
    PowerTrace trace;
    for (int i = 0; i * dt <= seconds + 1e-9; ++i) trace.samples.push_back({i * dt, watts});
    return trace;
}

TEST(ParseTrace, AcceptsHeaderAndRows) {
    const auto t = parse_trace("t_seconds,watts\n0,10\n1,10\n");
    ASSERT_EQ(t.samples.size(), 2u);
    EXPECT_EQ(t.samples[1].t, 1.0);
    EXPECT_EQ(parse_trace("0,10\n1,10").samples.size(), 2u);
}

TEST(ParseTrace, RejectsBadInputWithLineNumbers) {
    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            parse_trace(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 9999;
    };
    EXPECT_EQ(line_of("1,10\n0,10"), 2u);
    EXPECT_EQ(line_of("0,10\n1,-3\n"), 2u);
    EXPECT_EQ(line_of("0,10\n1,x\n"), 2u);
    EXPECT_EQ(line_of("0,10\n1,2,3\n"), 2u);
    EXPECT_THROW(parse_trace(""), ParseError);
    EXPECT_THROW(parse_trace("t,w\n"), ParseError);
    EXPECT_THROW(load_trace("/nonexistent/trace.csv"), ParseError);
}

TEST(ParseWindow, Formats) {
    const auto w = parse_window("0:5");
    EXPECT_EQ(w.begin, 0.0);
    EXPECT_EQ(w.end, 5.0);
    EXPECT_THROW(parse_window("5"), ParseError);
    EXPECT_THROW(parse_window("5:1"), ParseError);
    EXPECT_THROW(parse_window("a:b"), ParseError);
}

TEST(Baseline, ConstantServerAndEmbeddedLevels) {
    EXPECT_DOUBLE_EQ(estimate_baseline(constant_trace(testing::kServerBaselineW, 10), {0, 5}), 564.0);
    EXPECT_NEAR(estimate_baseline(constant_trace(testing::kEmbeddedBaselineW, 10), {0, 5}), 49.2, 1e-12);
    EXPECT_EQ(baseline_spread(constant_trace(564, 10), {0, 5}), 0.0);
}

TEST(Baseline, RampAveragesToMidpoint) {
    PowerTrace t;
    for (int i = 0; i <= 100; ++i) t.samples.push_back({i * 0.1, i * 0.1});
    EXPECT_NEAR(estimate_baseline(t, {0, 10}), 5.0, 1e-12);
}

TEST(Baseline, NeedsThreeSamples) {
    EXPECT_THROW(estimate_baseline(constant_trace(1, 10), {3.01, 3.15}), EnergyError);
    EXPECT_THROW(estimate_baseline(constant_trace(1, 10), {20, 30}), EnergyError);
}

TEST(EnergyToSolution, PublishedX86Rows) {
    const auto t1 = testing::step_trace(564, 48, 5.0, 150.9);
    EXPECT_NEAR(energy_to_solution(t1, 564, 5.0, 155.9), 7243.2, 0.1);
    const auto t2 = testing::step_trace(564, 53, 5.0, 121.8);
    EXPECT_NEAR(energy_to_solution(t2, 564, 5.0, 126.8), 6455.4, 0.1);
}

TEST(EnergyToSolution, ZeroExcessIsZero) {
    EXPECT_EQ(energy_to_solution(constant_trace(564, 20), 564, 1, 19), 0.0);
    EXPECT_EQ(energy_to_solution(constant_trace(500, 20), 564, 1, 19), 0.0);
}

TEST(EnergyToSolution, InterpolatesAtBoundaries) {
    PowerTrace t;
    t.samples = {{0, 0}, {1, 10}, {2, 10}};
    // Ramp from 5 W at t = 0.5 to 10 W at 1, then flat to 1.5.
    EXPECT_NEAR(energy_to_solution(t, 0, 0.5, 1.5), 0.5 * 7.5 + 0.5 * 10, 1e-12);
}

TEST(EnergyToSolution, DegenerateOrOutsideIntervalThrows) {
    const auto t = constant_trace(10, 10);
    EXPECT_THROW(energy_to_solution(t, 0, 5, 5), EnergyError);
    EXPECT_THROW(energy_to_solution(t, 0, 6, 5), EnergyError);
    EXPECT_THROW(energy_to_solution(t, 0, -1, 5), EnergyError);
    EXPECT_THROW(energy_to_solution(t, 0, 1, 11), EnergyError);
}

TEST(EnergyToSolution, PiecewiseConstantIsExact) {
    // Plateaus sampled at irregular dyadic times, so every product and sum
    // below is exact in binary floating point.
    PowerTrace t;
    t.samples = {{0.0, 164}, {0.25, 164}, {1.0, 164}, {1.5, 164},    // 64 W over 1.5 s
                 {2.0, 132}, {2.75, 132}, {4.0, 132},                // 32 W over 2 s
                 {4.5, 100}, {6.0, 100}};                            // idle
    const double plateau = 64 * 1.5 + 32 * 2.0;
    const double edges = 0.5 * (64 + 32) * 0.5 + 0.5 * (32 + 0) * 0.5;
    EXPECT_EQ(energy_to_solution(t, 100, 0.0, 6.0), plateau + edges);
    EXPECT_EQ(energy_to_solution(t, 100, 0.25, 1.5), 64 * 1.25);
    EXPECT_EQ(energy_to_solution(t, 100, 0.5, 1.25), 64 * 0.75);
    EXPECT_EQ(energy_to_solution(t, 100, 2.0, 4.0), 32 * 2.0);
}

TEST(EnergyToSolution, NonIncreasingInBaseline) {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> noise(0.0, 8.0);
    PowerTrace t;
    for (int i = 0; i <= 500; ++i) t.samples.push_back({i * 0.1, std::max(0.0, 120 + noise(gen))});
    double prev = energy_to_solution(t, 0, 0, 50);
    for (double b = 1; b < 200; b += 1.5) {
        const double e = energy_to_solution(t, b, 0, 50);
        EXPECT_LE(e, prev);
        EXPECT_GE(e, 0.0);
        prev = e;
    }
}

TEST(DetectRunWindow, FindsTheKnee) {
    const auto t = testing::step_trace(564, 48, 5.0, 150.9);
    const Window pause{0, 4.9};
    const auto w = detect_run_window(t, pause, estimate_baseline(t, pause), baseline_spread(t, pause));
    EXPECT_DOUBLE_EQ(w.begin, 5.0);
    EXPECT_NEAR(w.end, 155.9, 1e-9);
}

TEST(DetectRunWindow, NothingAboveThresholdThrows) {
    const auto t = constant_trace(564, 20);
    EXPECT_THROW(detect_run_window(t, {0, 5}, 564, 0), EnergyError);
}

TEST(JoulesPerEvent, Ratios) {
    EXPECT_DOUBLE_EQ(joules_per_event(1.0, 1e6), 1e-6);
    EXPECT_THROW(joules_per_event(1.0, 0.0), EnergyError);
    const double recurrent = synaptic_events(20480, 1125, 3.2, 10);
    const double external = synaptic_events(20480, 400, 3.0, 10);
    EXPECT_DOUBLE_EQ(recurrent, 7.3728e8);
    EXPECT_DOUBLE_EQ(external, 2.4576e8);
    EXPECT_NEAR(joules_per_event(3137.2, recurrent) * 1e6, 4.26, 0.005);
    EXPECT_NEAR(joules_per_event(3137.2, recurrent + external) * 1e6, 3.19, 0.005);
    EXPECT_NEAR(joules_per_event(1110.0, recurrent + external) * 1e6, 1.13, 0.005);
}

TEST(Analyze, FillsBothDenominators) {
    const auto t = testing::step_trace(564, 48, 5.0, 150.9);
    AnalysisOptions o;
    o.pause = {0, 4.9};
    o.recurrent_events = 7.3728e8;
    o.external_events = 2.4576e8;
    const auto r = analyze(t, o);
    EXPECT_DOUBLE_EQ(r.baseline_w, 564.0);
    EXPECT_NEAR(r.energy_j, 7243.2, 0.1);
    ASSERT_TRUE(r.j_per_event_recurrent && r.j_per_event_total);
    EXPECT_GT(*r.j_per_event_recurrent, *r.j_per_event_total);
    const auto json = report_to_json(r);
    EXPECT_NE(json.find("\"energy_to_solution_j\": 7243.2"), std::string::npos) << json;
    EXPECT_NE(json.find("uj_per_event_total"), std::string::npos);

    AnalysisOptions no_events;
    no_events.pause = {0, 4.9};
    const auto bare = analyze(t, no_events);
    EXPECT_FALSE(bare.j_per_event_recurrent);
    EXPECT_FALSE(bare.j_per_event_total);
}

TEST(CheckTable, X86RowsAreConsistent) {
    for (const auto& c : check_table(testing::x86_rows())) EXPECT_TRUE(c.consistent) << c.row.label;
}

TEST(CheckTable, FlagsFirstArmRow) {
    const auto checks = check_table(testing::arm_rows());
    ASSERT_EQ(checks.size(), 4u);
    EXPECT_FALSE(checks[0].consistent);
    EXPECT_NEAR(checks[0].product_j, 1400.96, 1e-9);
    EXPECT_NEAR(checks[0].discrepancy_j, 127.36, 1e-9);
    for (std::size_t i = 1; i < checks.size(); ++i) EXPECT_TRUE(checks[i].consistent) << checks[i].row.label;
}

TEST(ParseTable, ReadsCsv) {
    const auto rows = parse_table("label,time_s,power_w,energy_j\n1,636.8,2.2,1273.6\n 2 HT ,121.8,53,6455.4\n");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].label, "2 HT");
    EXPECT_EQ(rows[0].energy_j, 1273.6);
    EXPECT_THROW(parse_table("a,1,2\n"), ParseError);
}

}  // namespace
}  // namespace snn::energy
