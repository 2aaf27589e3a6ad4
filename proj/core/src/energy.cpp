#include "snn/energy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "snn/error.hpp"

namespace snn::energy {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::optional<double> to_double(std::string_view text) {
    const auto s = trim(text);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Linear interpolation of the trace at time t (t within the trace span).
double power_at(const std::vector<PowerSample>& s, double t) {
    auto it = std::lower_bound(s.begin(), s.end(), t, [](const PowerSample& a, double v) { return a.t < v; });
    if (it == s.end()) return s.back().watts;
    if (it->t == t || it == s.begin()) return it->watts;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double f = (t - lo.t) / (hi.t - lo.t);
    return lo.watts + f * (hi.watts - lo.watts);
}

std::vector<double> window_values(const PowerTrace& trace, Window w) {
    std::vector<double> v;
    for (const auto& s : trace.samples) {
        if (s.t >= w.begin && s.t <= w.end) v.push_back(s.watts);
    }
    return v;
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

}  // namespace

PowerTrace parse_trace(const std::string& text, std::string source) {
    PowerTrace trace;
    trace.source = std::move(source);
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto content = trim(line);
        if (content.empty()) continue;
        const auto cells = split_csv(content);
        if (cells.size() != 2) throw ParseError(line_no, "expected 2 columns (t_seconds,watts)");
        const auto t = to_double(cells[0]);
        const auto p = to_double(cells[1]);
        if (!t || !p) {
            if (first_content) {
                first_content = false;
                continue;  // header
            }
            throw ParseError(line_no, "non-numeric value in '" + content + "'");
        }
        first_content = false;
        if (*p < 0.0) throw ParseError(line_no, "negative power");
        if (!trace.samples.empty() && *t <= trace.samples.back().t) {
            throw ParseError(line_no, "time is not strictly increasing");
        }
        trace.samples.push_back({*t, *p});
    }
    if (trace.samples.empty()) throw ParseError(line_no, "trace contains no samples");
    return trace;
}

PowerTrace load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open trace " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_trace(text.str(), path.string());
}

Window parse_window(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ParseError(0, "window must be 'a:b', got '" + text + "'");
    const auto a = to_double(std::string_view(text).substr(0, colon));
    const auto b = to_double(std::string_view(text).substr(colon + 1));
    if (!a || !b || !(*a < *b)) throw ParseError(0, "window must be 'a:b' with a < b, got '" + text + "'");
    return {*a, *b};
}

double estimate_baseline(const PowerTrace& trace, Window pause) {
    const auto v = window_values(trace, pause);
    if (v.size() < 3) {
        throw EnergyError("pause window [" + std::to_string(pause.begin) + ", " + std::to_string(pause.end) +
                          "] holds " + std::to_string(v.size()) + " samples, need at least 3");
    }
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double baseline_spread(const PowerTrace& trace, Window pause) {
    const auto v = window_values(trace, pause);
    if (v.size() < 3) throw EnergyError("pause window holds fewer than 3 samples");
    const double mean = estimate_baseline(trace, pause);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

Window detect_run_window(const PowerTrace& trace, Window pause, double baseline, double sigma, double k) {
    const double threshold = baseline + k * sigma;
    std::optional<double> start;
    double end = 0.0;
    for (const auto& s : trace.samples) {
        if (s.t <= pause.end) continue;
        if (s.watts > threshold) {
            if (!start) start = s.t;
            end = s.t;
        }
    }
    if (!start || !(end > *start)) {
        throw EnergyError("no run detected above baseline + " + std::to_string(k) + " sigma");
    }
    return {*start, end};
}

double energy_to_solution(const PowerTrace& trace, double baseline, double start, double end) {
    if (!(start < end)) throw EnergyError("degenerate integration interval");
    const auto& s = trace.samples;
    if (s.empty() || start < s.front().t || end > s.back().t) {
        throw EnergyError("integration interval lies outside the trace");
    }
    auto excess = [&](double p) { return std::max(p - baseline, 0.0); };

    double energy = 0.0;
    double prev_t = start;
    double prev_e = excess(power_at(s, start));
    auto it = std::upper_bound(s.begin(), s.end(), start, [](double v, const PowerSample& a) { return v < a.t; });
    for (; it != s.end() && it->t < end; ++it) {
        const double e = excess(it->watts);
        energy += 0.5 * (prev_e + e) * (it->t - prev_t);
        prev_t = it->t;
        prev_e = e;
    }
    const double e_end = excess(power_at(s, end));
    energy += 0.5 * (prev_e + e_end) * (end - prev_t);
    return energy;
}

double joules_per_event(double energy_joules, double events) {
    if (!(events > 0.0)) throw EnergyError("cannot normalize energy by zero synaptic events");
    return energy_joules / events;
}

EnergyReport analyze(const PowerTrace& trace, const AnalysisOptions& options) {
    EnergyReport r;
    r.source = trace.source;
    r.baseline_w = estimate_baseline(trace, options.pause);
    r.baseline_sigma_w = baseline_spread(trace, options.pause);
    Window run{};
    if (!options.start || !options.end) {
        run = detect_run_window(trace, options.pause, r.baseline_w, r.baseline_sigma_w, options.k_sigma);
    }
    r.start_s = options.start.value_or(run.begin);
    r.end_s = options.end.value_or(run.end);
    r.energy_j = energy_to_solution(trace, r.baseline_w, r.start_s, r.end_s);
    r.recurrent_events = options.recurrent_events;
    r.external_events = options.external_events;
    if (r.recurrent_events > 0.0) r.j_per_event_recurrent = joules_per_event(r.energy_j, r.recurrent_events);
    if (r.recurrent_events + r.external_events > 0.0) {
        r.j_per_event_total = joules_per_event(r.energy_j, r.recurrent_events + r.external_events);
    }
    return r;
}

std::string report_to_json(const EnergyReport& r) {
    nlohmann::json j;
    j["format"] = "snn-energy-report";
    j["version"] = 1;
    j["source"] = r.source;
    j["baseline_w"] = round3(r.baseline_w);
    j["baseline_sigma_w"] = round3(r.baseline_sigma_w);
    j["start_s"] = round3(r.start_s);
    j["end_s"] = round3(r.end_s);
    j["duration_s"] = round3(r.duration_s());
    j["mean_excess_power_w"] = round3(r.mean_excess_w());
    j["energy_to_solution_j"] = round3(r.energy_j);
    j["recurrent_events"] = r.recurrent_events;
    j["external_events"] = r.external_events;
    auto uj = [](const std::optional<double>& v) -> nlohmann::json {
        return v ? nlohmann::json(round3(*v * 1e6)) : nlohmann::json(nullptr);
    };
    j["uj_per_event_recurrent"] = uj(r.j_per_event_recurrent);
    j["uj_per_event_total"] = uj(r.j_per_event_total);
    return j.dump(2);
}

double synaptic_events(double n_neurons, double synapses_per_neuron, double rate_hz, double seconds) {
    return n_neurons * synapses_per_neuron * rate_hz * seconds;
}

std::vector<RowCheck> check_table(const std::vector<TableRow>& rows, double tolerance_j) {
    std::vector<RowCheck> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        RowCheck c;
        c.row = row;
        c.product_j = row.time_s * row.power_w;
        c.discrepancy_j = c.product_j - row.energy_j;
        c.consistent = std::fabs(c.discrepancy_j) <= tolerance_j;
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<TableRow> parse_table(const std::string& text) {
    std::vector<TableRow> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto content = trim(line);
        if (content.empty()) continue;
        const auto cells = split_csv(content);
        if (cells.size() != 4) throw ParseError(line_no, "expected label,time_s,power_w,energy_j");
        const auto t = to_double(cells[1]);
        const auto p = to_double(cells[2]);
        const auto e = to_double(cells[3]);
        if (!t || !p || !e) {
            if (first_content) {
                first_content = false;
                continue;
            }
            throw ParseError(line_no, "non-numeric value in '" + content + "'");
        }
        first_content = false;
        rows.push_back({trim(cells[0]), *t, *p, *e});
    }
    return rows;
}

}  // namespace snn::energy
