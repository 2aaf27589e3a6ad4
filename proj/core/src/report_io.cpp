#include "snn/report_io.hpp"

#include <array>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "snn/error.hpp"

namespace snn {

namespace {

constexpr std::array<char, 4> kRasterMagic = {'A', 'E', 'R', '1'};

using nlohmann::json;

json phases_json(const StepProfile& p) {
    return {{"computation_s", p.computation},
            {"communication_s", p.communication},
            {"barrier_s", p.barrier},
            {"other_s", p.other}};
}

StepProfile phases_from(const json& j) {
    StepProfile p;
    p.computation = j.at("computation_s").get<double>();
    p.communication = j.at("communication_s").get<double>();
    p.barrier = j.at("barrier_s").get<double>();
    p.other = j.at("other_s").get<double>();
    return p;
}

}  // namespace

std::string report_to_json(const RunReport& r, bool include_steps) {
    json j;
    j["format"] = "snn-run-report";
    j["version"] = kRunReportVersion;
    j["rank"] = r.rank;
    j["n_ranks"] = r.n_ranks;
    j["n_neurons"] = r.n_neurons;
    j["owned_neurons"] = r.owned_neurons;
    j["fan_out"] = r.fan_out;
    j["duration_ms"] = r.duration_ms;
    j["seed"] = r.seed;
    j["setup_s"] = r.setup_seconds;
    j["wall_clock_s"] = r.wall_clock;
    j["phases"] = phases_json(r.phases);
    if (r.wall_clock > 0.0) {
        j["fractions"] = {{"computation", r.phases.computation / r.wall_clock},
                          {"communication", r.phases.communication / r.wall_clock},
                          {"barrier", r.phases.barrier / r.wall_clock},
                          {"other", r.phases.other / r.wall_clock}};
    }
    j["total_spikes"] = r.total_spikes;
    j["recurrent_events"] = r.recurrent_events;
    j["received_events"] = r.received_events;
    j["delivered_events"] = r.delivered_events;
    j["external_events"] = r.external_events;
    j["mean_rate_hz"] = r.mean_rate_hz;
    j["real_time"] = r.real_time;
    j["transport"] = {{"messages_sent", r.transport.messages_sent},
                      {"bytes_sent", r.transport.bytes_sent},
                      {"messages_received", r.transport.messages_received},
                      {"bytes_received", r.transport.bytes_received}};
    if (include_steps) {
        json steps = json::array();
        for (std::size_t i = 0; i < r.steps.size(); ++i) {
            auto s = phases_json(r.steps[i]);
            if (i < r.step_wall.size()) s["wall_s"] = r.step_wall[i];
            steps.push_back(std::move(s));
        }
        j["steps"] = std::move(steps);
    }
    return j.dump(2);
}

RunReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(0, std::string("run report: ") + e.what());
    }
    try {
        if (j.at("format") != "snn-run-report") throw ParseError(0, "not a run report");
        if (j.at("version").get<int>() != kRunReportVersion) throw ParseError(0, "unsupported run report version");
        RunReport r;
        r.rank = j.at("rank");
        r.n_ranks = j.at("n_ranks");
        r.n_neurons = j.at("n_neurons");
        r.owned_neurons = j.at("owned_neurons");
        r.fan_out = j.at("fan_out");
        r.duration_ms = j.at("duration_ms");
        r.seed = j.at("seed");
        r.setup_seconds = j.at("setup_s");
        r.wall_clock = j.at("wall_clock_s");
        r.phases = phases_from(j.at("phases"));
        r.total_spikes = j.at("total_spikes");
        r.recurrent_events = j.at("recurrent_events");
        r.received_events = j.at("received_events");
        r.delivered_events = j.at("delivered_events");
        r.external_events = j.at("external_events");
        r.mean_rate_hz = j.at("mean_rate_hz");
        r.real_time = j.at("real_time");
        const auto& t = j.at("transport");
        r.transport.messages_sent = t.at("messages_sent");
        r.transport.bytes_sent = t.at("bytes_sent");
        r.transport.messages_received = t.at("messages_received");
        r.transport.bytes_received = t.at("bytes_received");
        if (j.contains("steps")) {
            for (const auto& s : j.at("steps")) {
                r.steps.push_back(phases_from(s));
                r.step_wall.push_back(s.value("wall_s", 0.0));
            }
        }
        return r;
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("run report: ") + e.what());
    }
}

void write_raster(const std::filesystem::path& path, std::span<const AxonalSpike> spikes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os.write(kRasterMagic.data(), kRasterMagic.size());
    const auto bytes = encode(spikes);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error("write failed: " + path.string());
}

std::vector<AxonalSpike> read_raster(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError(0, "cannot open " + path.string());
    std::array<char, 4> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kRasterMagic) throw ParseError(0, "bad raster magic in " + path.string());
    std::vector<char> raw((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return decode(std::as_bytes(std::span(raw)));
}

}  // namespace snn
