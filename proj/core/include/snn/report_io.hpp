#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "snn/engine.hpp"

namespace snn {

inline constexpr int kRunReportVersion = 1;

/// Versioned JSON record, one document per rank. The raster is not
/// embedded; per-step profiles are included only on request.
std::string report_to_json(const RunReport& report, bool include_steps = false);
RunReport report_from_json(const std::string& text);

/// "AER1" followed by 12-byte spike records.
void write_raster(const std::filesystem::path& path, std::span<const AxonalSpike> spikes);
std::vector<AxonalSpike> read_raster(const std::filesystem::path& path);

}  // namespace snn
