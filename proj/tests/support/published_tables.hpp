#pragma once

// Time, power and energy-to-solution rows from the reference measurements,
// x86 and ARM platforms.

#include <vector>

#include "snn/energy.hpp"

namespace snn::testing {

inline std::vector<energy::TableRow> x86_rows() {
    return {{"1", 150.9, 48, 7243.2},          {"2 HT", 121.8, 53, 6455.4},
            {"2", 80.7, 62, 5003.4},           {"4", 37.4, 92, 3440.8},
            {"8", 25.3, 124, 3137.2},          {"16", 26.1, 166, 4332.6},
            {"32 plus ETH", 30.0, 342, 10260.0}, {"32 plus IB", 19.7, 318, 6264.6},
            {"64 plus ETH", 69.3, 531, 36798.3}, {"64 plus IB", 32.1, 501, 16082.1}};
}

inline std::vector<energy::TableRow> arm_rows() {
    return {{"1", 636.8, 2.2, 1273.6}, {"2", 334.1, 3.4, 1135.9}, {"4", 185.0, 6.0, 1110.0},
            {"8", 133.8, 10, 1338.0}};
}

inline constexpr double kServerBaselineW = 564.0;
inline constexpr double kEmbeddedBaselineW = 49.2;

}  // namespace snn::testing
