#pragma once

#include <cstddef>
#include <string_view>

namespace actopo::viz {

// Okabe-Ito followed by eight further colorblind-distinguishable tones.
// id -> color is fixed and independent of the data; ids wrap modulo the size.
inline constexpr std::string_view kCategorical[] = {
    "#E69F00", "#56B4E9", "#009E73", "#F0E442", "#0072B2", "#D55E00", "#CC79A7", "#000000",
    "#882255", "#44AA99", "#117733", "#332288", "#DDCC77", "#AA4499", "#88CCEE", "#999933",
};
inline constexpr std::size_t kCategoricalSize = sizeof kCategorical / sizeof kCategorical[0];

inline constexpr std::string_view kNoiseColor = "#BBBBBB";
// Heatmap cells with no finite distance (disconnected geodesic pairs).
inline constexpr std::string_view kUnreachableColor = "#FF00FF";

inline std::string_view category_color(std::size_t id) {
    return kCategorical[id % kCategoricalSize];
}

}  // namespace actopo::viz
