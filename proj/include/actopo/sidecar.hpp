#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "actopo/metrics.hpp"

// Binary cache for distance matrices: one line of JSON preamble
// ({"format", "n", "metric", "has_infinite", "dtype", "order"}) terminated by
// '\n', then N*N little-endian 8-byte floats in row-major order.
namespace actopo::sidecar {

void write(const DistanceMatrix& d, const std::filesystem::path& path);
DistanceMatrix read(const std::filesystem::path& path);

/// 64-bit FNV-1a over the cloud's coordinates and the metric parameters, as
/// 16 hex digits. Identical inputs always give the same key.
std::string cache_key(const LabeledPointCloud& cloud, const MetricSpec& spec);

/// Returns the cached matrix under `dir` when present, else computes and stores it.
DistanceMatrix load_or_compute(const LabeledPointCloud& cloud, const MetricSpec& spec,
                               const std::filesystem::path& dir);

}  // namespace actopo::sidecar
