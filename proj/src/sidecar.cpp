#include "actopo/sidecar.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "actopo/error.hpp"

namespace actopo::sidecar {

namespace {

constexpr const char* kFormat = "actopo-distance-v1";

nlohmann::ordered_json metric_json(const MetricSpec& spec) {
    nlohmann::ordered_json j;
    j["kind"] = std::string(to_string(spec.kind));
    j["k_neighbors"] = spec.k_neighbors;
    j["covariance_shrinkage"] = spec.covariance_shrinkage;
    return j;
}

class Fnv1a {
  public:
    void bytes(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
    }
    template <typename T>
    void value(const T& v) {
        bytes(&v, sizeof v);
    }
    [[nodiscard]] std::uint64_t digest() const { return state_; }

  private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace

void write(const DistanceMatrix& d, const std::filesystem::path& path) {
    static_assert(std::endian::native == std::endian::little);
    nlohmann::ordered_json header;
    header["format"] = kFormat;
    header["n"] = d.size();
    header["metric"] = metric_json(d.spec());
    header["has_infinite"] = d.has_infinite();
    header["dtype"] = "<f8";
    header["order"] = "row-major";
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IngestError(path.string() + ": cannot open for writing");
    }
    const std::string line = header.dump() + "\n";
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    const auto& values = d.values().data();
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * 8));
}

DistanceMatrix read(const std::filesystem::path& path) {
    const std::string where = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestError(where + ": cannot open distance sidecar");
    }
    std::string line;
    std::getline(in, line);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw IngestError(where + ": malformed sidecar preamble: " + e.what());
    }
    if (header.value("format", "") != kFormat || header.value("dtype", "") != "<f8") {
        throw IngestError(where + ": not an actopo distance sidecar");
    }
    const auto n = header.at("n").get<std::size_t>();
    MetricSpec spec;
    spec.kind = parse_metric_kind(header.at("metric").at("kind").get<std::string>());
    spec.k_neighbors = header.at("metric").at("k_neighbors").get<std::size_t>();
    spec.covariance_shrinkage = header.at("metric").at("covariance_shrinkage").get<double>();
    Matrix values(n, n);
    in.read(reinterpret_cast<char*>(values.data().data()), static_cast<std::streamsize>(n * n * 8));
    if (static_cast<std::size_t>(in.gcount()) != n * n * 8) {
        throw IngestError(where + ": truncated sidecar payload");
    }
    return DistanceMatrix(std::move(values), spec);
}

std::string cache_key(const LabeledPointCloud& cloud, const MetricSpec& spec) {
    Fnv1a h;
    h.value(static_cast<std::uint64_t>(cloud.size()));
    h.value(static_cast<std::uint64_t>(cloud.dim()));
    h.bytes(cloud.points().data().data(), cloud.points().data().size() * sizeof(double));
    const auto kind = to_string(spec.kind);
    h.bytes(kind.data(), kind.size());
    if (spec.uses_neighbors()) {
        h.value(static_cast<std::uint64_t>(spec.k_neighbors));
    }
    if (spec.uses_covariance()) {
        h.value(spec.covariance_shrinkage);
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(16, '0');
    const std::uint64_t digest = h.digest();
    for (int i = 0; i < 16; ++i) {
        out[static_cast<std::size_t>(15 - i)] = hex[(digest >> (4 * i)) & 0xf];
    }
    return out;
}

DistanceMatrix load_or_compute(const LabeledPointCloud& cloud, const MetricSpec& spec,
                               const std::filesystem::path& dir) {
    const auto path = dir / (cache_key(cloud, spec) + ".dist");
    if (std::filesystem::exists(path)) {
        DistanceMatrix cached = read(path);
        if (cached.size() == cloud.size() && cached.spec() == spec) {
            return cached;
        }
    }
    DistanceMatrix fresh = pairwise_distances(cloud, spec);
    std::filesystem::create_directories(dir);
    write(fresh, path);
    return fresh;
}

}  // namespace actopo::sidecar
