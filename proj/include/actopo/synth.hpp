#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "actopo/matrix.hpp"
#include "actopo/pointcloud.hpp"

namespace actopo {

enum class Family { gaussian_blobs, swiss_roll };
enum class Density { dense, sparse };
enum class Separability { separable, non_separable };

struct SynthSpec {
    Family family = Family::gaussian_blobs;
    std::size_t n_classes = 3;
    std::size_t n_per_class = 50;
    std::size_t dim = 2;
    Density density = Density::dense;
    Separability separability = Separability::separable;
    bool outliers = false;
    std::uint64_t seed = 0;

    void validate() const;  // throws ParameterError
};

std::string_view to_string(Family f);
std::string_view to_string(Density d);
std::string_view to_string(Separability s);

nlohmann::json to_json(const SynthSpec& spec);
/// Missing keys keep their defaults; unknown keys are rejected.
SynthSpec synth_spec_from_json(const nlohmann::json& j);

/// Blob parameters: sigma 0.5 (dense) or 1.5 (sparse); neighboring centers
/// 10 sigma apart when separable, 2 sigma when not.
double blob_sigma(Density d);
double blob_spacing(const SynthSpec& spec);

/// C x dim center arrangement. Scaled basis vectors when C <= dim, otherwise a
/// regular C-gon in the first two coordinates (a line when dim = 1).
Matrix blob_centers(const SynthSpec& spec);

/// Swiss roll: t in [1.5 pi, 4.5 pi], (t cos t, h, t sin t), h uniform in
/// [0, H] with H = 10 (dense) or 21 (sparse), sampled uniformly by area. Class
/// c is the c-th of C equal angle bands. Separable rolls leave an empty gap of
/// 0.1 pi around each band boundary and keep only 10% of points within 0.5 pi
/// of it. Coordinates beyond the third are zero.
inline constexpr double kRollStart = 1.5 * 3.14159265358979323846;
inline constexpr double kRollEnd = 4.5 * 3.14159265358979323846;
double roll_height(Density d);

/// Rows are grouped by class; class c uses the stream derived from (seed, c).
LabeledPointCloud generate(const SynthSpec& spec);

enum class NoiseKind { gaussian, salt_pepper, speckle, poisson, uniform };

std::string_view to_string(NoiseKind k);
NoiseKind parse_noise_kind(std::string_view name);  // throws ParameterError

struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double strength = 0.0;  // sigma, flip probability, poisson scale, or half-range
    std::uint64_t seed = 0;

    void validate() const;
};

struct NoiseOutcome {
    LabeledPointCloud cloud;
    std::vector<std::uint8_t> altered;  // row-major N x d; salt_pepper replacements
    double max_abs_shift = 0.0;         // largest coordinate change
    nlohmann::json provenance;          // spec, plus the poisson shift per dimension
};

/// Coordinates are visited row-major from a single stream seeded by spec.seed.
NoiseOutcome add_noise(const LabeledPointCloud& cloud, const NoiseSpec& spec);

}  // namespace actopo
