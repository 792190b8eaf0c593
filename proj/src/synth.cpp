#include "actopo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "actopo/error.hpp"
#include "actopo/rng.hpp"

namespace actopo {

using nlohmann::json;

namespace {

// Stream ids for the non-class draws.
constexpr std::uint64_t kOutlierStream = 0xFFFF'0001;

template <class E, std::size_t M>
E parse_enum(const json& j, const char* key, const std::string_view (&names)[M]) {
    const auto s = j.at(key).get<std::string>();
    for (std::size_t i = 0; i < M; ++i) {
        if (names[i] == s) {
            return static_cast<E>(i);
        }
    }
    throw ParameterError(std::string("unknown ") + key + " '" + s + "'");
}

constexpr std::string_view kFamilies[] = {"gaussian_blobs", "swiss_roll"};
constexpr std::string_view kDensities[] = {"dense", "sparse"};
constexpr std::string_view kSeparabilities[] = {"separable", "non_separable"};
constexpr std::string_view kNoiseKinds[] = {"gaussian", "salt_pepper", "speckle", "poisson", "uniform"};

// Arc length of the planar spiral r = t from 0 to t.
double arc(double t) {
    return 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t));
}

// Inverse of arc() by Newton's method (arc is convex and increasing for t > 0).
double arc_inverse(double s) {
    double t = std::sqrt(2.0 * s);
    for (int it = 0; it < 60; ++it) {
        const double step = (arc(t) - s) / std::sqrt(1.0 + t * t);
        t -= step;
        if (std::abs(step) <= 1e-15 * t) {
            break;
        }
    }
    return t;
}

void generate_blob_class(const SynthSpec& spec, const Matrix& centers, std::size_t c, std::vector<double>& out) {
    Rng rng = Rng::derived(spec.seed, c);
    const double sigma = blob_sigma(spec.density);
    for (std::size_t i = 0; i < spec.n_per_class; ++i) {
        for (std::size_t t = 0; t < spec.dim; ++t) {
            out.push_back(centers(c, t) + sigma * rng.normal());
        }
    }
}

void generate_roll_class(const SynthSpec& spec, std::size_t c, std::vector<double>& out) {
    Rng rng = Rng::derived(spec.seed, c);
    const auto classes = static_cast<double>(spec.n_classes);
    const double band = (kRollEnd - kRollStart) / classes;
    const double t_lo = kRollStart + band * static_cast<double>(c);
    const double t_hi = c + 1 == spec.n_classes ? kRollEnd : t_lo + band;
    const double s_lo = arc(t_lo);
    const double s_hi = arc(t_hi);
    const double height = roll_height(spec.density);
    const bool separable = spec.separability == Separability::separable;
    constexpr double kGap = 0.1 * std::numbers::pi;
    constexpr double kThinBand = 0.5 * std::numbers::pi;
    constexpr double kKeep = 0.1;

    std::size_t made = 0;
    while (made < spec.n_per_class) {
        const double t = arc_inverse(rng.uniform(s_lo, s_hi));
        const double h = rng.uniform(0.0, height);
        if (separable) {
            double to_boundary = std::numeric_limits<double>::infinity();
            if (c > 0) {
                to_boundary = t - t_lo;
            }
            if (c + 1 < spec.n_classes) {
                to_boundary = std::min(to_boundary, t_hi - t);
            }
            if (to_boundary < kGap) {
                continue;
            }
            if (to_boundary < kThinBand && !rng.bernoulli(kKeep)) {
                continue;
            }
        }
        out.push_back(t * std::cos(t));
        out.push_back(h);
        out.push_back(t * std::sin(t));
        for (std::size_t extra = 3; extra < spec.dim; ++extra) {
            out.push_back(0.0);
        }
        ++made;
    }
}

}  // namespace

std::string_view to_string(Family f) {
    return kFamilies[static_cast<std::size_t>(f)];
}
std::string_view to_string(Density d) {
    return kDensities[static_cast<std::size_t>(d)];
}
std::string_view to_string(Separability s) {
    return kSeparabilities[static_cast<std::size_t>(s)];
}
std::string_view to_string(NoiseKind k) {
    return kNoiseKinds[static_cast<std::size_t>(k)];
}

NoiseKind parse_noise_kind(std::string_view name) {
    for (std::size_t i = 0; i < std::size(kNoiseKinds); ++i) {
        if (kNoiseKinds[i] == name) {
            return static_cast<NoiseKind>(i);
        }
    }
    throw ParameterError("unknown noise kind '" + std::string(name) + "'");
}

void SynthSpec::validate() const {
    if (n_classes == 0 || n_per_class == 0 || dim == 0) {
        throw ParameterError("synth counts must be positive (n_classes, n_per_class, dim)");
    }
    if (family == Family::swiss_roll && dim < 3) {
        throw ParameterError("swiss_roll needs dim >= 3");
    }
}

json to_json(const SynthSpec& spec) {
    return {{"family", to_string(spec.family)},
            {"n_classes", spec.n_classes},
            {"n_per_class", spec.n_per_class},
            {"dim", spec.dim},
            {"density", to_string(spec.density)},
            {"separability", to_string(spec.separability)},
            {"outliers", spec.outliers},
            {"seed", spec.seed}};
}

SynthSpec synth_spec_from_json(const json& j) {
    if (!j.is_object()) {
        throw ParameterError("synth spec must be a JSON object");
    }
    static constexpr std::string_view kKeys[] = {"family",  "n_classes",    "n_per_class", "dim",
                                                 "density", "separability", "outliers",    "seed"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
            throw ParameterError("unknown synth spec key '" + key + "'");
        }
    }
    SynthSpec s;
    try {
        if (j.contains("family")) {
            s.family = parse_enum<Family>(j, "family", kFamilies);
        }
        if (j.contains("density")) {
            s.density = parse_enum<Density>(j, "density", kDensities);
        }
        if (j.contains("separability")) {
            s.separability = parse_enum<Separability>(j, "separability", kSeparabilities);
        }
        s.n_classes = j.value("n_classes", s.n_classes);
        s.n_per_class = j.value("n_per_class", s.n_per_class);
        s.dim = j.value("dim", s.dim);
        s.outliers = j.value("outliers", s.outliers);
        s.seed = j.value("seed", s.seed);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed synth spec: ") + e.what());
    }
    s.validate();
    return s;
}

double blob_sigma(Density d) {
    return d == Density::dense ? 0.5 : 1.5;
}

double blob_spacing(const SynthSpec& spec) {
    return (spec.separability == Separability::separable ? 10.0 : 2.0) * blob_sigma(spec.density);
}

double roll_height(Density d) {
    return d == Density::dense ? 10.0 : 21.0;
}

Matrix blob_centers(const SynthSpec& spec) {
    spec.validate();
    const std::size_t c_count = spec.n_classes;
    const std::size_t d = spec.dim;
    const double spacing = blob_spacing(spec);
    Matrix centers(c_count, d);
    if (c_count <= d) {
        // Pairwise distance between a e_i and a e_j is a * sqrt(2).
        for (std::size_t c = 0; c < c_count; ++c) {
            centers(c, c) = spacing / std::numbers::sqrt2;
        }
    } else if (d >= 2) {
        const double radius = spacing / (2.0 * std::sin(std::numbers::pi / static_cast<double>(c_count)));
        for (std::size_t c = 0; c < c_count; ++c) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(c_count);
            centers(c, 0) = radius * std::cos(angle);
            centers(c, 1) = radius * std::sin(angle);
        }
    } else {
        for (std::size_t c = 0; c < c_count; ++c) {
            centers(c, 0) = spacing * static_cast<double>(c);
        }
    }
    return centers;
}

LabeledPointCloud generate(const SynthSpec& spec) {
    spec.validate();
    const std::size_t d = spec.dim;
    std::vector<double> values;
    values.reserve(spec.n_classes * spec.n_per_class * d);
    std::vector<int> labels;
    const Matrix centers = spec.family == Family::gaussian_blobs ? blob_centers(spec) : Matrix();
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        if (spec.family == Family::gaussian_blobs) {
            generate_blob_class(spec, centers, c, values);
        } else {
            generate_roll_class(spec, c, values);
        }
        labels.insert(labels.end(), spec.n_per_class, static_cast<int>(c));
    }

    if (spec.outliers) {
        const std::size_t n = labels.size();
        const auto extra = static_cast<std::size_t>(std::ceil(0.02 * static_cast<double>(n)));
        std::vector<double> lo(d, std::numeric_limits<double>::infinity());
        std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
        Matrix means(spec.n_classes, d);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < d; ++t) {
                const double v = values[i * d + t];
                lo[t] = std::min(lo[t], v);
                hi[t] = std::max(hi[t], v);
                means(static_cast<std::size_t>(labels[i]), t) += v / static_cast<double>(spec.n_per_class);
            }
        }
        Rng rng = Rng::derived(spec.seed, kOutlierStream);
        for (std::size_t o = 0; o < extra; ++o) {
            std::vector<double> p(d);
            for (std::size_t t = 0; t < d; ++t) {
                const double extent = hi[t] > lo[t] ? hi[t] - lo[t] : 1.0;
                const double mid = (lo[t] + hi[t]) / 2.0;
                p[t] = rng.uniform(mid - 5.0 * extent, mid + 5.0 * extent);
            }
            std::size_t best = 0;
            double best_d2 = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < spec.n_classes; ++c) {
                double d2 = 0.0;
                for (std::size_t t = 0; t < d; ++t) {
                    d2 += (p[t] - means(c, t)) * (p[t] - means(c, t));
                }
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = c;
                }
            }
            values.insert(values.end(), p.begin(), p.end());
            labels.push_back(static_cast<int>(best));
        }
    }

    std::vector<std::string> names;
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        names.push_back(std::to_string(c));
    }
    const std::size_t rows = labels.size();
    return LabeledPointCloud(Matrix(rows, d, std::move(values)), std::move(labels), std::move(names),
                             "synth:" + to_json(spec).dump());
}

void NoiseSpec::validate() const {
    if (!std::isfinite(strength) || strength < 0.0) {
        throw ParameterError("noise strength must be finite and >= 0");
    }
    if (kind == NoiseKind::salt_pepper && strength > 1.0) {
        throw ParameterError("salt_pepper probability must be in [0, 1]");
    }
    if (kind == NoiseKind::poisson && strength == 0.0) {
        throw ParameterError("poisson scale must be > 0");
    }
}

NoiseOutcome add_noise(const LabeledPointCloud& cloud, const NoiseSpec& spec) {
    spec.validate();
    const std::size_t n = cloud.size();
    const std::size_t d = cloud.dim();
    const Matrix& x = cloud.points();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < d; ++t) {
            lo[t] = std::min(lo[t], x(i, t));
            hi[t] = std::max(hi[t], x(i, t));
        }
    }

    std::vector<std::uint8_t> altered(n * d, 0);
    double max_abs_shift = 0.0;
    Matrix y = x;
    Rng rng(spec.seed);
    const double s = spec.strength;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < d; ++t) {
            const double v = x(i, t);
            double w = v;
            switch (spec.kind) {
            case NoiseKind::gaussian:
                w = v + s * rng.normal();
                break;
            case NoiseKind::salt_pepper:
                if (rng.bernoulli(s)) {
                    w = rng.bernoulli(0.5) ? hi[t] : lo[t];
                    altered[i * d + t] = 1;
                }
                break;
            case NoiseKind::speckle:
                w = v * (1.0 + s * rng.normal());
                break;
            case NoiseKind::poisson:
                w = static_cast<double>(rng.poisson(s * (v - lo[t]))) / s + lo[t];
                break;
            case NoiseKind::uniform:
                w = v + rng.uniform(-s, s);
                break;
            }
            y(i, t) = w;
            max_abs_shift = std::max(max_abs_shift, std::abs(w - v));
        }
    }

    json provenance = {{"kind", to_string(spec.kind)}, {"strength", s}, {"seed", spec.seed}};
    if (spec.kind == NoiseKind::poisson) {
        provenance["shift_min"] = lo;
        provenance["shift_max"] = hi;
    }
    std::string source = cloud.source() + " +noise:" + provenance.dump();
    return {LabeledPointCloud(std::move(y), cloud.labels(), cloud.class_names(), std::move(source)),
            std::move(altered), max_abs_shift, std::move(provenance)};
}

}  // namespace actopo
