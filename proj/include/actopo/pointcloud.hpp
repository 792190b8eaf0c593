#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "actopo/matrix.hpp"

namespace actopo {

/// N labeled points in R^d. Immutable once constructed; safe to share across
/// threads. Class ids are contiguous in [0, C) and `class_names()[id]` holds the
/// original label text.
class LabeledPointCloud {
  public:
    /// Validates every invariant (N >= 1, d >= 1, finite values, labels in
    /// range). Throws IngestError on violation.
    LabeledPointCloud(Matrix points, std::vector<int> labels, std::vector<std::string> class_names,
                      std::string source);

    [[nodiscard]] const Matrix& points() const noexcept { return points_; }
    [[nodiscard]] const std::vector<int>& labels() const noexcept { return labels_; }
    [[nodiscard]] const std::vector<std::string>& class_names() const noexcept { return class_names_; }
    [[nodiscard]] const std::string& source() const noexcept { return source_; }

    [[nodiscard]] std::size_t size() const noexcept { return points_.rows(); }
    [[nodiscard]] std::size_t dim() const noexcept { return points_.cols(); }
    [[nodiscard]] std::size_t n_classes() const noexcept { return class_names_.size(); }

  private:
    Matrix points_;
    std::vector<int> labels_;
    std::vector<std::string> class_names_;
    std::string source_;
};

struct LabelEncoding {
    std::vector<int> ids;
    std::vector<std::string> names;
};

// Integer labels already contiguous from 0 keep their values. Anything else
// (strings, gaps, negatives) is remapped to 0..C-1 in first-appearance order.
LabelEncoding encode_labels(const std::vector<std::string>& raw);
LabelEncoding encode_labels(const std::vector<std::int64_t>& raw);

LabeledPointCloud load_csv(const std::filesystem::path& path, const std::string& label_column = "label");
void save_csv(const LabeledPointCloud& cloud, const std::filesystem::path& path,
              const std::string& label_column = "label");

/// Points: NPY v1.0, C-order, 2-D, '<f4' or '<f8'. Labels: 1-D '<i4'/'<i8' NPY
/// or a one-column CSV (header optional, labels may be text).
LabeledPointCloud load_npy(const std::filesystem::path& points_path, const std::filesystem::path& labels_path);

// Binds an extraction run (or synth output) to the files it wrote.
struct Manifest {
    std::filesystem::path points_file;
    std::filesystem::path labels_file;
    std::string layer_name;
    std::string model_name;
    std::optional<std::string> transform;
};

/// Parses a manifest JSON; relative paths resolve against the manifest's
/// directory. The key set must be exactly the five manifest keys.
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Loads the cloud a manifest references and checks both files agree on N.
LabeledPointCloud load_cloud(const Manifest& manifest);

/// Dispatches on extension: .json -> manifest, .csv -> load_csv.
LabeledPointCloud load_cloud(const std::filesystem::path& input);

}  // namespace actopo
