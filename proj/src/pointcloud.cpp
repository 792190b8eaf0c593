#include "actopo/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "actopo/error.hpp"
#include "actopo/npy.hpp"
#include "actopo/text.hpp"

namespace actopo {

LabeledPointCloud::LabeledPointCloud(Matrix points, std::vector<int> labels, std::vector<std::string> class_names,
                                     std::string source)
  : points_{std::move(points)}
  , labels_{std::move(labels)}
  , class_names_{std::move(class_names)}
  , source_{std::move(source)} {
    if (points_.rows() == 0) {
        throw IngestError(source_ + ": point cloud is empty (N = 0)");
    }
    if (points_.cols() == 0) {
        throw IngestError(source_ + ": points have zero dimensions");
    }
    if (labels_.size() != points_.rows()) {
        throw IngestError(source_ + ": " + std::to_string(labels_.size()) + " labels for " +
                          std::to_string(points_.rows()) + " points");
    }
    for (std::size_t i = 0; i < points_.rows(); ++i) {
        for (std::size_t j = 0; j < points_.cols(); ++j) {
            if (!std::isfinite(points_(i, j))) {
                throw IngestError(source_ + ": non-finite value at row " + std::to_string(i) + ", column " +
                                  std::to_string(j));
            }
        }
        const int label = labels_[i];
        if (label < 0 || static_cast<std::size_t>(label) >= class_names_.size()) {
            throw IngestError(source_ + ": label " + std::to_string(label) + " at row " + std::to_string(i) +
                              " has no class name");
        }
    }
}

namespace {

template <typename Key>
LabelEncoding first_appearance(const std::vector<Key>& raw, auto&& name_of) {
    LabelEncoding enc;
    enc.ids.reserve(raw.size());
    std::unordered_map<Key, int> seen;
    for (const auto& key : raw) {
        auto [it, inserted] = seen.try_emplace(key, static_cast<int>(enc.names.size()));
        if (inserted) {
            enc.names.push_back(name_of(key));
        }
        enc.ids.push_back(it->second);
    }
    return enc;
}

}  // namespace

LabelEncoding encode_labels(const std::vector<std::int64_t>& raw) {
    std::int64_t max_label = -1;
    bool non_negative = true;
    for (auto v : raw) {
        non_negative = non_negative && v >= 0;
        max_label = std::max(max_label, v);
    }
    if (non_negative && !raw.empty()) {
        std::vector<bool> present(static_cast<std::size_t>(max_label) + 1, false);
        bool small = static_cast<std::size_t>(max_label) < raw.size() + 1;
        if (small) {
            for (auto v : raw) {
                present[static_cast<std::size_t>(v)] = true;
            }
            bool contiguous = true;
            for (bool p : present) {
                contiguous = contiguous && p;
            }
            if (contiguous) {
                LabelEncoding enc;
                enc.ids.reserve(raw.size());
                for (auto v : raw) {
                    enc.ids.push_back(static_cast<int>(v));
                }
                for (std::int64_t c = 0; c <= max_label; ++c) {
                    enc.names.push_back(std::to_string(c));
                }
                return enc;
            }
        }
    }
    return first_appearance(raw, [](std::int64_t v) { return std::to_string(v); });
}

LabelEncoding encode_labels(const std::vector<std::string>& raw) {
    std::vector<std::int64_t> as_int;
    as_int.reserve(raw.size());
    for (const auto& s : raw) {
        auto v = text::parse_int(s);
        if (!v) {
            return first_appearance(raw, [](const std::string& s) { return s; });
        }
        as_int.push_back(*v);
    }
    return encode_labels(as_int);
}

namespace {

// Splits one CSV record. Double-quoted fields may contain commas; "" escapes a quote.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    return out + "\"";
}

}  // namespace

LabeledPointCloud load_csv(const std::filesystem::path& path, const std::string& label_column) {
    const std::string where = path.string();
    std::ifstream in(path);
    if (!in) {
        throw IngestError(where + ": cannot open file");
    }
    std::string line;
    if (!std::getline(in, line) || text::trim(line).empty()) {
        throw IngestError(where + ": empty file (missing header row)");
    }
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) {
        h = std::string(text::trim(h));
    }
    std::size_t label_idx = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == label_column) {
            label_idx = c;
        }
    }
    if (label_idx == header.size()) {
        throw IngestError(where + ": header has no label column '" + label_column + "'");
    }
    if (header.size() < 2) {
        throw IngestError(where + ": header needs at least one coordinate column besides '" + label_column + "'");
    }
    for (const auto& h : header) {
        if (auto v = text::parse_double(h); v && h != label_column) {
            throw IngestError(where + ": missing header row (first row is numeric)");
        }
    }

    const std::size_t d = header.size() - 1;
    std::vector<double> values;
    std::vector<std::string> raw_labels;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (text::trim(line).empty()) {
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw IngestError(ingest_location(where, row, "") + ": expected " + std::to_string(header.size()) +
                              " fields, found " + std::to_string(fields.size()) + " (ragged row)");
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c == label_idx) {
                raw_labels.emplace_back(text::trim(fields[c]));
                continue;
            }
            auto v = text::parse_double(fields[c]);
            if (!v || !std::isfinite(*v)) {
                throw IngestError(ingest_location(where, row, header[c]) + ": non-numeric or non-finite cell '" +
                                  fields[c] + "'");
            }
            values.push_back(*v);
        }
    }
    if (raw_labels.empty()) {
        throw IngestError(where + ": no data rows");
    }
    auto enc = encode_labels(raw_labels);
    const std::size_t n = raw_labels.size();
    return LabeledPointCloud(Matrix(n, d, std::move(values)), std::move(enc.ids), std::move(enc.names), where);
}

void save_csv(const LabeledPointCloud& cloud, const std::filesystem::path& path, const std::string& label_column) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IngestError(path.string() + ": cannot open for writing");
    }
    for (std::size_t j = 0; j < cloud.dim(); ++j) {
        out << 'x' << j << ',';
    }
    out << label_column << '\n';
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        for (double v : cloud.points().row(i)) {
            out << text::shortest(v) << ',';
        }
        out << quote_if_needed(cloud.class_names()[static_cast<std::size_t>(cloud.labels()[i])]) << '\n';
    }
}

namespace {

// The first row is a header when it reads "label" or when it is the only
// non-integer row.
std::vector<std::string> read_label_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IngestError(path.string() + ": cannot open file");
    }
    std::vector<std::string> raw;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        auto field = text::trim(line);
        if (field.empty()) {
            continue;
        }
        if (field.find(',') != std::string_view::npos) {
            throw IngestError(ingest_location(path.string(), row, "") + ": labels CSV must have one column");
        }
        raw.emplace_back(field);
    }
    if (!raw.empty()) {
        const bool named = raw.front() == "label";
        const bool lone_text = !text::parse_int(raw.front()) &&
                               std::all_of(raw.begin() + 1, raw.end(), [](const std::string& f) {
                                   return text::parse_int(f).has_value();
                               });
        if (named || lone_text) {
            raw.erase(raw.begin());
        }
    }
    return raw;
}

}  // namespace

LabeledPointCloud load_npy(const std::filesystem::path& points_path, const std::filesystem::path& labels_path) {
    Matrix points = npy::read_matrix(points_path);
    LabelEncoding enc;
    if (npy::has_magic(labels_path)) {
        enc = encode_labels(npy::read_int_vector(labels_path));
    } else {
        enc = encode_labels(read_label_csv(labels_path));
    }
    if (enc.ids.size() != points.rows()) {
        throw IngestError(points_path.string() + ": N mismatch, " + std::to_string(points.rows()) + " points but " +
                          std::to_string(enc.ids.size()) + " labels in " + labels_path.string());
    }
    return LabeledPointCloud(std::move(points), std::move(enc.ids), std::move(enc.names), points_path.string());
}

}  // namespace actopo
