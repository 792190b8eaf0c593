#include <fstream>
#include <set>

#include <json.hpp>

#include "actopo/error.hpp"
#include "actopo/npy.hpp"
#include "actopo/pointcloud.hpp"

namespace actopo {

namespace {

const std::set<std::string> kManifestKeys = {"points_file", "labels_file", "layer_name", "model_name", "transform"};

std::string require_string(const nlohmann::json& j, const char* key, const std::string& where) {
    const auto& v = j.at(key);
    if (!v.is_string()) {
        throw IngestError(where + ": manifest key '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
    const std::string where = path.string();
    std::ifstream in(path);
    if (!in) {
        throw IngestError(where + ": cannot open manifest");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IngestError(where + ": malformed manifest JSON: " + e.what());
    }
    if (!j.is_object()) {
        throw IngestError(where + ": manifest must be a JSON object");
    }
    std::set<std::string> keys;
    for (const auto& item : j.items()) {
        keys.insert(item.key());
    }
    if (keys != kManifestKeys) {
        std::string have;
        for (const auto& k : keys) {
            have += (have.empty() ? "" : ", ") + k;
        }
        throw IngestError(where + ": manifest keys must be exactly {points_file, labels_file, layer_name, "
                                  "model_name, transform}; found {" +
                          have + "}");
    }
    const auto base = path.parent_path();
    Manifest m;
    m.points_file = base / require_string(j, "points_file", where);
    m.labels_file = base / require_string(j, "labels_file", where);
    m.layer_name = require_string(j, "layer_name", where);
    m.model_name = require_string(j, "model_name", where);
    const auto& t = j.at("transform");
    if (t.is_string()) {
        m.transform = t.get<std::string>();
    } else if (!t.is_null()) {
        m.transform = t.dump();
    }
    return m;
}

void save_manifest(const Manifest& manifest, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["points_file"] = manifest.points_file.generic_string();
    j["labels_file"] = manifest.labels_file.generic_string();
    j["layer_name"] = manifest.layer_name;
    j["model_name"] = manifest.model_name;
    j["transform"] = manifest.transform ? nlohmann::ordered_json(*manifest.transform) : nlohmann::ordered_json();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IngestError(path.string() + ": cannot open for writing");
    }
    out << j.dump(2) << '\n';
}

LabeledPointCloud load_cloud(const Manifest& manifest) {
    for (const auto& f : {manifest.points_file, manifest.labels_file}) {
        if (!std::filesystem::exists(f)) {
            throw IngestError(f.string() + ": referenced file does not exist");
        }
    }
    if (npy::has_magic(manifest.points_file)) {
        return load_npy(manifest.points_file, manifest.labels_file);
    }
    if (manifest.points_file == manifest.labels_file) {
        return load_csv(manifest.points_file, "label");
    }
    throw IngestError(manifest.points_file.string() +
                      ": manifest points file must be NPY, or a CSV with a 'label' column referenced as both "
                      "points_file and labels_file");
}

LabeledPointCloud load_cloud(const std::filesystem::path& input) {
    if (!std::filesystem::exists(input)) {
        throw IngestError(input.string() + ": input file does not exist");
    }
    if (input.extension() == ".json") {
        return load_cloud(load_manifest(input));
    }
    if (npy::has_magic(input)) {
        throw IngestError(input.string() + ": NPY points need a manifest naming the labels file");
    }
    return load_csv(input, "label");
}

}  // namespace actopo
