#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "actopo/analysis.hpp"
#include "actopo/geometry.hpp"
#include "actopo/metrics.hpp"
#include "actopo/ordering.hpp"
#include "actopo/persistence.hpp"
#include "actopo/pointcloud.hpp"

namespace actopo {

enum class SceneKind { diagram, barcode, heatmap_dendrogram, sankey, sankey_compact, blob };

std::string_view to_string(SceneKind kind);
SceneKind parse_scene_kind(std::string_view name);  // throws RenderError

struct SceneMeta {
    std::string metric;
    std::string layer_name;
    std::vector<double> thresholds;
    std::vector<std::string> notes;
};

/// Declarative figure description; the JSON form is the canonical artifact and
/// SVG is rendered from it. Palette keys are decimal ids or "noise".
struct SceneArtifact {
    SceneKind kind = SceneKind::diagram;
    nlohmann::json payload;
    nlohmann::json palette = nlohmann::json::object();
    SceneMeta meta;
};

nlohmann::json to_json(const SceneArtifact& scene);
SceneArtifact scene_from_json(const nlohmann::json& j);

/// Throws RenderError naming the first schema violation.
void validate_scene(const SceneArtifact& scene);

struct PersistencePlots {
    SceneArtifact diagram;
    SceneArtifact barcode;
};

PersistencePlots build_persistence_plots(const PersistenceDiagram& diagram, const SceneMeta& meta = {});

/// Five stages: classes, components at the first event threshold, at the two
/// optimal thresholds, and the final components. `optimal` holds one or two
/// scores (one is repeated). Stage thresholds must be non-decreasing.
SceneArtifact build_sankey(const MergeTree& tree, const std::vector<int>& labels,
                           const std::vector<ThresholdScore>& optimal, bool compact, const SceneMeta& meta = {});

/// Heatmap of D in leaf order (block-averaged to at most `max_cells` per side),
/// dendrogram from the linkage, and a cluster strip from `major`.
SceneArtifact build_heatmap_dendrogram(const DistanceMatrix& d, const Linkage& linkage, const Ordering& ordering,
                                       const ClusterAssignment& major, const SceneMeta& meta = {},
                                       std::size_t max_cells = 256);

SceneArtifact build_blob(const Projection& projection, const std::vector<int>& labels,
                         const ClusterAssignment& assignment, const SceneMeta& meta = {});

/// Exact integer conservation across every stage and interior node.
bool sankey_conserves(const nlohmann::json& payload);

/// Every point lies in its component's hull within `slack`.
bool blob_contained(const nlohmann::json& payload, double slack = 1e-9);

}  // namespace actopo
