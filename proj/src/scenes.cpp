#include "actopo/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "actopo/error.hpp"
#include "actopo/palette.hpp"

namespace actopo {

using nlohmann::json;

namespace {

constexpr std::string_view kKindNames[] = {"diagram", "barcode", "heatmap_dendrogram",
                                           "sankey",  "sankey_compact", "blob"};

void add_color(json& palette, std::size_t id) {
    palette[std::to_string(id)] = std::string(viz::category_color(id));
}

json meta_json(const SceneMeta& m) {
    json thresholds = json::array();
    for (double t : m.thresholds) {
        thresholds.push_back(t);
    }
    return {{"metric", m.metric}, {"layer_name", m.layer_name}, {"thresholds", thresholds}, {"notes", m.notes}};
}

// Histogram of `ids` restricted to `members`, returning the most frequent id
// (smallest on ties) and its count.
std::pair<std::size_t, std::size_t> modal(const std::vector<std::size_t>& members, const std::vector<int>& labels) {
    std::map<int, std::size_t> counts;
    for (std::size_t p : members) {
        ++counts[labels[p]];
    }
    std::pair<std::size_t, std::size_t> best{0, 0};
    for (const auto& [cls, count] : counts) {
        if (count > best.second) {
            best = {static_cast<std::size_t>(cls), count};
        }
    }
    return best;
}

[[noreturn]] void schema_error(const SceneArtifact& s, const std::string& what) {
    throw RenderError(std::string(to_string(s.kind)) + " scene: " + what);
}

void require(const SceneArtifact& s, const json& obj, const char* key, json::value_t type) {
    if (!obj.is_object() || !obj.contains(key)) {
        schema_error(s, std::string("missing key '") + key + "'");
    }
    const auto actual = obj.at(key).type();
    const bool numeric_ok = type == json::value_t::number_float &&
                            (actual == json::value_t::number_integer || actual == json::value_t::number_unsigned);
    const bool unsigned_ok = type == json::value_t::number_unsigned && actual == json::value_t::number_integer &&
                             obj.at(key).get<long long>() >= 0;
    if (actual != type && !numeric_ok && !unsigned_ok) {
        schema_error(s, std::string("key '") + key + "' has the wrong type");
    }
}

void require_color(const SceneArtifact& s, const std::string& key) {
    if (!s.palette.contains(key)) {
        schema_error(s, "palette has no entry for id " + key);
    }
}

}  // namespace

std::string_view to_string(SceneKind kind) {
    return kKindNames[static_cast<std::size_t>(kind)];
}

SceneKind parse_scene_kind(std::string_view name) {
    for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
        if (kKindNames[i] == name) {
            return static_cast<SceneKind>(i);
        }
    }
    throw RenderError("unknown scene kind '" + std::string(name) + "'");
}

json to_json(const SceneArtifact& scene) {
    return {{"kind", to_string(scene.kind)},
            {"meta", meta_json(scene.meta)},
            {"palette", scene.palette},
            {"payload", scene.payload}};
}

SceneArtifact scene_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw RenderError("scene JSON has no string 'kind'");
    }
    SceneArtifact s;
    s.kind = parse_scene_kind(j.at("kind").get<std::string>());
    s.payload = j.value("payload", json());
    s.palette = j.value("palette", json::object());
    if (j.contains("meta")) {
        const json& m = j.at("meta");
        s.meta.metric = m.value("metric", "");
        s.meta.layer_name = m.value("layer_name", "");
        s.meta.thresholds = m.value("thresholds", std::vector<double>{});
        s.meta.notes = m.value("notes", std::vector<std::string>{});
    }
    return s;
}

// --- persistence plots --------------------------------------------------------

PersistencePlots build_persistence_plots(const PersistenceDiagram& diagram, const SceneMeta& meta) {
    const double cap = diagram.essential_cap();
    PersistencePlots out;

    json points = json::array();
    for (const auto& p : diagram.pairs) {
        points.push_back({p.birth, p.death});
    }
    json essential = json::array();
    for (double b : diagram.essential) {
        essential.push_back(b);
    }
    out.diagram.kind = SceneKind::diagram;
    out.diagram.payload = {{"dimension", 0}, {"points", points}, {"essential", essential}, {"cap", cap}};
    add_color(out.diagram.palette, 0);
    out.diagram.meta = meta;

    struct Bar {
        double birth;
        double death;
        bool essential;
    };
    std::vector<Bar> bars;
    for (double b : diagram.essential) {
        bars.push_back({b, cap, true});
    }
    for (const auto& p : diagram.pairs) {
        bars.push_back({p.birth, p.death, false});
    }
    // Longest first; essential bars end at the cap so they lead.
    std::stable_sort(bars.begin(), bars.end(), [](const Bar& a, const Bar& b) {
        if (a.essential != b.essential) {
            return a.essential;
        }
        if (a.death != b.death) {
            return a.death > b.death;
        }
        return a.birth < b.birth;
    });
    json bar_json = json::array();
    for (const auto& b : bars) {
        bar_json.push_back({{"birth", b.birth}, {"death", b.death}, {"essential", b.essential}});
    }
    out.barcode.kind = SceneKind::barcode;
    out.barcode.payload = {{"dimension", 0}, {"bars", bar_json}, {"cap", cap}};
    add_color(out.barcode.palette, 0);
    out.barcode.meta = meta;
    return out;
}

// --- sankey -------------------------------------------------------------------

SceneArtifact build_sankey(const MergeTree& tree, const std::vector<int>& labels,
                           const std::vector<ThresholdScore>& optimal, bool compact, const SceneMeta& meta) {
    const std::size_t n = tree.leaf_count;
    if (labels.size() != n) {
        throw ConstructionError("labels length does not match the tree");
    }
    if (tree.events.empty()) {
        throw ConstructionError("Sankey needs at least one merge event (N >= 2 with a finite distance)");
    }
    if (optimal.empty() || optimal.size() > 2) {
        throw ConstructionError("Sankey needs one or two optimal thresholds");
    }
    const double first = tree.events.front().threshold;
    const double opt_lo = optimal.front().epsilon;
    const double opt_hi = optimal.back().epsilon;
    const double last = tree.events.back().threshold;
    if (!(first <= opt_lo && opt_lo <= opt_hi && opt_hi <= last)) {
        throw ConstructionError("Sankey stage thresholds are not monotone");
    }

    std::vector<std::vector<std::size_t>> partitions(5);
    for (std::size_t p = 0; p < n; ++p) {
        partitions[0].push_back(static_cast<std::size_t>(labels[p]));
    }
    partitions[1] = components_at(tree, first).component_of;
    partitions[2] = components_at(tree, opt_lo).component_of;
    partitions[3] = components_at(tree, opt_hi).component_of;
    partitions[4] = final_components(tree).component_of;

    const std::size_t floor = noise_size_floor(n);
    static constexpr const char* kStageNames[] = {"classes", "first_merge", "optimal_low", "optimal_high", "final"};
    const double stage_eps[] = {0.0, first, opt_lo, opt_hi, last};

    SceneArtifact scene;
    scene.kind = compact ? SceneKind::sankey_compact : SceneKind::sankey;
    json stages = json::array();
    // node_of[s][point] -> node index within stage s
    std::vector<std::vector<std::size_t>> node_of(5, std::vector<std::size_t>(n));
    bool any_noise = false;
    for (std::size_t s = 0; s < 5; ++s) {
        std::map<std::size_t, std::vector<std::size_t>> members;
        for (std::size_t p = 0; p < n; ++p) {
            members[partitions[s][p]].push_back(p);
        }
        json nodes = json::array();
        std::vector<std::size_t> noise_members;
        std::size_t collapsed = 0;
        std::map<std::size_t, std::size_t> index_of;
        for (const auto& [id, pts] : members) {
            if (compact && pts.size() < floor) {
                noise_members.insert(noise_members.end(), pts.begin(), pts.end());
                ++collapsed;
                continue;
            }
            const auto [cls, count] = modal(pts, labels);
            index_of[id] = nodes.size();
            nodes.push_back({{"index", nodes.size()},
                             {"id", id},
                             {"size", pts.size()},
                             {"modal_class", cls},
                             {"purity", static_cast<double>(count) / static_cast<double>(pts.size())},
                             {"noise", false}});
            add_color(scene.palette, cls);
        }
        const std::size_t noise_index = nodes.size();
        if (!noise_members.empty()) {
            std::sort(noise_members.begin(), noise_members.end());
            const auto [cls, count] = modal(noise_members, labels);
            nodes.push_back({{"index", noise_index},
                             {"collapsed", collapsed},
                             {"size", noise_members.size()},
                             {"modal_class", cls},
                             {"purity", static_cast<double>(count) / static_cast<double>(noise_members.size())},
                             {"noise", true}});
            any_noise = true;
        }
        for (std::size_t p = 0; p < n; ++p) {
            const auto it = index_of.find(partitions[s][p]);
            node_of[s][p] = it == index_of.end() ? noise_index : it->second;
        }
        json stage = {{"name", kStageNames[s]}, {"nodes", nodes}};
        stage["threshold"] = s == 0 ? json(nullptr) : json(stage_eps[s]);
        stages.push_back(stage);
    }
    if (any_noise) {
        scene.palette["noise"] = std::string(viz::kNoiseColor);
    }

    json flows = json::array();
    for (std::size_t s = 0; s + 1 < 5; ++s) {
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> counts;
        for (std::size_t p = 0; p < n; ++p) {
            ++counts[{node_of[s][p], node_of[s + 1][p]}];
        }
        for (const auto& [key, weight] : counts) {
            flows.push_back({{"stage", s}, {"source", key.first}, {"target", key.second}, {"weight", weight}});
        }
    }
    scene.payload = {{"n", n}, {"stages", stages}, {"flows", flows}, {"noise_floor", compact ? floor : 0}};
    scene.meta = meta;
    scene.meta.thresholds = {first, opt_lo, opt_hi, last};
    if (compact) {
        scene.meta.notes.push_back("clusters smaller than " + std::to_string(floor) +
                                   " points are collapsed into one noise node per stage");
    }
    return scene;
}

bool sankey_conserves(const json& payload) {
    const auto n = payload.at("n").get<std::size_t>();
    const json& stages = payload.at("stages");
    if (stages.size() != 5) {
        return false;
    }
    std::vector<std::vector<std::size_t>> sizes(5);
    for (std::size_t s = 0; s < 5; ++s) {
        std::size_t total = 0;
        for (const auto& node : stages[s].at("nodes")) {
            sizes[s].push_back(node.at("size").get<std::size_t>());
            total += sizes[s].back();
        }
        if (total != n) {
            return false;
        }
    }
    std::vector<std::vector<std::size_t>> out(5), in(5);
    for (std::size_t s = 0; s < 5; ++s) {
        out[s].assign(sizes[s].size(), 0);
        in[s].assign(sizes[s].size(), 0);
    }
    for (const auto& f : payload.at("flows")) {
        const auto s = f.at("stage").get<std::size_t>();
        const auto src = f.at("source").get<std::size_t>();
        const auto dst = f.at("target").get<std::size_t>();
        if (s + 1 >= 5 || src >= sizes[s].size() || dst >= sizes[s + 1].size()) {
            return false;
        }
        const auto w = f.at("weight").get<std::size_t>();
        out[s][src] += w;
        in[s + 1][dst] += w;
    }
    for (std::size_t s = 0; s < 5; ++s) {
        for (std::size_t i = 0; i < sizes[s].size(); ++i) {
            if (s + 1 < 5 && out[s][i] != sizes[s][i]) {
                return false;
            }
            if (s > 0 && in[s][i] != sizes[s][i]) {
                return false;
            }
        }
    }
    return true;
}

// --- heatmap + dendrogram -------------------------------------------------------

SceneArtifact build_heatmap_dendrogram(const DistanceMatrix& d, const Linkage& linkage, const Ordering& ordering,
                                       const ClusterAssignment& major, const SceneMeta& meta,
                                       std::size_t max_cells) {
    const std::size_t n = d.size();
    if (linkage.leaf_order.size() != n || ordering.permutation.size() != n || major.component_of.size() != n) {
        throw ConstructionError("heatmap inputs disagree on N");
    }
    if (max_cells == 0) {
        throw ParameterError("max_cells must be positive");
    }
    const std::size_t g = std::min(n, max_cells);
    std::vector<std::size_t> edges(g + 1);
    for (std::size_t b = 0; b <= g; ++b) {
        edges[b] = b * n / g;
    }
    const auto& order = linkage.leaf_order;
    json values = json::array();
    for (std::size_t br = 0; br < g; ++br) {
        json row = json::array();
        for (std::size_t bc = 0; bc < g; ++bc) {
            double sum = 0.0;
            std::size_t count = 0;
            bool unreachable = false;
            for (std::size_t r = edges[br]; r < edges[br + 1]; ++r) {
                for (std::size_t c = edges[bc]; c < edges[bc + 1]; ++c) {
                    const double v = d(order[r], order[c]);
                    if (std::isfinite(v)) {
                        sum += v;
                        ++count;
                    } else {
                        unreachable = true;
                    }
                }
            }
            // Any unreachable pair marks the whole block so it stays visible.
            row.push_back(unreachable || count == 0 ? json(nullptr) : json(sum / static_cast<double>(count)));
        }
        values.push_back(std::move(row));
    }

    json rows = json::array();
    for (const auto& r : linkage.rows) {
        rows.push_back({r.left, r.right, r.height, r.size});
    }

    SceneArtifact scene;
    scene.kind = SceneKind::heatmap_dendrogram;
    const std::size_t floor = noise_size_floor(n);
    json leaf_components = json::array();
    json major_ids = json::array();
    for (const auto& comp : major.components) {
        if (comp.size() >= floor) {
            major_ids.push_back(comp.id);
            add_color(scene.palette, comp.id);
        }
    }
    if (major_ids.size() < major.components.size()) {
        scene.palette["noise"] = std::string(viz::kNoiseColor);
    }
    for (std::size_t p = 0; p < n; ++p) {
        leaf_components.push_back(major.component_of[order[p]]);
    }

    scene.payload = {
        {"n", n},
        {"grid", g},
        {"bin_edges", edges},
        {"values", values},
        {"value_max", d.max_finite()},
        {"leaf_order", order},
        {"dendrogram", {{"rows", rows}, {"rcm_adjacency_kept", linkage.rcm_adjacency_kept}}},
        {"ordering",
         {{"permutation", ordering.permutation},
          {"bandwidth_before", ordering.bandwidth_before},
          {"bandwidth_after", ordering.bandwidth_after},
          {"adjacency_rule", ordering.adjacency_rule}}},
        {"clusters", {{"epsilon", major.threshold}, {"leaf_components", leaf_components}, {"major", major_ids}}},
    };
    scene.meta = meta;
    scene.meta.thresholds = {major.threshold};
    if (g < n) {
        scene.meta.notes.push_back("heatmap block-averaged from " + std::to_string(n) + " to " + std::to_string(g) +
                                   " cells per side");
    }
    return scene;
}

// --- blob -----------------------------------------------------------------------

SceneArtifact build_blob(const Projection& projection, const std::vector<int>& labels,
                         const ClusterAssignment& assignment, const SceneMeta& meta) {
    const std::size_t n = projection.coords.size();
    if (labels.size() != n || assignment.component_of.size() != n) {
        throw ConstructionError("blob inputs disagree on N");
    }
    SceneArtifact scene;
    scene.kind = SceneKind::blob;
    json coords = json::array();
    for (const auto& c : projection.coords) {
        coords.push_back({c.x, c.y});
    }
    for (int cls : labels) {
        add_color(scene.palette, static_cast<std::size_t>(cls));
    }
    json hulls = json::array();
    for (const auto& comp : assignment.components) {
        std::vector<Point2> pts;
        pts.reserve(comp.size());
        for (std::size_t p : comp.members) {
            pts.push_back(projection.coords[p]);
        }
        const auto hull = convex_hull(std::move(pts));
        json vertices = json::array();
        for (const auto& v : hull) {
            vertices.push_back({v.x, v.y});
        }
        const char* shape = hull.size() == 1 ? "point" : hull.size() == 2 ? "segment" : "polygon";
        hulls.push_back({{"component", comp.id},
                         {"size", comp.size()},
                         {"modal_class", modal(comp.members, labels).first},
                         {"shape", shape},
                         {"vertices", vertices}});
    }
    json classes = json::array();
    for (int cls : labels) {
        classes.push_back(cls);
    }
    scene.payload = {{"coords", coords},
                     {"explained", projection.explained},
                     {"point_classes", classes},
                     {"component_ids", assignment.component_of},
                     {"epsilon", assignment.threshold},
                     {"hulls", hulls}};
    scene.meta = meta;
    scene.meta.thresholds = {assignment.threshold};
    return scene;
}

bool blob_contained(const json& payload, double slack) {
    const json& coords = payload.at("coords");
    const json& ids = payload.at("component_ids");
    std::map<std::size_t, std::vector<Point2>> hulls;
    for (const auto& h : payload.at("hulls")) {
        std::vector<Point2> v;
        for (const auto& xy : h.at("vertices")) {
            v.push_back({xy.at(0).get<double>(), xy.at(1).get<double>()});
        }
        hulls[h.at("component").get<std::size_t>()] = std::move(v);
    }
    if (coords.size() != ids.size()) {
        return false;
    }
    for (std::size_t p = 0; p < coords.size(); ++p) {
        const auto it = hulls.find(ids[p].get<std::size_t>());
        if (it == hulls.end()) {
            return false;
        }
        if (!hull_contains(it->second, {coords[p].at(0).get<double>(), coords[p].at(1).get<double>()}, slack)) {
            return false;
        }
    }
    return true;
}

// --- validation -----------------------------------------------------------------

void validate_scene(const SceneArtifact& s) {
    using vt = json::value_t;
    const json& p = s.payload;
    if (!p.is_object()) {
        schema_error(s, "payload is not an object");
    }
    if (!s.palette.is_object()) {
        schema_error(s, "palette is not an object");
    }
    switch (s.kind) {
    case SceneKind::diagram:
        require(s, p, "points", vt::array);
        require(s, p, "essential", vt::array);
        require(s, p, "cap", vt::number_float);
        for (const auto& pt : p.at("points")) {
            if (!pt.is_array() || pt.size() != 2 || !(pt[1].get<double>() >= pt[0].get<double>())) {
                schema_error(s, "diagram point below the diagonal or malformed");
            }
        }
        require_color(s, "0");
        break;
    case SceneKind::barcode:
        require(s, p, "bars", vt::array);
        require(s, p, "cap", vt::number_float);
        for (const auto& b : p.at("bars")) {
            require(s, b, "birth", vt::number_float);
            require(s, b, "death", vt::number_float);
            require(s, b, "essential", vt::boolean);
            if (b.at("death").get<double>() < b.at("birth").get<double>()) {
                schema_error(s, "bar with death < birth");
            }
        }
        require_color(s, "0");
        break;
    case SceneKind::sankey:
    case SceneKind::sankey_compact:
        require(s, p, "n", vt::number_unsigned);
        require(s, p, "stages", vt::array);
        require(s, p, "flows", vt::array);
        for (const auto& stage : p.at("stages")) {
            require(s, stage, "nodes", vt::array);
            for (const auto& node : stage.at("nodes")) {
                require(s, node, "size", vt::number_unsigned);
                require(s, node, "modal_class", vt::number_unsigned);
                require(s, node, "noise", vt::boolean);
                require_color(s, node.at("noise").get<bool>()
                                     ? std::string("noise")
                                     : std::to_string(node.at("modal_class").get<std::size_t>()));
            }
        }
        if (!sankey_conserves(p)) {
            schema_error(s, "flow conservation violated");
        }
        break;
    case SceneKind::heatmap_dendrogram: {
        require(s, p, "n", vt::number_unsigned);
        require(s, p, "grid", vt::number_unsigned);
        require(s, p, "values", vt::array);
        require(s, p, "value_max", vt::number_float);
        require(s, p, "leaf_order", vt::array);
        require(s, p, "dendrogram", vt::object);
        require(s, p, "clusters", vt::object);
        const auto g = p.at("grid").get<std::size_t>();
        if (p.at("values").size() != g) {
            schema_error(s, "values grid has the wrong row count");
        }
        for (const auto& row : p.at("values")) {
            if (row.size() != g) {
                schema_error(s, "values grid is not square");
            }
        }
        if (p.at("leaf_order").size() != p.at("n").get<std::size_t>()) {
            schema_error(s, "leaf_order length differs from n");
        }
        for (const auto& id : p.at("clusters").at("major")) {
            require_color(s, std::to_string(id.get<std::size_t>()));
        }
        break;
    }
    case SceneKind::blob:
        require(s, p, "coords", vt::array);
        require(s, p, "point_classes", vt::array);
        require(s, p, "component_ids", vt::array);
        require(s, p, "hulls", vt::array);
        for (const auto& c : p.at("point_classes")) {
            require_color(s, std::to_string(c.get<std::size_t>()));
        }
        for (const auto& h : p.at("hulls")) {
            require(s, h, "vertices", vt::array);
            require(s, h, "modal_class", vt::number_unsigned);
            require_color(s, std::to_string(h.at("modal_class").get<std::size_t>()));
        }
        if (!blob_contained(p)) {
            schema_error(s, "a point lies outside its hull");
        }
        break;
    }
}

}  // namespace actopo
