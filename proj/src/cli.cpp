#include "actopo/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "actopo/analysis.hpp"
#include "actopo/compare.hpp"
#include "actopo/error.hpp"
#include "actopo/geometry.hpp"
#include "actopo/npy.hpp"
#include "actopo/ordering.hpp"
#include "actopo/scenes.hpp"
#include "actopo/sidecar.hpp"
#include "actopo/svg.hpp"
#include "actopo/synth.hpp"

namespace actopo::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Problems with how the tool was invoked (as opposed to with the data).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string input;
    std::string input_b;
    std::string metric = "euclidean";
    std::size_t k = 10;
    double shrinkage = 1e-6;
    std::optional<double> threshold;
    std::string out_dir;
    std::string cache_dir;
    bool force = false;
    bool json_out = false;
    std::uint64_t seed = 0;
    bool plot = false;

    // synth
    std::string spec_file;
    std::string family = "gaussian_blobs";
    std::size_t classes = 3;
    std::size_t per_class = 50;
    std::size_t dim = 2;
    std::string density = "dense";
    std::string separability = "separable";
    bool outliers = false;
    std::string format = "npy";
    std::string noise;
    double noise_strength = 0.0;
};

MetricSpec metric_spec(const Options& o) {
    MetricSpec s;
    s.kind = parse_metric_kind(o.metric);
    s.k_neighbors = o.k;
    s.covariance_shrinkage = o.shrinkage;
    return s;
}

json metric_json(const MetricSpec& s) {
    return {{"kind", to_string(s.kind)}, {"k_neighbors", s.k_neighbors}, {"covariance_shrinkage", s.covariance_shrinkage}};
}

struct Input {
    LabeledPointCloud cloud;
    std::string layer_name;
};

Input load_input(const std::string& path) {
    const fs::path p(path);
    if (p.extension() == ".json") {
        const Manifest m = load_manifest(p);
        return {load_cloud(m), m.layer_name};
    }
    return {load_cloud(p), ""};
}

// Creates the output directory and refuses to clobber files without --force.
// Called with every file a subcommand will write, before any work is done.
fs::path prepare_output(const Options& o, const std::vector<std::string>& names) {
    if (o.out_dir.empty()) {
        throw UsageError("--out is required");
    }
    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    if (!o.force) {
        for (const auto& name : names) {
            if (fs::exists(dir / name)) {
                throw UsageError((dir / name).string() + " exists; pass --force to overwrite");
            }
        }
    }
    return dir;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw RenderError(path.string() + ": cannot open for writing");
    }
    f << content;
}

void write_json(const fs::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

void write_scene(const fs::path& dir, const SceneArtifact& scene) {
    const std::string stem(to_string(scene.kind));
    validate_scene(scene);
    write_json(dir / (stem + ".json"), to_json(scene));
    write_text(dir / (stem + ".svg"), render_svg(scene));
}

std::vector<std::string> scene_files(std::initializer_list<SceneKind> kinds) {
    std::vector<std::string> out;
    for (auto k : kinds) {
        out.push_back(std::string(to_string(k)) + ".json");
        out.push_back(std::string(to_string(k)) + ".svg");
    }
    return out;
}

std::optional<fs::path> cache_of(const Options& o) {
    if (o.cache_dir.empty()) {
        return std::nullopt;
    }
    return fs::path(o.cache_dir);
}

SceneMeta meta_for(const MetricSpec& spec, const Input& in) {
    SceneMeta m;
    m.metric = std::string(to_string(spec.kind));
    m.layer_name = in.layer_name;
    return m;
}

json score_json(const ThresholdScore& s) {
    return {{"epsilon", s.epsilon},
            {"agreement", s.agreement},
            {"mean_purity", s.mean_purity},
            {"n_components", s.n_components}};
}

json persistence_json(const PersistenceResult& r, const MetricSpec& spec, const std::string& source) {
    json bars = json::array();
    for (const auto& p : r.diagram.pairs) {
        bars.push_back({{"birth", p.birth}, {"death", p.death}, {"essential", false}});
    }
    for (double b : r.diagram.essential) {
        bars.push_back({{"birth", b}, {"death", nullptr}, {"essential", true}});
    }
    json events = json::array();
    for (const auto& e : r.tree.events) {
        events.push_back({{"threshold", e.threshold},
                          {"cluster_a", e.cluster_a},
                          {"cluster_b", e.cluster_b},
                          {"new_node", e.new_node},
                          {"new_size", e.new_size},
                          {"point_a", e.point_a},
                          {"point_b", e.point_b}});
    }
    return {{"metric", metric_json(spec)},
            {"n", r.tree.leaf_count},
            {"source", source},
            {"dimension", 0},
            {"essential_cap", r.diagram.essential_cap()},
            {"diagram", bars},
            {"events", events}};
}

json cluster_json(const PipelineResult& r, const LabeledPointCloud& cloud, const MetricSpec& spec,
                  std::optional<double> threshold) {
    json per = json::array();
    for (const auto& s : r.sweep) {
        per.push_back(score_json(s));
    }
    json opt = json::array();
    for (const auto& s : r.optimal.scores) {
        opt.push_back(score_json(s));
    }
    json j = {{"metric", metric_json(spec)},
              {"n", cloud.size()},
              {"per_threshold", per},
              {"optimal", opt},
              {"insufficient_thresholds", r.optimal.insufficient},
              {"purity_measured_at", "ARI-optimal epsilon"}};
    if (!r.optimal.scores.empty()) {
        const auto rep = detect_outliers(r.persistence.tree, best_score(r.optimal));
        j["outliers"] = {{"isolated_points", rep.isolated_points},
                         {"noise_clusters", rep.noise_clusters},
                         {"late_threshold", rep.late_threshold},
                         {"size_floor", rep.size_floor},
                         {"epsilon", rep.epsilon},
                         {"rule", "singleton merge time > Q3 + 1.5 IQR; cluster size < max(2, ceil(0.01 N))"}};
    }
    if (threshold) {
        const auto a = components_at(r.persistence.tree, *threshold);
        const auto reading = read_at(r.persistence.tree, cloud.labels(), *threshold);
        j["at_threshold"] = to_json(reading);
        j["at_threshold"]["component_of"] = a.component_of;
    }
    return j;
}

const ThresholdScore& require_best(const PipelineResult& r) {
    if (r.optimal.scores.empty()) {
        throw InsufficientDataError("no finite merge events: need at least 2 connected points");
    }
    return best_score(r.optimal);
}

ClusterAssignment major_assignment(const PipelineResult& r, std::optional<double> threshold) {
    return components_at(r.persistence.tree, threshold ? *threshold : require_best(r).epsilon);
}

SceneArtifact heatmap_scene(const PipelineResult& r, const Options& o, const SceneMeta& meta) {
    const std::size_t n = r.distances.size();
    Adjacency adj(n);
    std::string rule = "none (N < 2)";
    if (n >= 2) {
        const std::size_t k = std::min(o.k, n - 1);
        adj = knn_adjacency(r.distances, k);
        rule = "union-symmetrized " + std::to_string(k) + "-NN graph";
    }
    const Ordering ordering = rcm_order(adj, rule);
    const Linkage linkage = linkage_from_tree(r.persistence.tree, ordering);
    const ClusterAssignment major =
        r.optimal.scores.empty() ? final_components(r.persistence.tree) : major_assignment(r, o.threshold);
    return build_heatmap_dendrogram(r.distances, linkage, ordering, major, meta);
}

SceneArtifact blob_scene(const PipelineResult& r, const LabeledPointCloud& cloud, const Options& o,
                         const SceneMeta& meta) {
    return build_blob(pca_project(cloud), cloud.labels(), major_assignment(r, o.threshold), meta);
}

// --- subcommands ---------------------------------------------------------------------

json cmd_distances(const Options& o) {
    const auto dir = prepare_output(o, {"distances.dist", "distances.json"});
    const auto in = load_input(o.input);
    const auto spec = metric_spec(o);
    const auto cache = cache_of(o);
    const DistanceMatrix d = cache ? sidecar::load_or_compute(in.cloud, spec, *cache) : pairwise_distances(in.cloud, spec);
    sidecar::write(d, dir / "distances.dist");
    json summary = {{"metric", metric_json(spec)},
                    {"n", d.size()},
                    {"max_finite", d.max_finite()},
                    {"has_infinite", d.has_infinite()},
                    {"cache_key", sidecar::cache_key(in.cloud, spec)},
                    {"file", "distances.dist"}};
    write_json(dir / "distances.json", summary);
    return summary;
}

json cmd_persist(const Options& o) {
    std::vector<std::string> files{"persistence.json"};
    if (o.plot) {
        for (auto& f : scene_files({SceneKind::diagram, SceneKind::barcode})) {
            files.push_back(f);
        }
    }
    const auto dir = prepare_output(o, files);
    const auto in = load_input(o.input);
    const auto spec = metric_spec(o);
    const auto cache = cache_of(o);
    const DistanceMatrix d = cache ? sidecar::load_or_compute(in.cloud, spec, *cache) : pairwise_distances(in.cloud, spec);
    const auto result = h0_persistence(d);
    const json j = persistence_json(result, spec, in.cloud.source());
    write_json(dir / "persistence.json", j);
    if (o.plot) {
        const auto plots = build_persistence_plots(result.diagram, meta_for(spec, in));
        write_scene(dir, plots.diagram);
        write_scene(dir, plots.barcode);
    }
    return {{"n", result.tree.leaf_count},
            {"finite_pairs", result.diagram.pairs.size()},
            {"essential", result.diagram.essential.size()},
            {"file", "persistence.json"}};
}

json cmd_cluster(const Options& o) {
    const auto dir = prepare_output(o, {"cluster.json"});
    const auto in = load_input(o.input);
    const auto spec = metric_spec(o);
    const auto r = run_pipeline(in.cloud, spec, cache_of(o));
    const json j = cluster_json(r, in.cloud, spec, o.threshold);
    write_json(dir / "cluster.json", j);
    return {{"optimal", j.at("optimal")}, {"file", "cluster.json"}};
}

json cmd_sankey(const Options& o) {
    const auto dir = prepare_output(o, scene_files({SceneKind::sankey, SceneKind::sankey_compact}));
    const auto in = load_input(o.input);
    const auto spec = metric_spec(o);
    const auto r = run_pipeline(in.cloud, spec, cache_of(o));
    require_best(r);
    const auto meta = meta_for(spec, in);
    write_scene(dir, build_sankey(r.persistence.tree, in.cloud.labels(), r.optimal.scores, false, meta));
    write_scene(dir, build_sankey(r.persistence.tree, in.cloud.labels(), r.optimal.scores, true, meta));
    return {{"files", scene_files({SceneKind::sankey, SceneKind::sankey_compact})}};
}

json cmd_blob(const Options& o) {
    const auto dir = prepare_output(o, scene_files({SceneKind::blob}));
    const auto in = load_input(o.input);
    const auto spec = metric_spec(o);
    const auto r = run_pipeline(in.cloud, spec, cache_of(o));
    write_scene(dir, blob_scene(r, in.cloud, o, meta_for(spec, in)));
    return {{"files", scene_files({SceneKind::blob})}};
}

json cmd_heatmap(const Options& o) {
    const auto dir = prepare_output(o, scene_files({SceneKind::heatmap_dendrogram}));
    const auto in = load_input(o.input);
    const auto spec = metric_spec(o);
    const auto r = run_pipeline(in.cloud, spec, cache_of(o));
    write_scene(dir, heatmap_scene(r, o, meta_for(spec, in)));
    return {{"files", scene_files({SceneKind::heatmap_dendrogram})}};
}

SynthSpec synth_spec(const Options& o) {
    if (!o.spec_file.empty()) {
        std::ifstream f(o.spec_file);
        if (!f) {
            throw IngestError(o.spec_file + ": cannot open file");
        }
        json j;
        try {
            j = json::parse(f);
        } catch (const json::exception& e) {
            throw IngestError(o.spec_file + ": " + e.what());
        }
        return synth_spec_from_json(j);
    }
    return synth_spec_from_json({{"family", o.family},
                                 {"n_classes", o.classes},
                                 {"n_per_class", o.per_class},
                                 {"dim", o.dim},
                                 {"density", o.density},
                                 {"separability", o.separability},
                                 {"outliers", o.outliers},
                                 {"seed", o.seed}});
}

json cmd_synth(const Options& o) {
    if (o.format != "npy" && o.format != "csv") {
        throw UsageError("--format must be npy or csv");
    }
    const bool npy_out = o.format == "npy";
    std::vector<std::string> files{"manifest.json", "synth.json"};
    if (npy_out) {
        files.insert(files.end(), {"points.npy", "labels.npy"});
    } else {
        files.push_back("cloud.csv");
    }
    const auto dir = prepare_output(o, files);
    const SynthSpec spec = synth_spec(o);
    LabeledPointCloud cloud = generate(spec);
    json record = {{"spec", to_json(spec)}, {"n", cloud.size()}, {"dim", cloud.dim()}};
    Manifest m;
    m.layer_name = "synthetic";
    m.model_name = "synth";
    if (!o.noise.empty()) {
        NoiseSpec ns{parse_noise_kind(o.noise), o.noise_strength, o.seed};
        auto noisy = add_noise(cloud, ns);
        record["noise"] = noisy.provenance;
        record["noise"]["max_abs_shift"] = noisy.max_abs_shift;
        m.transform = noisy.provenance.dump();
        cloud = std::move(noisy.cloud);
    }
    if (npy_out) {
        npy::write_matrix(cloud.points(), dir / "points.npy");
        std::vector<std::int64_t> labels(cloud.labels().begin(), cloud.labels().end());
        npy::write_int_vector(labels, dir / "labels.npy");
        m.points_file = "points.npy";
        m.labels_file = "labels.npy";
    } else {
        save_csv(cloud, dir / "cloud.csv");
        m.points_file = "cloud.csv";
        m.labels_file = "cloud.csv";
    }
    save_manifest(m, dir / "manifest.json");
    write_json(dir / "synth.json", record);
    record["manifest"] = "manifest.json";
    return record;
}

json cmd_compare(const Options& o) {
    const auto dir = prepare_output(o, {"compare.json"});
    const auto a = load_input(o.input);
    const auto b = load_input(o.input_b);
    const auto rep = compare(a.cloud, b.cloud, metric_spec(o), cache_of(o));
    const json j = to_json(rep);
    write_json(dir / "compare.json", j);
    return j;
}

json cmd_report(const Options& o) {
    const std::initializer_list<SceneKind> kinds = {SceneKind::diagram, SceneKind::barcode,
                                                    SceneKind::heatmap_dendrogram, SceneKind::sankey,
                                                    SceneKind::sankey_compact, SceneKind::blob};
    auto files = scene_files(kinds);
    files.insert(files.end(), {"persistence.json", "cluster.json", "index.json"});
    const auto dir = prepare_output(o, files);
    const auto in = load_input(o.input);
    const auto spec = metric_spec(o);
    const auto r = run_pipeline(in.cloud, spec, cache_of(o));
    require_best(r);
    const auto meta = meta_for(spec, in);

    const auto plots = build_persistence_plots(r.persistence.diagram, meta);
    std::vector<SceneArtifact> scenes;
    scenes.push_back(plots.diagram);
    scenes.push_back(plots.barcode);
    scenes.push_back(heatmap_scene(r, o, meta));
    scenes.push_back(build_sankey(r.persistence.tree, in.cloud.labels(), r.optimal.scores, false, meta));
    scenes.push_back(build_sankey(r.persistence.tree, in.cloud.labels(), r.optimal.scores, true, meta));
    scenes.push_back(blob_scene(r, in.cloud, o, meta));
    json artifacts = json::array();
    for (const auto& s : scenes) {
        write_scene(dir, s);
        const std::string stem(to_string(s.kind));
        artifacts.push_back({{"kind", stem}, {"scene", stem + ".json"}, {"svg", stem + ".svg"}});
    }
    write_json(dir / "persistence.json", persistence_json(r.persistence, spec, in.cloud.source()));
    const json cluster = cluster_json(r, in.cloud, spec, o.threshold);
    write_json(dir / "cluster.json", cluster);

    const json index = {{"input", o.input},
                        {"layer_name", in.layer_name},
                        {"metric", metric_json(spec)},
                        {"n", in.cloud.size()},
                        {"dim", in.cloud.dim()},
                        {"artifacts", artifacts},
                        {"reports", {{"persistence", "persistence.json"}, {"cluster", "cluster.json"}}},
                        {"optimal", cluster.at("optimal")}};
    write_json(dir / "index.json", index);
    return index;
}

void add_metric_flags(CLI::App* sub, Options& o) {
    sub->add_option("--metric", o.metric, "euclidean, cosine, mahalanobis, geodesic, dn_euclidean, dn_cosine, dn_mahalanobis")
        ->capture_default_str();
    sub->add_option("--k", o.k, "neighbor count for geodesic and density-normalized metrics")->capture_default_str();
    sub->add_option("--shrinkage", o.shrinkage, "covariance shrinkage for Mahalanobis metrics")->capture_default_str();
    sub->add_option("--cache-dir", o.cache_dir, "distance-matrix cache directory");
}

void add_common_flags(CLI::App* sub, Options& o) {
    sub->add_option("--out", o.out_dir, "output directory")->required();
    sub->add_flag("--force", o.force, "overwrite existing output files");
    sub->add_flag("--json", o.json_out, "print a JSON summary on standard output");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"H0 persistent-homology toolkit for labeled point clouds", "actopo"};
    app.require_subcommand(1);
    Options o;

    std::map<std::string, json (*)(const Options&)> handlers;
    auto input_cmd = [&](const char* name, const char* help, json (*fn)(const Options&)) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("input", o.input, "manifest (.json) or CSV file")->required();
        add_metric_flags(sub, o);
        add_common_flags(sub, o);
        handlers[name] = fn;
        return sub;
    };
    input_cmd("distances", "compute and store a distance matrix", cmd_distances);
    input_cmd("persist", "H0 persistence pairs and merge events", cmd_persist)
        ->add_flag("--plot", o.plot, "also write diagram and barcode scenes");
    input_cmd("cluster", "threshold sweep, optimal thresholds and outliers", cmd_cluster)
        ->add_option("--threshold", o.threshold, "also report the partition at this epsilon");
    input_cmd("sankey", "five-stage Sankey scenes (full and compact)", cmd_sankey);
    input_cmd("blob", "PCA blob-graph scene", cmd_blob)
        ->add_option("--threshold", o.threshold, "hull epsilon (default: best optimal)");
    input_cmd("heatmap", "RCM-ordered heatmap with dendrogram", cmd_heatmap)
        ->add_option("--threshold", o.threshold, "cluster-strip epsilon (default: best optimal)");
    auto* report = input_cmd("report", "full pipeline: six scenes, reports and index.json", cmd_report);
    report->add_option("--threshold", o.threshold, "blob/heatmap epsilon (default: best optimal)");

    auto* cmp = input_cmd("compare", "before/after comparison of two clouds", cmd_compare);
    cmp->add_option("input_b", o.input_b, "second manifest or CSV")->required();

    CLI::App* syn = app.add_subcommand("synth", "generate a synthetic labeled cloud");
    add_common_flags(syn, o);
    syn->add_option("--spec", o.spec_file, "SynthSpec JSON (overrides the generator flags)");
    syn->add_option("--family", o.family, "gaussian_blobs or swiss_roll")->capture_default_str();
    syn->add_option("--classes", o.classes)->capture_default_str();
    syn->add_option("--per-class", o.per_class)->capture_default_str();
    syn->add_option("--dim", o.dim)->capture_default_str();
    syn->add_option("--density", o.density, "dense or sparse")->capture_default_str();
    syn->add_option("--separability", o.separability, "separable or non_separable")->capture_default_str();
    syn->add_flag("--outliers", o.outliers, "add ceil(2% N) far points");
    syn->add_option("--seed", o.seed)->capture_default_str();
    syn->add_option("--format", o.format, "npy or csv")->capture_default_str();
    syn->add_option("--noise", o.noise, "gaussian, salt_pepper, speckle, poisson or uniform");
    syn->add_option("--noise-strength", o.noise_strength)->capture_default_str();
    handlers["synth"] = cmd_synth;

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("actopo");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) {
        argv.push_back(s.data());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, err, err);
        return code == 0 ? 0 : 1;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const json summary = handlers.at(name)(o);
        if (o.json_out) {
            out << summary.dump() << '\n';
        }
        err << "actopo " << name << ": wrote " << o.out_dir << '\n';
        return 0;
    } catch (const UsageError& e) {
        err << "actopo " << name << ": " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        err << "actopo " << name << ": " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "actopo " << name << ": " << e.what() << '\n';
        return 2;
    }
}

}  // namespace actopo::cli
