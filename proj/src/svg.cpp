#include "actopo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "actopo/color_ramp.hpp"
#include "actopo/error.hpp"
#include "actopo/palette.hpp"
#include "actopo/text.hpp"

namespace actopo {

using nlohmann::json;

namespace {

constexpr double kWidth = 1000.0;
constexpr double kHeight = 700.0;

std::string num(double v) {
    return text::fixed(v, 2);
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// Maps [lo, hi] onto [a, b]; a zero-width domain maps to the midpoint.
struct Scale {
    double lo, hi, a, b;
    double operator()(double v) const {
        return hi > lo ? a + (v - lo) / (hi - lo) * (b - a) : (a + b) / 2.0;
    }
};

class Svg {
  public:
    Svg() {
        out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 1000 700\" "
                "width=\"1000\" height=\"700\">\n";
        out_ += "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"700\" fill=\"#FFFFFF\"/>\n";
    }
    void raw(const std::string& s) { out_ += s; }
    void line(double x1, double y1, double x2, double y2, std::string_view stroke, const char* cls = nullptr) {
        out_ += "<line";
        if (cls != nullptr) {
            out_ += " class=\"" + std::string(cls) + "\"";
        }
        out_ += " x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
                "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"1\"/>\n";
    }
    void rect(double x, double y, double w, double h, std::string_view fill, const char* cls = nullptr,
              const char* extra = nullptr) {
        out_ += "<rect";
        if (cls != nullptr) {
            out_ += " class=\"" + std::string(cls) + "\"";
        }
        out_ += " x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
                "\" fill=\"" + std::string(fill) + "\"";
        if (extra != nullptr) {
            out_ += " ";
            out_ += extra;
        }
        out_ += "/>\n";
    }
    void circle(double cx, double cy, double r, std::string_view fill, const char* cls) {
        out_ += "<circle class=\"" + std::string(cls) + "\" cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" +
                num(r) + "\" fill=\"" + std::string(fill) + "\"/>\n";
    }
    void label(double x, double y, std::string_view s, const char* anchor = "middle", int size = 14) {
        out_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
                std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
    }
    std::string finish() {
        out_ += "</svg>\n";
        return std::move(out_);
    }

  private:
    std::string out_;
};

std::string palette_color(const SceneArtifact& s, const std::string& key) {
    return s.palette.contains(key) ? s.palette.at(key).get<std::string>() : std::string(viz::kNoiseColor);
}

std::string class_color(const SceneArtifact& s, std::size_t id) {
    return palette_color(s, std::to_string(id));
}

void title(Svg& svg, const SceneArtifact& s, std::string_view what) {
    std::string t(what);
    if (!s.meta.metric.empty()) {
        t += " | metric " + s.meta.metric;
    }
    if (!s.meta.layer_name.empty()) {
        t += " | layer " + s.meta.layer_name;
    }
    svg.label(kWidth / 2.0, 30.0, t, "middle", 18);
}

void axes(Svg& svg, double x0, double y0, double x1, double y1, const std::string& xl, const std::string& yl,
          double max_value) {
    svg.line(x0, y1, x1, y1, "#000000", "axis");
    svg.line(x0, y0, x0, y1, "#000000", "axis");
    svg.label((x0 + x1) / 2.0, y1 + 40.0, xl);
    svg.label(x0 - 45.0, (y0 + y1) / 2.0, yl);
    svg.label(x0, y1 + 18.0, "0", "middle", 12);
    svg.label(x1, y1 + 18.0, text::fixed(max_value, 3), "middle", 12);
    svg.label(x0 - 8.0, y0 + 4.0, text::fixed(max_value, 3), "end", 12);
}

std::string render_diagram(const SceneArtifact& s) {
    Svg svg;
    title(svg, s, "H0 persistence diagram");
    const double cap = s.payload.at("cap").get<double>();
    const double x0 = 120.0, x1 = 880.0, y0 = 70.0, y1 = 620.0;
    const Scale sx{0.0, cap, x0, x1};
    const Scale sy{0.0, cap, y1, y0};
    axes(svg, x0, y0, x1, y1, "birth", "death", cap);
    svg.line(sx(0.0), sy(0.0), sx(cap), sy(cap), "#888888", "diagonal");
    svg.line(x0, sy(cap), x1, sy(cap), "#BBBBBB", "cap");
    const auto color = palette_color(s, "0");
    for (const auto& p : s.payload.at("points")) {
        svg.circle(sx(p[0].get<double>()), sy(p[1].get<double>()), 4.0, color, "pair");
    }
    for (const auto& b : s.payload.at("essential")) {
        const double x = sx(b.get<double>());
        const double y = sy(cap);
        svg.raw("<path class=\"essential\" d=\"M " + num(x) + " " + num(y - 7.0) + " L " + num(x + 6.0) + " " +
                num(y + 4.0) + " L " + num(x - 6.0) + " " + num(y + 4.0) + " Z\" fill=\"" + color + "\"/>\n");
    }
    return svg.finish();
}

std::string render_barcode(const SceneArtifact& s) {
    Svg svg;
    title(svg, s, "H0 barcode");
    const double cap = s.payload.at("cap").get<double>();
    const double x0 = 120.0, x1 = 880.0, y0 = 70.0, y1 = 620.0;
    const Scale sx{0.0, cap, x0, x1};
    axes(svg, x0, y0, x1, y1, "scale", "bars", cap);
    const json& bars = s.payload.at("bars");
    const double slot = bars.empty() ? 0.0 : (y1 - y0) / static_cast<double>(bars.size());
    const double h = std::max(slot * 0.7, 0.2);
    const auto color = palette_color(s, "0");
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double b = bars[i].at("birth").get<double>();
        const double d = bars[i].at("death").get<double>();
        const bool essential = bars[i].at("essential").get<bool>();
        svg.rect(sx(b), y0 + static_cast<double>(i) * slot, sx(d) - sx(b), h, essential ? "#000000" : color,
                 essential ? "bar essential" : "bar");
    }
    return svg.finish();
}

std::string ramp_color(const json& v, double vmax) {
    if (v.is_null()) {
        return std::string(viz::kUnreachableColor);
    }
    const double t = vmax > 0.0 ? std::clamp(v.get<double>() / vmax, 0.0, 1.0) : 0.0;
    const auto idx = static_cast<std::size_t>(std::lround(t * 255.0));
    return std::string(viz::kDistanceRamp[idx]);
}

std::string render_heatmap(const SceneArtifact& s) {
    Svg svg;
    title(svg, s, "Distance heatmap with single-linkage dendrogram");
    const json& p = s.payload;
    const auto n = p.at("n").get<std::size_t>();
    const auto g = p.at("grid").get<std::size_t>();
    const double vmax = p.at("value_max").get<double>();
    const auto edges = p.at("bin_edges").get<std::vector<std::size_t>>();

    const double x0 = 270.0, side = 420.0, y_heat = 230.0, y_strip = 215.0, y_dendro_top = 55.0;
    const double unit = n == 0 ? 0.0 : side / static_cast<double>(n);

    // Heatmap cells; bins cover leaf ranges [edges[b], edges[b+1]).
    for (std::size_t r = 0; r < g; ++r) {
        for (std::size_t c = 0; c < g; ++c) {
            const double x = x0 + static_cast<double>(edges[c]) * unit;
            const double y = y_heat + static_cast<double>(edges[r]) * unit;
            const double w = static_cast<double>(edges[c + 1] - edges[c]) * unit;
            const double h = static_cast<double>(edges[r + 1] - edges[r]) * unit;
            svg.rect(x, y, w, h, ramp_color(p.at("values")[r][c], vmax), nullptr, "shape-rendering=\"crispEdges\"");
        }
    }
    // Cluster strip.
    const json& clusters = p.at("clusters");
    const auto leaf_components = clusters.at("leaf_components").get<std::vector<std::size_t>>();
    for (std::size_t i = 0; i < leaf_components.size(); ++i) {
        svg.rect(x0 + static_cast<double>(i) * unit, y_strip, unit, 10.0,
                 palette_color(s, std::to_string(leaf_components[i])), "cluster-strip",
                 "shape-rendering=\"crispEdges\"");
    }
    // Dendrogram.
    const json& rows = p.at("dendrogram").at("rows");
    const auto order = p.at("leaf_order").get<std::vector<std::size_t>>();
    std::vector<double> x_of(n + rows.size(), 0.0);
    std::vector<double> h_of(n + rows.size(), 0.0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        x_of[order[pos]] = x0 + (static_cast<double>(pos) + 0.5) * unit;
    }
    double hmax = 0.0;
    for (const auto& r : rows) {
        hmax = std::max(hmax, r[2].get<double>());
    }
    const Scale sy{0.0, hmax > 0.0 ? hmax : 1.0, y_strip - 5.0, y_dendro_top};
    std::string d;
    for (std::size_t e = 0; e < rows.size(); ++e) {
        const auto a = rows[e][0].get<std::size_t>();
        const auto b = rows[e][1].get<std::size_t>();
        const double h = rows[e][2].get<double>();
        x_of[n + e] = (x_of[a] + x_of[b]) / 2.0;
        h_of[n + e] = h;
        d += "M " + num(x_of[a]) + " " + num(sy(h_of[a])) + " V " + num(sy(h)) + " H " + num(x_of[b]) + " V " +
             num(sy(h_of[b])) + " ";
    }
    if (!d.empty()) {
        d.pop_back();
        svg.raw("<path class=\"dendrogram\" d=\"" + d + "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"0.8\"/>\n");
    }
    // Color bar.
    const double bar_x = 760.0;
    for (std::size_t i = 0; i < 256; ++i) {
        svg.rect(bar_x, y_heat + side - (static_cast<double>(i) + 1.0) * side / 256.0, 20.0, side / 256.0 + 0.05,
                 viz::kDistanceRamp[i], nullptr, "shape-rendering=\"crispEdges\"");
    }
    svg.label(bar_x + 28.0, y_heat + side, "0", "start", 12);
    svg.label(bar_x + 28.0, y_heat + 10.0, text::fixed(vmax, 3), "start", 12);
    svg.rect(bar_x, y_heat + side + 15.0, 20.0, 10.0, viz::kUnreachableColor);
    svg.label(bar_x + 28.0, y_heat + side + 25.0, "unreachable", "start", 12);
    svg.label(x0 + side / 2.0, y_heat + side + 28.0,
              "epsilon = " + text::fixed(clusters.at("epsilon").get<double>(), 4));
    return svg.finish();
}

std::string render_sankey(const SceneArtifact& s) {
    Svg svg;
    title(svg, s, s.kind == SceneKind::sankey_compact ? "Compact five-stage Sankey" : "Five-stage Sankey");
    const json& p = s.payload;
    const auto n = p.at("n").get<double>();
    const json& stages = p.at("stages");
    const double top = 80.0, bottom = 640.0, node_w = 18.0;
    const double left = 90.0, right = 910.0 - node_w;

    struct NodeBox {
        double x, y, h;
    };
    std::vector<std::vector<NodeBox>> boxes(stages.size());
    double unit = 0.0;
    {
        std::size_t max_nodes = 1;
        for (const auto& st : stages) {
            max_nodes = std::max<std::size_t>(max_nodes, st.at("nodes").size());
        }
        // Gaps shrink with node count so every stage fits.
        const double gap = std::min(8.0, 200.0 / static_cast<double>(max_nodes));
        unit = (bottom - top - gap * static_cast<double>(max_nodes - 1)) / n;
        for (std::size_t st = 0; st < stages.size(); ++st) {
            const double x = left + (right - left) * static_cast<double>(st) / static_cast<double>(stages.size() - 1);
            double y = top;
            for (const auto& node : stages[st].at("nodes")) {
                const double h = node.at("size").get<double>() * unit;
                boxes[st].push_back({x, y, h});
                y += h + gap;
            }
        }
    }
    // Ribbons first so the nodes sit on top.
    std::vector<std::vector<double>> out_off(stages.size()), in_off(stages.size());
    for (std::size_t st = 0; st < stages.size(); ++st) {
        out_off[st].assign(boxes[st].size(), 0.0);
        in_off[st].assign(boxes[st].size(), 0.0);
    }
    for (const auto& f : p.at("flows")) {
        const auto st = f.at("stage").get<std::size_t>();
        const auto a = f.at("source").get<std::size_t>();
        const auto b = f.at("target").get<std::size_t>();
        const double w = f.at("weight").get<double>() * unit;
        const NodeBox& src = boxes[st][a];
        const NodeBox& dst = boxes[st + 1][b];
        const double xs = src.x + node_w;
        const double xd = dst.x;
        const double xm = (xs + xd) / 2.0;
        const double ys0 = src.y + out_off[st][a];
        const double yd0 = dst.y + in_off[st + 1][b];
        out_off[st][a] += w;
        in_off[st + 1][b] += w;
        const auto& node = stages[st].at("nodes")[a];
        const std::string color =
            node.at("noise").get<bool>() ? palette_color(s, "noise")
                                         : class_color(s, node.at("modal_class").get<std::size_t>());
        svg.raw("<path class=\"flow\" d=\"M " + num(xs) + " " + num(ys0) + " C " + num(xm) + " " + num(ys0) + " " +
                num(xm) + " " + num(yd0) + " " + num(xd) + " " + num(yd0) + " L " + num(xd) + " " + num(yd0 + w) +
                " C " + num(xm) + " " + num(yd0 + w) + " " + num(xm) + " " + num(ys0 + w) + " " + num(xs) + " " +
                num(ys0 + w) + " Z\" fill=\"" + color + "\" fill-opacity=\"0.4\"/>\n");
    }
    for (std::size_t st = 0; st < stages.size(); ++st) {
        const auto& nodes = stages[st].at("nodes");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const bool noise = nodes[i].at("noise").get<bool>();
            svg.rect(boxes[st][i].x, boxes[st][i].y, node_w, boxes[st][i].h,
                     noise ? palette_color(s, "noise") : class_color(s, nodes[i].at("modal_class").get<std::size_t>()),
                     noise ? "node noise" : "node");
        }
        std::string caption = stages[st].at("name").get<std::string>();
        if (!stages[st].at("threshold").is_null()) {
            caption += " (" + text::fixed(stages[st].at("threshold").get<double>(), 3) + ")";
        }
        svg.label(boxes[st].empty() ? 0.0 : boxes[st][0].x + node_w / 2.0, 670.0, caption, "middle", 12);
    }
    return svg.finish();
}

std::string render_blob(const SceneArtifact& s) {
    Svg svg;
    title(svg, s, "Blob graph (PCA projection)");
    const json& p = s.payload;
    const json& coords = p.at("coords");
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const double x = coords[i][0].get<double>();
        const double y = coords[i][1].get<double>();
        if (i == 0) {
            xmin = xmax = x;
            ymin = ymax = y;
        }
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    // One scale for both axes keeps hull shapes undistorted.
    const double box_w = 800.0, box_h = 560.0;
    const double span = std::max({xmax - xmin, (ymax - ymin) * box_w / box_h, 1e-12});
    const double k = box_w / span;
    const double cx = (xmin + xmax) / 2.0, cy = (ymin + ymax) / 2.0;
    auto sx = [&](double x) { return 500.0 + (x - cx) * k; };
    auto sy = [&](double y) { return 370.0 - (y - cy) * k; };

    constexpr double r = 6.0;
    for (const auto& h : p.at("hulls")) {
        const auto& v = h.at("vertices");
        const std::string color = class_color(s, h.at("modal_class").get<std::size_t>());
        std::string d;
        if (v.size() == 1) {
            const double x = sx(v[0][0].get<double>()), y = sy(v[0][1].get<double>());
            d = "M " + num(x - r) + " " + num(y) + " A " + num(r) + " " + num(r) + " 0 1 0 " + num(x + r) + " " +
                num(y) + " A " + num(r) + " " + num(r) + " 0 1 0 " + num(x - r) + " " + num(y) + " Z";
        } else if (v.size() == 2) {
            const double ax = sx(v[0][0].get<double>()), ay = sy(v[0][1].get<double>());
            const double bx = sx(v[1][0].get<double>()), by = sy(v[1][1].get<double>());
            const double len = std::max(std::hypot(bx - ax, by - ay), 1e-12);
            const double nx = -(by - ay) / len * r, ny = (bx - ax) / len * r;
            const std::string arc = " A " + num(r) + " " + num(r) + " 0 0 1 ";
            d = "M " + num(ax + nx) + " " + num(ay + ny) + " L " + num(bx + nx) + " " + num(by + ny) + arc +
                num(bx - nx) + " " + num(by - ny) + " L " + num(ax - nx) + " " + num(ay - ny) + arc + num(ax + nx) +
                " " + num(ay + ny) + " Z";
        } else {
            for (std::size_t i = 0; i < v.size(); ++i) {
                d += (i == 0 ? "M " : " L ") + num(sx(v[i][0].get<double>())) + " " + num(sy(v[i][1].get<double>()));
            }
            d += " Z";
        }
        svg.raw("<path class=\"hull\" d=\"" + d + "\" fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"" + color +
                "\" stroke-width=\"1.5\"/>\n");
    }
    const json& classes = p.at("point_classes");
    for (std::size_t i = 0; i < coords.size(); ++i) {
        svg.circle(sx(coords[i][0].get<double>()), sy(coords[i][1].get<double>()), 3.0,
                   class_color(s, classes[i].get<std::size_t>()), "point");
    }
    const json& ex = p.at("explained");
    svg.label(500.0, 685.0,
              "PC1 " + text::fixed(100.0 * ex[0].get<double>(), 1) + "% | PC2 " +
                  text::fixed(100.0 * ex[1].get<double>(), 1) + "% | epsilon = " +
                  text::fixed(p.at("epsilon").get<double>(), 4),
              "middle", 12);
    return svg.finish();
}

}  // namespace

std::string render_svg(const SceneArtifact& scene) {
    validate_scene(scene);
    switch (scene.kind) {
    case SceneKind::diagram: return render_diagram(scene);
    case SceneKind::barcode: return render_barcode(scene);
    case SceneKind::heatmap_dendrogram: return render_heatmap(scene);
    case SceneKind::sankey:
    case SceneKind::sankey_compact: return render_sankey(scene);
    case SceneKind::blob: return render_blob(scene);
    }
    throw RenderError("unknown scene kind");
}

}  // namespace actopo
