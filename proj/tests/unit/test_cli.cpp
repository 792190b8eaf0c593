#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <sstream>

#include <json.hpp>

#include "actopo/cli.hpp"
#include "actopo/pointcloud.hpp"
#include "actopo/scenes.hpp"
#include "scratch.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = actopo::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string str(const fs::path& p) {
    return p.string();
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("synth then report lists the six scenes") {
        Scratch dir("cli");
        REQUIRE(run({"synth", "--seed", "3", "--out", str(dir / "data")}).code == 0);
        CHECK(fs::exists(dir / "data" / "points.npy"));
        const auto cloud = actopo::load_cloud(dir / "data" / "manifest.json");
        CHECK(cloud.size() == 150);

        const auto r = run({"report", str(dir / "data" / "manifest.json"), "--out", str(dir / "rep"), "--json"});
        REQUIRE(r.code == 0);
        const auto index = json::parse(slurp(dir / "rep" / "index.json"));
        CHECK(json::parse(r.out) == index);
        std::vector<std::string> kinds;
        for (const auto& a : index["artifacts"]) {
            kinds.push_back(a["kind"]);
            CHECK(fs::exists(dir / "rep" / a["svg"].get<std::string>()));
            const auto scene = actopo::scene_from_json(json::parse(slurp(dir / "rep" / a["scene"].get<std::string>())));
            CHECK_NOTHROW(actopo::validate_scene(scene));
        }
        CHECK(kinds == std::vector<std::string>{"diagram", "barcode", "heatmap_dendrogram", "sankey", "sankey_compact",
                                                "blob"});
        const auto persistence = json::parse(slurp(dir / "rep" / "persistence.json"));
        CHECK(persistence["n"] == 150);
        CHECK(persistence["diagram"].size() == 150);
    }

    TEST_CASE("report twice gives byte-identical files") {
        Scratch dir("cli2");
        REQUIRE(run({"synth", "--seed", "5", "--per-class", "30", "--out", str(dir / "d")}).code == 0);
        const std::string input = str(dir / "d" / "manifest.json");
        REQUIRE(run({"report", input, "--metric", "geodesic", "--k", "6", "--out", str(dir / "a")}).code == 0);
        REQUIRE(run({"report", input, "--metric", "geodesic", "--k", "6", "--out", str(dir / "b")}).code == 0);
        std::size_t files = 0;
        for (const auto& e : fs::directory_iterator(dir / "a")) {
            const auto name = e.path().filename();
            CHECK(slurp(e.path()) == slurp(dir / "b" / name));
            ++files;
        }
        CHECK(files == 15);
    }

    TEST_CASE("error contract") {
        Scratch dir("cli3");
        const auto missing = run({"persist", str(dir / "nope.json"), "--out", str(dir / "o")});
        CHECK(missing.code == 2);
        CHECK(missing.err.find("nope.json") != std::string::npos);
        CHECK(run({"persist", "x.csv", "--bogus", "--out", str(dir / "o")}).code == 1);
        CHECK(run({"frobnicate"}).code == 1);
        CHECK(run({"persist", "x.csv"}).code == 1);
        CHECK(run({"--help"}).code == 0);

        REQUIRE(run({"synth", "--format", "csv", "--out", str(dir / "d")}).code == 0);
        CHECK(run({"synth", "--format", "csv", "--out", str(dir / "d")}).code == 1);
        CHECK(run({"synth", "--format", "csv", "--out", str(dir / "d"), "--force"}).code == 0);
        CHECK(run({"distances", str(dir / "d" / "cloud.csv"), "--metric", "taxicab", "--out", str(dir / "m")}).code ==
              2);
    }

    TEST_CASE("single commands write their files") {
        Scratch dir("cli4");
        REQUIRE(run({"synth", "--seed", "2", "--per-class", "20", "--out", str(dir / "d")}).code == 0);
        const std::string in = str(dir / "d" / "manifest.json");
        CHECK(run({"distances", in, "--out", str(dir / "o1")}).code == 0);
        CHECK(fs::exists(dir / "o1" / "distances.dist"));
        CHECK(run({"persist", in, "--plot", "--out", str(dir / "o2")}).code == 0);
        CHECK(fs::exists(dir / "o2" / "barcode.svg"));
        CHECK(run({"cluster", in, "--threshold", "0.5", "--out", str(dir / "o3")}).code == 0);
        const auto cluster = json::parse(slurp(dir / "o3" / "cluster.json"));
        CHECK(cluster.contains("at_threshold"));
        CHECK(cluster["optimal"].size() == 2);
        CHECK(run({"sankey", in, "--out", str(dir / "o4")}).code == 0);
        CHECK(run({"blob", in, "--out", str(dir / "o5")}).code == 0);
        CHECK(run({"heatmap", in, "--out", str(dir / "o6")}).code == 0);

        REQUIRE(run({"synth", "--seed", "2", "--per-class", "20", "--noise", "speckle", "--noise-strength", "0.5",
                     "--out", str(dir / "n")})
                    .code == 0);
        CHECK(run({"compare", in, str(dir / "n" / "manifest.json"), "--out", str(dir / "o7")}).code == 0);
        const auto cmp = json::parse(slurp(dir / "o7" / "compare.json"));
        CHECK(cmp.contains("at_shared_epsilon"));
        CHECK(cmp["bottleneck"]["distance"].get<double>() > 0.0);
    }

    TEST_CASE("the installed binary follows the same exit codes") {
        Scratch dir("cli5");
        const std::string bin = ACTOPO_CLI_PATH;
        const std::string quiet = " >/dev/null 2>&1";
        auto status = [&](const std::string& args) {
            const int s = std::system((bin + " " + args + quiet).c_str());
            return WEXITSTATUS(s);
        };
        CHECK(status("synth --seed 1 --out " + str(dir / "d")) == 0);
        CHECK(status("persist " + str(dir / "missing.csv") + " --out " + str(dir / "o")) == 2);
        CHECK(status("persist --what") == 1);
    }
}
