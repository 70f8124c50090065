#include "vrf/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

const fs::path kRoot(VRF_SOURCE_DIR);
const std::string kScenes = (kRoot / "scenes").string();
const std::string kStars = (kRoot / "data" / "stars10.csv").string();

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = vrf::run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("vrf_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_scene(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "test.scene";
    std::ofstream(p) << text;
    return p;
}

TEST(CliEval, CrossProduct) {
    const Result r = cli({"eval", "cross([1,0,0],[0,1,0])"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "[0, 0, 1]\n");
}

TEST(CliEval, QuadraticFormWithBindings) {
    const Result r = cli({"eval", "f' * a * f", "f=[1,2]", "a=[[2,0],[0,3]]"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, std::to_string(1 * 1 * 2 + 2 * 2 * 3) + "\n");
}

TEST(CliEval, FormulaErrorsExitTwo) {
    const Result singular = cli({"eval", "inv([[1,2],[2,4]])"});
    EXPECT_EQ(singular.code, 2);
    EXPECT_NE(singular.err.find("singular"), std::string::npos) << singular.err;
    EXPECT_EQ(cli({"eval", "1 +"}).code, 2);
    EXPECT_EQ(cli({"eval", "[1,2] + [1,2,3]"}).code, 2);
    EXPECT_EQ(cli({"eval", "x + 1"}).code, 2);
    EXPECT_EQ(cli({"eval", "x", "x=y"}).code, 2);
}

TEST(CliEval, UsageErrors) {
    EXPECT_EQ(cli({}).code, 1);
    EXPECT_EQ(cli({"frobnicate"}).code, 1);
    EXPECT_EQ(cli({"eval", "x", "novalue"}).code, 1);
    EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(CliRun, DecaySummaryAndCsv) {
    const fs::path out = fresh_dir("decay");
    const Result r = cli({"run", kScenes + "/decay.scene", "--out", out.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "steps=100 components=1 frames=0\n");
    EXPECT_TRUE(fs::exists(out / "decay.csv"));
}

TEST(CliRun, QuietAndOverrides) {
    const fs::path out = fresh_dir("quiet");
    const Result r = cli({"--quiet", "run", kScenes + "/decay.scene", "--t1", "2", "--dt", "0.5", "--out", out.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "");
    const std::string csv = slurp(out / "decay.csv");
    EXPECT_NE(csv.find("\n2,"), std::string::npos) << csv;
}

TEST(CliRun, PipelineElevenFrames) {
    const fs::path out = fresh_dir("pipeline");
    const Result r = cli({"run", kScenes + "/pipeline.scene", "--out", out.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "steps=100 components=6 frames=11\n");
}

TEST(CliRun, NonPositiveStepExitsOne) {
    const Result r = cli({"run", kScenes + "/decay.scene", "--dt", "0", "--out", fresh_dir("dt0").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("dt must be positive"), std::string::npos) << r.err;
}

TEST(CliRun, InvalidSceneListsDiagnostics) {
    const fs::path dir = fresh_dir("cycle");
    const fs::path scene = write_scene(dir, R"({"version": 1,
        "components": [{"id": "A", "kind": "transform", "parameters": {"formulas": {"y": "x"}}},
                       {"id": "B", "kind": "transform", "parameters": {"formulas": {"y": "x"}}}],
        "links": [{"kind": "information", "source": "A.y", "target": "B.x"},
                  {"kind": "information", "source": "B.y", "target": "A.x"}]})");
    const Result r = cli({"run", scene.string(), "--out", (dir / "out").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err, "ERROR A: information cycle A -> B -> A\n");
    EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(CliRun, MissingOrMalformedSceneExitsOne) {
    EXPECT_EQ(cli({"run", kScenes + "/nosuch.scene"}).code, 1);
    const fs::path dir = fresh_dir("malformed");
    EXPECT_EQ(cli({"run", write_scene(dir, "{ not json").string()}).code, 1);
}

TEST(CliRun, NonFiniteStateExitsThree) {
    const fs::path dir = fresh_dir("blowup");
    const fs::path scene = write_scene(dir, R"({"version": 1,
        "components": [{"id": "blow", "kind": "solver",
                        "parameters": {"states": ["x"], "equations": ["x^2"], "initial": [1]}}],
        "simulation": {"t0": 0, "t1": 5, "dt": 0.1}})");
    const Result r = cli({"run", scene.string(), "--out", (dir / "out").string()});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("component 'blow' at t="), std::string::npos) << r.err;
}

TEST(CliRun, RuntimeFormulaFailureExitsTwo) {
    const fs::path dir = fresh_dir("domain");
    const fs::path scene = write_scene(dir, R"json({"version": 1,
        "components": [{"id": "s", "kind": "solver",
                        "parameters": {"states": ["x"], "equations": ["-1"], "initial": [1]}},
                       {"id": "root", "kind": "transform", "parameters": {"formulas": {"y": "inv([[x]])"}}}],
        "links": [{"kind": "information", "source": "s.x", "target": "root.x"}],
        "simulation": {"t0": 0, "t1": 2, "dt": 0.5}})json");
    const Result r = cli({"run", scene.string(), "--out", (dir / "out").string()});
    EXPECT_EQ(r.code, 2) << r.err;
    EXPECT_NE(r.err.find("component 'root' at t=1"), std::string::npos) << r.err;
}

TEST(CliRun, OutputsStayUnderOutDir) {
    const fs::path dir = fresh_dir("escape");
    const fs::path scene = write_scene(dir, R"({"version": 1,
        "components": [{"id": "d", "kind": "solver",
                        "parameters": {"states": ["x"], "equations": ["-x"], "initial": [1]}}],
        "outputs": {"trajectories": [{"component": "d", "path": "../leak.csv"}]}})");
    const Result r = cli({"run", scene.string(), "--out", (dir / "out").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(fs::exists(dir / "leak.csv"));

    const fs::path out = fresh_dir("contained");
    ASSERT_EQ(cli({"--quiet", "run", kScenes + "/pipeline.scene", "--out", out.string()}).code, 0);
    for (const auto& e : fs::recursive_directory_iterator(out)) {
        const auto rel = fs::relative(e.path(), out).string();
        EXPECT_EQ(rel.find(".."), std::string::npos) << rel;
    }
}

TEST(CliRender, TorusMatchesGoldens) {
    const fs::path out = fresh_dir("render");
    for (const std::string cam : {"normal", "warped"}) {
        const fs::path file = out / (cam + ".ppm");
        const Result r = cli({"render", kScenes + "/torus.scene", "--camera", cam, "--time", "0", "--out", file.string()});
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_TRUE(slurp(file) == slurp(kRoot / "tests" / "golden" / ("torus_" + cam + ".ppm"))) << cam;
    }
}

TEST(CliRender, UnknownCameraExitsOne) {
    const fs::path out = fresh_dir("nocam");
    const Result r = cli({"render", kScenes + "/torus.scene", "--camera", "nosuch", "--out", (out / "x.ppm").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(fs::exists(out / "x.ppm"));
    EXPECT_EQ(cli({"render", kScenes + "/torus.scene", "--camera", "ring", "--out", (out / "y.ppm").string()}).code, 1);
}

TEST(CliRender, LaterTimeMovesTheBody) {
    const fs::path out = fresh_dir("render_time");
    ASSERT_EQ(cli({"render", kScenes + "/pipeline.scene", "--camera", "camera", "--time", "0", "--out", (out / "a.ppm").string()}).code, 0);
    ASSERT_EQ(cli({"render", kScenes + "/pipeline.scene", "--camera", "camera", "--time", "2", "--out", (out / "b.ppm").string()}).code, 0);
    EXPECT_NE(slurp(out / "a.ppm"), slurp(out / "b.ppm"));
}

TEST(CliStars, FilterCounts) {
    const Result r = cli({"stars", kStars, "--filter", "v_mag < 3"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "read=10 kept=4 skipped=0\n");
    EXPECT_EQ(cli({"stars", kStars, "--filter", "1 > 0"}).out, "read=10 kept=10 skipped=0\n");
}

TEST(CliStars, WritesSubset) {
    const fs::path out = fresh_dir("stars");
    const Result r = cli({"stars", kStars, "--filter", "v_mag < 3", "--out", (out / "bright.csv").string()});
    EXPECT_EQ(r.code, 0) << r.err;
    std::istringstream csv(slurp(out / "bright.csv"));
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "id,ra,dec,parallax,bt,vt,v_mag,dist_pc,r,g,b");
    int rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    EXPECT_EQ(rows, 4);
}

TEST(CliStars, NonBooleanPredicateExitsTwo) {
    const Result r = cli({"stars", kStars, "--filter", "ra"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("Boolean"), std::string::npos) << r.err;
}

TEST(CliStars, MissingCatalogueExitsOne) { EXPECT_EQ(cli({"stars", kStars + ".missing"}).code, 1); }

}  // namespace
