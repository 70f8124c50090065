// Acceptance suite: one PASS or FAIL line per criterion, exit status 0
// only when every criterion passes.

#include "support/fuzz.hpp"
#include "support/random_frames.hpp"
#include "vrf/components.hpp"
#include "vrf/dynamics.hpp"
#include "vrf/error.hpp"
#include "vrf/formula.hpp"
#include "vrf/frames.hpp"
#include "vrf/render.hpp"
#include "vrf/scene.hpp"
#include "vrf/stars.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace vrf;
using namespace vrf::formula;
namespace fs = std::filesystem;

const fs::path kRoot(VRF_SOURCE_DIR);
const fs::path kScenes = kRoot / "scenes";

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("vrf_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return out;
}

// 1. Scalar Kalman filter against the information-form matrix version.
Outcome kalman() {
    const double q = 0.01, r = 0.25;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise;
    double truth = 0;
    std::vector<double> measurements;
    for (int k = 0; k < 50; ++k) {
        truth += std::sqrt(q) * noise(rng);
        measurements.push_back(truth + std::sqrt(r) * noise(rng));
    }

    const Expr predict = parse("p + q");
    const Expr covariance = parse("inv(inv(pm) + h' * inv(r) * h)");
    const Expr gain = parse("pp * h' * inv(r)");
    const Expr update = parse("x + k * (z - h * x)");
    Env env;
    env.set("q", Matrix(1, 1, {q}));
    env.set("r", Matrix(1, 1, {r}));
    env.set("h", Matrix(1, 1, {1.0}));
    Matrix x(1, 1, {0.0}), p(1, 1, {1.0});

    double x_s = 0, p_s = 1, worst = 0;
    for (double z : measurements) {
        const double pm_s = p_s + q;
        const double k_s = pm_s / (pm_s + r);
        x_s = x_s + k_s * (z - x_s);
        p_s = (1 - k_s) * pm_s;

        env.set("p", p);
        const Value pm = eval(predict, env);
        env.set("pm", pm);
        const Value pp = eval(covariance, env);
        env.set("pp", pp);
        env.set("k", eval(gain, env));
        env.set("x", x);
        env.set("z", Matrix(1, 1, {z}));
        x = eval(update, env).as<Matrix>();
        p = pp.as<Matrix>();
        worst = std::max({worst, std::abs(x(0, 0) - x_s), std::abs(p(0, 0) - p_s)});
    }
    return {worst <= 1e-10, "50 steps, max |engine - scalar| = " + fmt("%.3g", worst) + " (tol 1e-10)"};
}

// 2. Fuzzed componentwise broadcasting.
Outcome broadcasting() {
    std::mt19937_64 rng(2026);
    int checked = 0, failures = 0, attempts = 0;
    std::string first;
    while (checked < 10000 && attempts < 40000) {
        ++attempts;
        const Expr e = fixtures::random_componentwise_expr(rng, 4);
        const std::size_t n = 1 + fixtures::pick(rng, 5);
        Vector v(n), w(n);
        for (auto& a : v) a = fixtures::uniform(rng, -3.0, 3.0);
        for (auto& a : w) a = fixtures::uniform(rng, -3.0, 3.0);
        const auto o = fixtures::check_componentwise(e, v, w, fixtures::uniform(rng, -3.0, 3.0));
        if (!o.ok) {
            ++failures;
            if (first.empty()) first = o.detail;
        }
        checked += o.checked;
    }
    return {checked == 10000 && failures == 0,
            std::to_string(checked) + " expressions compared, " + std::to_string(failures) + " failures" +
                (first.empty() ? "" : " (" + first + ")")};
}

// 3. Fourth-order convergence on x' = -x.
Outcome rk4_order() {
    auto error_at = [](double dt) {
        const OdeSystem sys = OdeSystem::from_equations({"x"}, {parse("-x")}, {1.0});
        const Trajectory tr = integrate(sys, 0, 1, dt);
        return std::abs(tr.back()[0] - std::exp(-1.0));
    };
    const double e1 = error_at(0.1), e2 = error_at(0.05), e3 = error_at(0.025), fine = error_at(0.01);
    const double r1 = e1 / e2, r2 = e2 / e3;
    return {r1 >= 14 && r2 >= 14 && fine < 1e-8,
            "ratios " + fmt("%.2f", r1) + ", " + fmt("%.2f", r2) + " (>= 14); error at dt=0.01 " + fmt("%.3g", fine)};
}

// 4. Impulse lands exactly and leaves a double row.
Outcome impulse() {
    const OdeSystem sys = OdeSystem::from_equations({"x"}, {parse("delta(t - 1)")}, {0.0});
    const Trajectory tr = integrate(sys, 0, 2, 0.1);
    std::ostringstream csv;
    tr.write_csv(csv);
    const std::string text = csv.str();
    const bool rows = text.find("\n1,0\n1,1,jump=1\n") != std::string::npos;
    const bool exact = tr.back()[0] == 1.0 && tr.times.back() == 2.0;
    return {rows && exact, std::string("x(2) ") + (exact ? "== 1.0 bitwise" : "!= 1.0") +
                               (rows ? ", double row at t=1 present" : ", double row at t=1 missing")};
}

Vec3 rotate_by(const Quat& q, const Vec3& v) {
    // q v q*, expanded.
    const double w = q.w, x = q.x, y = q.y, z = q.z;
    return {(1 - 2 * (y * y + z * z)) * v[0] + 2 * (x * y - w * z) * v[1] + 2 * (x * z + w * y) * v[2],
            2 * (x * y + w * z) * v[0] + (1 - 2 * (x * x + z * z)) * v[1] + 2 * (y * z - w * x) * v[2],
            2 * (x * z - w * y) * v[0] + 2 * (y * z + w * x) * v[1] + (1 - 2 * (x * x + y * y)) * v[2]};
}

// 5. Torque-free body conserves momentum and energy.
Outcome rigid_body() {
    const Vec3 inertia{1, 2, 3};
    const RigidBody6D body(1.0, Matrix(3, 3, {1, 0, 0, 0, 2, 0, 0, 0, 3}), parse("[0, 0, 0]"), parse("[0, 0, 0]"));
    RigidBodyState s0;
    s0.omega = {0.1, 2, 0.1};
    const Trajectory tr = integrate_body(body, s0, 0, 10, 1e-3);

    auto momentum = [&](const Vector& row) {
        const Quat q{row[6], row[7], row[8], row[9]};
        const Vec3 lb{inertia[0] * row[10], inertia[1] * row[11], inertia[2] * row[12]};
        const Vec3 l = rotate_by(q, lb);
        return std::sqrt(l[0] * l[0] + l[1] * l[1] + l[2] * l[2]);
    };
    auto energy = [&](const Vector& row) {
        return 0.5 * (inertia[0] * row[10] * row[10] + inertia[1] * row[11] * row[11] + inertia[2] * row[12] * row[12]);
    };
    const double l0 = momentum(tr.rows.front()), e0 = energy(tr.rows.front());
    double dl = 0, de = 0, dq = 0;
    for (const auto& row : tr.rows) {
        dl = std::max(dl, std::abs(momentum(row) - l0) / l0);
        de = std::max(de, std::abs(energy(row) - e0) / e0);
        dq = std::max(dq, std::abs(std::sqrt(row[6] * row[6] + row[7] * row[7] + row[8] * row[8] + row[9] * row[9]) - 1));
    }
    return {tr.size() == 10001 && dl < 1e-6 && de < 1e-6 && dq <= 1e-9,
            std::to_string(tr.size() - 1) + " steps, |L| drift " + fmt("%.3g", dl) + ", energy drift " + fmt("%.3g", de) +
                ", max ||q|-1| " + fmt("%.3g", dq)};
}

double pose_gap(const Pose6D& a, const Pose6D& b) {
    double t = 0;
    for (int i = 0; i < 3; ++i) t = std::max(t, std::abs(a.translation[i] - b.translation[i]));
    const Quat& p = a.orientation;
    const Quat& q = b.orientation;
    const double same = std::max({std::abs(p.w - q.w), std::abs(p.x - q.x), std::abs(p.y - q.y), std::abs(p.z - q.z)});
    const double flip = std::max({std::abs(p.w + q.w), std::abs(p.x + q.x), std::abs(p.y + q.y), std::abs(p.z + q.z)});
    return std::max(t, std::min(same, flip));
}

// 6. Frame algebra over random forests.
Outcome frame_algebra() {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
        const FrameForest f = fixtures::random_forest(rng, 10, 6);
        const auto ids = f.ids();
        const auto& a = ids[rng() % ids.size()];
        const auto& b = ids[rng() % ids.size()];
        const auto& c = ids[rng() % ids.size()];
        const Pose6D pa = f.absolute(a), pb = f.absolute(b), pc = f.absolute(c);
        worst = std::max(worst, pose_gap(compose(pa, compose(pb, pc)), compose(compose(pa, pb), pc)));
        Pose6D chain = f.local(a);
        for (std::string id = f.parent(a); !id.empty() && id != FrameForest::kZero; id = f.parent(id)) chain = compose(f.local(id), chain);
        worst = std::max(worst, pose_gap(chain, pa));
        const Vec3 p{u(rng), u(rng), u(rng)};
        const Vec3 back = f.transform_point(b, a, f.transform_point(a, b, p));
        for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(back[i] - p[i]));
    }
    return {worst <= 1e-10, "1000 forests, max deviation " + fmt("%.3g", worst) + " (tol 1e-10)"};
}

// 7. Bundled component-graph scene.
Outcome pipeline_scene() {
    const SceneFile scene = load_scene(kScenes / "pipeline.scene");
    const auto diagnostics = check_scene(scene);
    const fs::path a = fresh_dir("pipeline_a"), b = fresh_dir("pipeline_b");
    const RunSummary sa = run_scene(scene, kScenes, a);
    const RunSummary sb = run_scene(scene, kScenes, b);
    const auto ta = tree(a);
    const bool identical = ta == tree(b);
    return {diagnostics.empty() && sa.steps == 100 && sb.steps == 100 && identical,
            std::to_string(diagnostics.size()) + " diagnostics, " + std::to_string(sa.steps) + " steps, " +
                std::to_string(ta.size()) + " output files, repeated run " + (identical ? "identical" : "differs")};
}

std::string render_bytes(const std::string& scene_name, const std::string& camera) {
    const SceneFile scene = load_scene(kScenes / scene_name);
    const Runtime rt = simulate_to(scene, kScenes, scene.simulation.t0);
    std::ostringstream out;
    write_ppm(out, render_view(rt, camera));
    return out.str();
}

// 8. Deformation goldens.
Outcome goldens() {
    const std::vector<std::tuple<std::string, std::string, std::string>> cases{
        {"plane.scene", "camera", "plane_wave.ppm"},
        {"torus.scene", "normal", "torus_normal.ppm"},
        {"torus.scene", "warped", "torus_warped.ppm"}};
    int matched = 0;
    for (const auto& [scene, camera, golden] : cases) {
        const std::string first = render_bytes(scene, camera);
        const bool ok = first == render_bytes(scene, camera) && first == slurp(kRoot / "tests" / "golden" / golden);
        matched += ok;
    }
    std::istringstream n(render_bytes("torus.scene", "normal")), w(render_bytes("torus.scene", "warped"));
    const Image normal = read_ppm(n), warped = read_ppm(w);
    std::size_t differ = 0;
    for (std::size_t k = 0; k < normal.pixels().size(); ++k) differ += normal.pixels()[k] != warped.pixels()[k];
    const double share = 100.0 * static_cast<double>(differ) / static_cast<double>(normal.pixels().size());
    return {matched == 3 && share >= 1.0,
            std::to_string(matched) + "/3 goldens byte-identical, warped torus differs in " + fmt("%.2f", share) + "% of pixels"};
}

// 9. Field sampling and colormap.
Outcome field_visualization() {
    const SceneFile scene = load_scene(kScenes / "field_torus.scene");
    const Runtime rt = simulate_to(scene, kScenes, scene.simulation.t0);
    const auto& field = dynamic_cast<const FieldComponent&>(rt.component("dipole"));
    const auto& shape = dynamic_cast<const ShapeComponent&>(rt.component("ring"));
    const std::vector<double> sampled =
        sample_field(field.spec(), shape.mesh(), "ring", rt.forest(), field.time(), field.env());

    const Expr value = parse(scene.graph.components.at("dipole").parameters.at("value").get<std::string>());
    std::size_t mismatches = 0;
    for (std::size_t k = 0; k < shape.mesh().vertices.size(); ++k) {
        const Vec3 w = rt.forest().transform_point("ring", FrameForest::kZero, shape.mesh().vertices[k]);
        Env env;
        env.set("x", w[0]);
        env.set("y", w[1]);
        env.set("z", w[2]);
        env.set("t", field.time());
        mismatches += !(sampled.at(k) == eval(value, env).to_real());
    }

    const double lo = field.spec().lo, hi = field.spec().hi;
    const bool ends = colormap(lo, lo, hi) == Rgb{0, 0, 255} && colormap(hi, lo, hi) == Rgb{255, 0, 0} &&
                      colormap(lo - 1, lo, hi) == Rgb{0, 0, 255} && colormap(hi + 1, lo, hi) == Rgb{255, 0, 0};
    bool monotone = true;
    Rgb prev = colormap(lo, lo, hi);
    for (int k = 1; k <= 10000; ++k) {
        const Rgb c = colormap(lo + (hi - lo) * k / 10000.0, lo, hi);
        monotone = monotone && c.r >= prev.r && c.b <= prev.b && c.r + c.g + c.b == 255;
        prev = c;
    }
    return {sampled.size() == shape.mesh().vertices.size() && mismatches == 0 && ends && monotone,
            std::to_string(sampled.size()) + " vertices, " + std::to_string(mismatches) + " mismatches; endpoints " +
                (ends ? "ok" : "wrong") + ", monotone " + (monotone ? "ok" : "broken")};
}

// 10. Star pipeline on the fixture.
Outcome stars() {
    const fs::path path = kRoot / "data" / "stars10.csv";
    const Catalog cat = load_catalog(path, {});
    double worst_norm = 0;
    for (const auto& rec : cat.records) {
        const Vec3 d = to_direction(rec.ra, rec.dec);
        worst_norm = std::max(worst_norm, std::abs(std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) - 1));
    }
    StarRecord near;
    near.parallax = 100;
    near.vt = 5;
    const auto dist = visual(near).distance;
    StarRecord tycho;
    tycho.bt = 1.5;
    tycho.vt = 1.0;
    const StarVisual tv = visual(tycho);
    const double v_expected = 1.0 - 0.090 * (1.5 - 1.0), bv_expected = 0.850 * (1.5 - 1.0);
    const bool photometry = std::abs(tv.v_mag - 0.955) < 1e-12 && std::abs(tv.bv - 0.425) < 1e-12 &&
                            std::abs(tv.v_mag - v_expected) < 1e-12 && std::abs(tv.bv - bv_expected) < 1e-12;

    // Independent scan of the raw text.
    auto count_below = [&](double limit) {
        std::istringstream in(slurp(path));
        std::string line;
        std::getline(in, line);
        int n = 0;
        while (std::getline(in, line)) {
            std::vector<std::string> cells;
            std::istringstream l(line);
            for (std::string c; std::getline(l, c, ',');) cells.push_back(c);
            cells.resize(6);
            const bool has_b = !cells[4].empty(), has_v = !cells[5].empty();
            double v = 0;
            if (has_b && has_v) v = std::stod(cells[5]) - 0.090 * (std::stod(cells[4]) - std::stod(cells[5]));
            else if (has_v) v = std::stod(cells[5]);
            else if (has_b) v = std::stod(cells[4]);
            else continue;
            n += v < limit;
        }
        return n;
    };
    const int scan3 = count_below(3), scan6 = count_below(6);
    const auto kept3 = filter(cat.records, parse("v_mag < 3")).size();
    const auto kept6 = filter(cat.records, parse("v_mag < 6")).size();
    const bool counts = static_cast<int>(kept3) == scan3 && static_cast<int>(kept6) == scan6;
    const bool distance = dist && std::abs(*dist - 10.0) < 1e-12;
    return {cat.records.size() == 10 && worst_norm <= 1e-12 && distance && photometry && counts,
            std::to_string(cat.records.size()) + " rows, max ||d|-1| " + fmt("%.2g", worst_norm) + ", 100 mas -> " +
                (dist ? fmt("%.12g", *dist) : std::string("none")) + " pc, V " + fmt("%.12g", tv.v_mag) + " B-V " +
                fmt("%.12g", tv.bv) + ", filter v<3 " + std::to_string(kept3) + "/" + std::to_string(scan3) +
                " v<6 " + std::to_string(kept6) + "/" + std::to_string(scan6)};
}

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double limit_s;  ///< zero means no runtime bound
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"kalman-oracle", kalman, 1},          {"broadcasting-fuzz", broadcasting, 10},
        {"rk4-order", rk4_order, 0},           {"impulse-exactness", impulse, 0},
        {"rigid-body-conservation", rigid_body, 5}, {"frame-algebra", frame_algebra, 0},
        {"component-graph-scene", pipeline_scene, 0}, {"deformation-goldens", goldens, 0},
        {"field-visualization", field_visualization, 0}, {"stars-pipeline", stars, 0},
    };
    int passed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto& c = criteria[k];
        const auto start = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_s > 0 && secs >= c.limit_s) {
            o.pass = false;
            o.detail += "; over the " + fmt("%g", c.limit_s) + " s budget";
        }
        passed += o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << std::setw(2) << k + 1 << " " << c.name << ": " << o.detail << " ["
                  << fmt("%.3f", secs) << " s]\n";
    }
    std::cout << passed << "/" << criteria.size() << " criteria passed\n";
    return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
