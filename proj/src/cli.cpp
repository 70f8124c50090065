#include "vrf/cli.hpp"

#include "vrf/error.hpp"
#include "vrf/formula.hpp"
#include "vrf/scene.hpp"
#include "vrf/stars.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>

namespace vrf {

namespace {

namespace fm = formula;

int exit_code(const Error& e) {
    if (e.kind() == ErrorKind::Numeric) return kExitNumeric;
    return e.is_formula_error() ? kExitFormula : kExitScene;
}

struct Options {
    std::string out;
    bool quiet = false;

    std::string expression;
    std::vector<std::string> bindings;

    std::string scene;
    std::optional<double> t0, t1, dt;
    double time = 0;
    std::string camera;

    std::string catalog;
    std::string filter;
    std::string map;
};

fm::Env parse_bindings(const std::vector<std::string>& bindings) {
    fm::Env env;
    for (const auto& b : bindings) {
        const auto eq = b.find('=');
        if (eq == std::string::npos || eq == 0) throw SceneError("binding '" + b + "' is not name=value");
        const std::string name = b.substr(0, eq);
        const fm::Expr literal = fm::parse(b.substr(eq + 1));
        if (!fm::free_variables(literal).empty()) throw TypeError("binding '" + name + "' must be a literal");
        env.set(name, fm::eval(literal, fm::Env{}));
    }
    return env;
}

int cmd_eval(const Options& o, std::ostream& out) {
    const fm::Env env = parse_bindings(o.bindings);
    const fm::Expr e = fm::parse(o.expression);
    fm::infer(e, env.types());
    out << fm::to_string(fm::eval(e, env)) << "\n";
    return kExitOk;
}

SceneFile load_with_overrides(const Options& o) {
    SceneFile scene = load_scene(o.scene);
    if (o.t0) scene.simulation.t0 = *o.t0;
    if (o.t1) scene.simulation.t1 = *o.t1;
    if (o.dt) scene.simulation.dt = *o.dt;
    return scene;
}

/// Prints error diagnostics; true when there were none.
bool report(const SceneFile& scene, std::ostream& err) {
    bool ok = true;
    for (const auto& d : check_scene(scene)) {
        err << to_string(d) << "\n";
        ok = ok && d.severity != Severity::Error;
    }
    return ok;
}

std::filesystem::path scene_dir(const Options& o) { return std::filesystem::path(o.scene).parent_path(); }

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
    const SceneFile scene = load_with_overrides(o);
    if (!report(scene, err)) return kExitScene;
    const RunSummary s = run_scene(scene, scene_dir(o), std::filesystem::path(o.out.empty() ? "." : o.out));
    if (!o.quiet) out << "steps=" << s.steps << " components=" << s.components << " frames=" << s.frames << "\n";
    return kExitOk;
}

int cmd_render(const Options& o, std::ostream& out, std::ostream& err) {
    const SceneFile scene = load_with_overrides(o);
    if (!report(scene, err)) return kExitScene;
    const auto it = scene.graph.components.find(o.camera);
    if (it == scene.graph.components.end() || it->second.kind != "camera") {
        err << "ERROR " << o.camera << ": unknown camera\n";
        return kExitScene;
    }
    const Runtime rt = simulate_to(scene, scene_dir(o), o.time);
    const Image image = render_view(rt, o.camera);
    const std::filesystem::path path(o.out);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot write '" + o.out + "'");
    write_ppm(file, image);
    if (!o.quiet) out << "wrote " << o.out << " " << image.width() << "x" << image.height() << "\n";
    return kExitOk;
}

int cmd_stars(const Options& o, std::ostream& out, std::ostream& err) {
    const ColumnMap map = o.map.empty() ? ColumnMap{} : ColumnMap::parse(o.map);
    const Catalog catalog = load_catalog(o.catalog, map);
    for (const auto& d : catalog.diagnostics)
        if (!o.quiet) err << "WARNING " << o.catalog << ": " << d << "\n";
    const auto kept = o.filter.empty() ? catalog.records : filter(catalog.records, fm::parse(o.filter));
    if (!o.out.empty()) {
        const std::filesystem::path path(o.out);
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream file(path, std::ios::binary);
        if (!file) throw IoError("cannot write '" + o.out + "'");
        write_catalog(file, catalog.header, kept);
    }
    if (!o.quiet)
        out << "read=" << catalog.rows_read << " kept=" << kept.size() << " skipped=" << catalog.diagnostics.size() << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Scene simulation, rendering and star catalogue tool", "vrf"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--out", o.out, "Output directory for run, output file for render and stars");
    app.add_flag("--quiet", o.quiet, "Suppress summary lines");

    auto* eval = app.add_subcommand("eval", "Evaluate a formula");
    eval->add_option("expression", o.expression, "Formula text")->required();
    eval->add_option("bindings", o.bindings, "name=value literals");

    auto* run = app.add_subcommand("run", "Run a scene and write its sinks");
    run->add_option("scene", o.scene, "Scene file")->required();
    run->add_option("--t0", o.t0, "Start time");
    run->add_option("--t1", o.t1, "End time");
    run->add_option("--dt", o.dt, "Step size");

    auto* render = app.add_subcommand("render", "Render one camera view at a time");
    render->add_option("scene", o.scene, "Scene file")->required();
    render->add_option("--time", o.time, "Simulation time of the frame");
    render->add_option("--camera", o.camera, "Camera component id")->required();
    render->add_option("--dt", o.dt, "Step size");

    auto* stars = app.add_subcommand("stars", "Filter a star catalogue");
    stars->add_option("catalog", o.catalog, "Catalogue CSV")->required();
    stars->add_option("--filter", o.filter, "Boolean predicate over ra, dec, parallax, bt, vt, v_mag");
    stars->add_option("--map", o.map, "Column map, e.g. ra=RAdeg,dec=DEdeg,angles=deg");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitScene;
    }

    try {
        if (eval->parsed()) return cmd_eval(o, out);
        if (run->parsed()) return cmd_run(o, out, err);
        if (render->parsed()) {
            if (o.out.empty()) throw SceneError("render needs --out <file.ppm>");
            return cmd_render(o, out, err);
        }
        return cmd_stars(o, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitScene;
    }
}

}  // namespace vrf
