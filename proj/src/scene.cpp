#include "vrf/scene.hpp"

#include "vrf/components.hpp"
#include "vrf/dynamics.hpp"
#include "vrf/error.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vrf {

namespace {

using nlohmann::json;

const json& member(const json& j, std::string_view key, std::string_view where) {
    const auto it = j.find(key);
    if (it == j.end()) throw SceneError(std::string(where) + ": missing '" + std::string(key) + "'");
    return *it;
}

template <class T> T read(const json& j, std::string_view key, std::string_view where) {
    try {
        return member(j, key, where).get<T>();
    } catch (const json::exception&) {
        throw SceneError(std::string(where) + ": '" + std::string(key) + "' has the wrong type");
    }
}

template <class T> T read_or(const json& j, std::string_view key, T fallback, std::string_view where) {
    return j.contains(key) ? read<T>(j, key, where) : fallback;
}

/// "id.port" for information endpoints, a bare id otherwise.
std::pair<std::string, std::string> endpoint(const std::string& text, LinkKind kind, std::string_view where) {
    if (kind != LinkKind::Information) return {text, {}};
    const auto dot = text.find('.');
    if (dot == std::string::npos) throw SceneError(std::string(where) + ": expected 'component.port', got '" + text + "'");
    return {text.substr(0, dot), text.substr(dot + 1)};
}

std::string endpoint_text(const std::string& id, const std::string& port) { return port.empty() ? id : id + "." + port; }

bool contained_path(const std::string& p) {
    const std::filesystem::path path(p);
    if (p.empty() || path.is_absolute() || path.has_root_name()) return false;
    return std::none_of(path.begin(), path.end(), [](const auto& part) { return part == ".."; });
}

}  // namespace

SceneFile parse_scene(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SceneError(std::string("scene file is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw SceneError("scene file must be a JSON object");
    const auto version = read<int>(root, "version", "scene");
    if (version != 1) throw SceneError("unsupported scene version " + std::to_string(version));

    SceneFile scene;
    for (const auto& c : member(root, "components", "scene")) {
        ComponentSpec spec{read<std::string>(c, "id", "component"), read<std::string>(c, "kind", "component"),
                           c.contains("parameters") ? c.at("parameters") : json::object()};
        if (!spec.parameters.is_object()) throw SceneError("component '" + spec.id + "': parameters must be an object");
        scene.graph.add(std::move(spec));
    }
    if (root.contains("links"))
        for (const auto& l : root.at("links")) {
            const LinkKind kind = parse_link_kind(read<std::string>(l, "kind", "link"));
            auto [source, source_port] = endpoint(read<std::string>(l, "source", "link"), kind, "link source");
            auto [target, target_port] = endpoint(read<std::string>(l, "target", "link"), kind, "link target");
            scene.graph.connect({kind, std::move(source), std::move(source_port), std::move(target), std::move(target_port)});
        }
    if (root.contains("simulation")) {
        const json& s = root.at("simulation");
        scene.simulation = {read_or(s, "t0", 0.0, "simulation"), read_or(s, "t1", 1.0, "simulation"),
                            read_or(s, "dt", 0.01, "simulation")};
    }
    if (root.contains("outputs")) {
        const json& o = root.at("outputs");
        if (o.contains("trajectories"))
            for (const auto& t : o.at("trajectories"))
                scene.trajectories.push_back({read<std::string>(t, "component", "trajectory sink"),
                                              read<std::string>(t, "path", "trajectory sink")});
        if (o.contains("frames"))
            for (const auto& f : o.at("frames"))
                scene.frames.push_back({read<std::string>(f, "camera", "frame sink"), read_or(f, "stride", 1, "frame sink"),
                                        read_or<std::string>(f, "dir", "", "frame sink")});
    }
    return scene;
}

SceneFile load_scene(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read scene file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scene(text.str());
}

std::string dump_scene(const SceneFile& scene) {
    json root = json::object();
    root["version"] = 1;
    json components = json::array();
    for (const auto& [id, spec] : scene.graph.components)
        components.push_back({{"id", id}, {"kind", spec.kind}, {"parameters", spec.parameters}});
    root["components"] = std::move(components);
    json links = json::array();
    for (const auto& l : scene.graph.links)
        links.push_back({{"kind", std::string(to_string(l.kind))},
                         {"source", endpoint_text(l.source, l.source_port)},
                         {"target", endpoint_text(l.target, l.target_port)}});
    root["links"] = std::move(links);
    root["simulation"] = {{"t0", scene.simulation.t0}, {"t1", scene.simulation.t1}, {"dt", scene.simulation.dt}};
    json trajectories = json::array();
    for (const auto& t : scene.trajectories) trajectories.push_back({{"component", t.component}, {"path", t.path}});
    json frames = json::array();
    for (const auto& f : scene.frames) {
        json sink = {{"camera", f.camera}, {"stride", f.stride}};
        if (!f.dir.empty()) sink["dir"] = f.dir;
        frames.push_back(std::move(sink));
    }
    root["outputs"] = {{"trajectories", std::move(trajectories)}, {"frames", std::move(frames)}};
    return root.dump(2) + "\n";
}

std::vector<Diagnostic> check_scene(const SceneFile& scene) {
    std::vector<Diagnostic> out = validate(scene.graph);
    auto error = [&](std::string subject, std::string message) {
        out.push_back({Severity::Error, std::move(subject), std::move(message)});
    };
    const Simulation& s = scene.simulation;
    if (!(s.dt > 0)) error("simulation", "dt must be positive");
    if (!(s.t0 < s.t1)) error("simulation", "t0 must be less than t1");
    for (std::size_t k = 0; k < scene.trajectories.size(); ++k) {
        const auto& sink = scene.trajectories[k];
        const std::string subject = "trajectory#" + std::to_string(k);
        if (!scene.graph.components.contains(sink.component)) error(subject, "unknown component '" + sink.component + "'");
        if (!contained_path(sink.path)) error(subject, "path '" + sink.path + "' must stay inside the output directory");
    }
    for (std::size_t k = 0; k < scene.frames.size(); ++k) {
        const auto& sink = scene.frames[k];
        const std::string subject = "frames#" + std::to_string(k);
        const auto it = scene.graph.components.find(sink.camera);
        if (it == scene.graph.components.end() || it->second.kind != "camera")
            error(subject, "unknown camera '" + sink.camera + "'");
        if (sink.stride < 1) error(subject, "stride must be at least 1");
        if (!sink.dir.empty() && !contained_path(sink.dir))
            error(subject, "dir '" + sink.dir + "' must stay inside the output directory");
    }
    return out;
}

Image render_view(const Runtime& runtime, std::string_view camera) {
    const auto& components = runtime.graph().components;
    const auto spec = components.find(std::string(camera));
    if (spec == components.end() || spec->second.kind != "camera")
        throw SceneError("unknown camera '" + std::string(camera) + "'");
    const auto& cam = dynamic_cast<const CameraComponent&>(runtime.component(camera));

    RenderList list;
    for (const auto& l : runtime.graph().links) {
        if (l.kind != LinkKind::Visibility) continue;
        std::string other;
        if (l.source == camera) other = l.target;
        else if (l.target == camera) other = l.source;
        else continue;
        const Component& c = runtime.component(other);
        if (const auto* shape = dynamic_cast<const ShapeComponent*>(&c)) {
            Drawable d{shape->mesh(), other, shape->color()};
            for (const Link* in : runtime.links_into(other)) {
                if (in->target_port != "field") continue;
                const Component& source = runtime.component(in->source);
                if (const auto* field = dynamic_cast<const FieldComponent*>(&source)) {
                    d.mesh.scalar = sample_field(field->spec(), d.mesh, other, runtime.forest(), field->time(), field->env());
                    d.lo = field->spec().lo;
                    d.hi = field->spec().hi;
                } else {
                    const auto& fn = runtime.outputs(in->source).at(in->source_port).as<formula::FunctionRef>();
                    std::vector<double> values;
                    values.reserve(d.mesh.vertices.size());
                    for (const Vec3& v : d.mesh.vertices) {
                        const Vec3 w = runtime.forest().transform_point(other, FrameForest::kZero, v);
                        values.push_back(fn.at(std::span<const double>(w.data(), 3)));
                    }
                    d.mesh.scalar = std::move(values);
                }
            }
            list.meshes.push_back(std::move(d));
        } else if (const auto* stars = dynamic_cast<const StarSourceComponent*>(&c)) {
            for (const auto& s : stars->visuals()) list.sprites.push_back({s.direction, s.color, s.radius_px});
        }
    }
    return render(cam.camera(), runtime.forest(), list);
}

namespace {

void require_valid(const SceneFile& scene) {
    const auto diagnostics = check_scene(scene);
    std::string msg;
    for (const auto& d : diagnostics)
        if (d.severity == Severity::Error) msg += (msg.empty() ? "" : "\n") + to_string(d);
    if (!msg.empty()) throw SceneError(msg);
}

/// Rows of one component's trajectory sink, grown after every step.
class Recorder {
  public:
    Recorder(const Runtime& rt, std::string component) : rt_(rt), id_(std::move(component)) {}

    void capture() {
        const Component& c = rt_.component(id_);
        if (auto segment = c.last_segment()) {
            if (traj_.names.empty()) traj_.names = segment->names;
            for (std::size_t k = 0; k < segment->size(); ++k)
                traj_.push(segment->times[k], segment->rows[k], segment->jump[k]);
            return;
        }
        const Values& published = rt_.outputs(id_);
        if (traj_.names.empty()) traj_.names = c.columns(published);
        traj_.push(rt_.time(), flatten(c.outputs(), published));
    }

    const Trajectory& trajectory() const noexcept { return traj_; }

  private:
    const Runtime& rt_;
    std::string id_;
    Trajectory traj_;
};

std::ofstream open_output(const std::filesystem::path& path) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

Runtime simulate_to(const SceneFile& scene, const std::filesystem::path& base_dir, double t) {
    require_valid(scene);
    const Simulation& s = scene.simulation;
    if (t < s.t0) throw SceneError("time " + formula::format_real(t) + " is before t0");
    Runtime rt(scene.graph, base_dir);
    rt.initialize(s.t0);
    if (t > s.t0) {
        const auto grid = time_grid(s.t0, t, s.dt);
        for (std::size_t k = 1; k < grid.size(); ++k) rt.advance_to(grid[k]);
    }
    return rt;
}

RunSummary run_scene(const SceneFile& scene, const std::filesystem::path& base_dir, const std::filesystem::path& out_dir) {
    require_valid(scene);
    const Simulation& s = scene.simulation;
    const auto grid = time_grid(s.t0, s.t1, s.dt);

    Runtime rt(scene.graph, base_dir);
    std::vector<Recorder> recorders;
    for (const auto& sink : scene.trajectories) recorders.emplace_back(rt, sink.component);
    std::vector<int> frame_counts(scene.frames.size(), 0);

    RunSummary summary;
    summary.components = scene.graph.components.size();
    auto emit = [&](std::size_t step) {
        for (auto& r : recorders) r.capture();
        for (std::size_t k = 0; k < scene.frames.size(); ++k) {
            const FrameSink& sink = scene.frames[k];
            if (step % static_cast<std::size_t>(sink.stride) != 0) continue;
            char name[32];
            std::snprintf(name, sizeof name, "frame_%06d.ppm", ++frame_counts[k]);
            auto out = open_output(out_dir / (sink.dir.empty() ? sink.camera : sink.dir) / name);
            write_ppm(out, render_view(rt, sink.camera));
            ++summary.frames;
        }
    };

    rt.initialize(s.t0);
    emit(0);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        rt.advance_to(grid[k]);
        emit(k);
    }
    summary.steps = grid.size() - 1;

    for (std::size_t k = 0; k < scene.trajectories.size(); ++k) {
        auto out = open_output(out_dir / scene.trajectories[k].path);
        recorders[k].trajectory().write_csv(out);
    }
    return summary;
}

}  // namespace vrf
