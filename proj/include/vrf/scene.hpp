#pragma once

#include "vrf/graph.hpp"
#include "vrf/render.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace vrf {

struct Simulation {
    double t0 = 0;
    double t1 = 1;
    double dt = 0.01;

    friend bool operator==(const Simulation&, const Simulation&) = default;
};

/// CSV of one component's flattened outputs, relative to the output dir.
struct TrajectorySink {
    std::string component;
    std::string path;

    friend bool operator==(const TrajectorySink&, const TrajectorySink&) = default;
};

/// PPM frames of one camera on every `stride`-th step, written as
/// `<dir>/frame_000001.ppm` onward. An empty dir means the camera id.
struct FrameSink {
    std::string camera;
    int stride = 1;
    std::string dir;

    friend bool operator==(const FrameSink&, const FrameSink&) = default;
};

struct SceneFile {
    SceneGraph graph;
    Simulation simulation;
    std::vector<TrajectorySink> trajectories;
    std::vector<FrameSink> frames;

    friend bool operator==(const SceneFile&, const SceneFile&) = default;
};

/// Throws SceneError on malformed JSON, a schema violation or a version
/// other than 1. Structure is checked separately by check_scene.
SceneFile parse_scene(std::string_view json_text);
/// Throws IoError when the file cannot be read.
SceneFile load_scene(const std::filesystem::path& path);
/// Canonical JSON; parse_scene(dump_scene(s)) == s.
std::string dump_scene(const SceneFile& scene);

/// Graph diagnostics plus sink and simulation problems.
std::vector<Diagnostic> check_scene(const SceneFile& scene);

/// Renders what `camera` sees: shapes joined to it by visibility links,
/// coloured by a linked field when present, and star sources as sprites.
/// Throws SceneError unless `camera` names a camera component.
Image render_view(const Runtime& runtime, std::string_view camera);

struct RunSummary {
    std::size_t steps = 0;
    std::size_t components = 0;
    std::size_t frames = 0;
};

/// Steps the scene over its time grid and writes every sink under
/// `out_dir`. Throws SceneError listing diagnostics when check_scene
/// reports an error; runtime failures propagate.
RunSummary run_scene(const SceneFile& scene, const std::filesystem::path& base_dir,
                     const std::filesystem::path& out_dir);

/// Initializes at simulation.t0 and advances on the grid up to `t`.
Runtime simulate_to(const SceneFile& scene, const std::filesystem::path& base_dir, double t);

}  // namespace vrf
