#pragma once

#include "vrf/dynamics.hpp"
#include "vrf/formula.hpp"
#include "vrf/frames.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vrf {

/// Kind-specific component parameters, as written in the scene file.
using Params = nlohmann::json;

/// Published or consumed values of one component, by port name.
using Values = std::map<std::string, formula::Value, std::less<>>;

enum class LinkKind { Information, Positioning, Visibility };

std::string_view to_string(LinkKind k);
/// Accepts "information", "positioning" and "visibility".
LinkKind parse_link_kind(std::string_view text);

/// Information links name ports on both ends; the other kinds leave the
/// ports empty. A positioning link runs from parent to child.
struct Link {
    LinkKind kind = LinkKind::Information;
    std::string source;
    std::string source_port;
    std::string target;
    std::string target_port;

    friend bool operator==(const Link&, const Link&) = default;
};

struct ComponentSpec {
    std::string id;
    std::string kind;
    Params parameters = Params::object();

    friend bool operator==(const ComponentSpec&, const ComponentSpec&) = default;
};

struct SceneGraph {
    std::map<std::string, ComponentSpec> components;
    std::vector<Link> links;

    /// Throws SceneError on a duplicate id.
    void add(ComponentSpec spec);
    void connect(Link link) { links.push_back(std::move(link)); }

    friend bool operator==(const SceneGraph&, const SceneGraph&) = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string subject;  ///< component id or `link#k`
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// `ERROR subject: message`.
std::string to_string(const Diagnostic& d);

struct Port {
    std::string name;
    formula::TypeTag type;
    bool optional = false;  ///< may be left unconnected
};

/// A live scene node. Components publish every declared output from
/// initialize and from each step.
class Component {
  public:
    explicit Component(std::string id) : id_(std::move(id)) {}
    virtual ~Component() = default;
    Component(const Component&) = delete;
    Component& operator=(const Component&) = delete;

    const std::string& id() const noexcept { return id_; }
    virtual std::string_view kind() const = 0;

    virtual std::vector<Port> inputs() const { return {}; }
    virtual std::vector<Port> outputs() const { return {}; }

    /// Whether the component owns a frame in the forest.
    virtual bool frame_bearing() const { return false; }
    /// Pose relative to the positioning parent; meaningful when frame_bearing.
    virtual Pose6D local_pose() const { return {}; }

    virtual Values initialize(double t0, const Values& inputs) = 0;
    /// Advances from t to t_next.
    virtual Values step(double t, double t_next, const Values& inputs) = 0;

    /// Trajectory rows produced by the last initialize or step, when the
    /// component records more than its published outputs.
    virtual std::optional<Trajectory> last_segment() const { return std::nullopt; }
    /// Column names for the flattened outputs, in output order.
    virtual std::vector<std::string> columns(const Values& published) const;

  private:
    std::string id_;
};

/// Scalars as-is, vectors and matrices element by element, Booleans as 0
/// or 1; functions are skipped.
formula::Vector flatten(const std::vector<Port>& ports, const Values& values);

/// A host-supplied component kind.
struct ExternalKind {
    std::string name;
    std::vector<Port> inputs;
    std::vector<Port> outputs;
    /// Outputs at t0. When empty, every scalar output starts at zero.
    std::function<Values(const Params&)> initial;
    /// (t, dt, inputs, previous outputs, parameters) to new outputs.
    std::function<Values(double, double, const Values&, const Values&, const Params&)> step;
};

/// Makes `kind` available to scene files. Throws SceneError when the name
/// is a built-in kind or already registered.
void register_external(ExternalKind kind);
bool is_known_kind(std::string_view name);

/// Builds the live component for `spec`; relative file parameters resolve
/// against `base_dir`. Throws on invalid parameters.
std::unique_ptr<Component> make_component(const ComponentSpec& spec, const std::filesystem::path& base_dir = {});

/// Every structural problem of `g`; empty means valid.
std::vector<Diagnostic> validate(const SceneGraph& g);

/// Information providers first, ties by ascending id. Throws SceneError
/// on an information cycle.
std::vector<std::string> topo_order(const SceneGraph& g);

/// Executes a validated scene graph step by step.
class Runtime {
  public:
    /// Throws SceneError listing the diagnostics when `g` is invalid.
    explicit Runtime(SceneGraph g, std::filesystem::path base_dir = {});

    /// Initializes every component at t0 in topological order.
    void initialize(double t0);
    /// Advances every component from time() to t_next. A failing
    /// component aborts the step; the error names it and the time.
    void advance_to(double t_next);
    void step(double dt) { advance_to(time_ + dt); }

    double time() const noexcept { return time_; }
    const SceneGraph& graph() const noexcept { return graph_; }
    const std::vector<std::string>& order() const noexcept { return order_; }
    const FrameForest& forest() const noexcept { return forest_; }

    const Component& component(std::string_view id) const;
    const Values& outputs(std::string_view id) const;

    /// Information links arriving at `id`.
    std::vector<const Link*> links_into(std::string_view id) const;

  private:
    Values gather(const std::string& id) const;
    void publish(const Component& c, Values values);
    void resolve_frames();

    SceneGraph graph_;
    std::vector<std::string> order_;
    std::map<std::string, std::unique_ptr<Component>, std::less<>> components_;
    std::map<std::string, Values, std::less<>> table_;
    FrameForest forest_;
    double time_ = 0;
    bool initialized_ = false;
};

}  // namespace vrf
