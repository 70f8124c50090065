#pragma once

#include "vrf/dynamics.hpp"
#include "vrf/geometry.hpp"
#include "vrf/graph.hpp"
#include "vrf/render.hpp"
#include "vrf/stars.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vrf {

/// Formula variables a component reads from Information links, with the
/// constant bindings that sit beside them.
class FormulaInputs {
  public:
    /// Declared types come from `parameters["inputs"]` (type text such as
    /// "Vector(3)"); any other free variable of `exprs` outside `bound` is a
    /// Real input. Constants come from `parameters["constants"]`.
    FormulaInputs(const Params& parameters, const std::vector<formula::Expr>& exprs,
                  const std::vector<std::string>& bound);

    const std::vector<Port>& ports() const noexcept { return ports_; }
    /// Constants plus the given input values.
    formula::Env env(const Values& inputs) const;
    /// Types of constants and inputs, plus `bound` as Real.
    formula::TypeMap types(const std::vector<std::string>& bound) const;
    /// Constants plus a zero placeholder of every input's declared type.
    formula::Env placeholder_env() const;

  private:
    std::vector<Port> ports_;
    formula::Env constants_;
};

/// First-order ODE system over its states. With `second_order` each
/// equation gives an acceleration and the states gain `<name>_dot`
/// velocity companions.
class SolverComponent : public Component {
  public:
    SolverComponent(std::string id, const Params& p);
    std::string_view kind() const override { return "solver"; }
    std::vector<Port> inputs() const override { return in_.ports(); }
    std::vector<Port> outputs() const override;
    Values initialize(double t0, const Values& inputs) override;
    Values step(double t, double t_next, const Values& inputs) override;
    std::optional<Trajectory> last_segment() const override { return segment_; }

  private:
    Values publish() const;

    FormulaInputs in_;
    OdeSystem system_;
    formula::Vector state_;
    Trajectory segment_;
};

class RigidBodyComponent : public Component {
  public:
    RigidBodyComponent(std::string id, const Params& p);
    std::string_view kind() const override { return "rigid-body"; }
    std::vector<Port> inputs() const override { return in_.ports(); }
    std::vector<Port> outputs() const override;
    bool frame_bearing() const override { return true; }
    Pose6D local_pose() const override { return {state_.position, state_.orientation}; }
    Values initialize(double t0, const Values& inputs) override;
    Values step(double t, double t_next, const Values& inputs) override;
    std::vector<std::string> columns(const Values& published) const override;

  private:
    RigidBody6D body(const Values& inputs) const;
    Values publish() const;

    FormulaInputs in_;
    double mass_;
    formula::Matrix inertia_;
    formula::Expr force_;
    formula::Expr torque_;
    RigidBodyState initial_;
    RigidBodyState state_;
};

/// Named formulas over inputs and t.
class TransformComponent : public Component {
  public:
    TransformComponent(std::string id, const Params& p);
    std::string_view kind() const override { return "transform"; }
    std::vector<Port> inputs() const override { return in_.ports(); }
    std::vector<Port> outputs() const override;
    Values initialize(double t0, const Values& inputs) override { return evaluate(t0, inputs); }
    Values step(double, double t_next, const Values& inputs) override { return evaluate(t_next, inputs); }

  private:
    Values evaluate(double t, const Values& inputs) const;

    FormulaInputs in_;
    std::vector<std::pair<std::string, formula::Expr>> formulas_;
    std::vector<Port> outputs_;
};

/// Local pose from translation formulas and an optional rotation (axis
/// with angle formula, or quaternion formulas).
class FrameComponent : public Component {
  public:
    FrameComponent(std::string id, const Params& p);
    std::string_view kind() const override { return "frame"; }
    std::vector<Port> inputs() const override { return in_.ports(); }
    bool frame_bearing() const override { return true; }
    Pose6D local_pose() const override { return pose_; }
    Values initialize(double t0, const Values& inputs) override;
    Values step(double t, double t_next, const Values& inputs) override;

  private:
    void update(double t, const Values& inputs);

    FormulaInputs in_;
    std::vector<formula::Expr> position_;
    std::optional<Vec3> axis_;
    std::optional<formula::Expr> angle_;
    std::vector<formula::Expr> quaternion_;
    Pose6D pose_;
};

/// Generated or loaded mesh, optionally deformed every step. An optional
/// `field` input colours it through the colormap.
class ShapeComponent : public Component {
  public:
    ShapeComponent(std::string id, const Params& p, std::filesystem::path base_dir);
    std::string_view kind() const override { return "shape"; }
    std::vector<Port> inputs() const override;
    bool frame_bearing() const override { return true; }
    Values initialize(double t0, const Values& inputs) override;
    Values step(double t, double t_next, const Values& inputs) override;

    const Mesh& mesh() const noexcept { return mesh_; }
    Rgb color() const noexcept { return color_; }

  private:
    void update(double t, const Values& inputs);

    Params mesh_params_;
    std::filesystem::path base_dir_;
    FormulaInputs in_;
    std::optional<std::array<formula::Expr, 3>> deform_;
    Rgb color_{200, 200, 200};
    Mesh base_;
    Mesh mesh_;
};

class CameraComponent : public Component {
  public:
    CameraComponent(std::string id, const Params& p);
    std::string_view kind() const override { return "camera"; }
    bool frame_bearing() const override { return true; }
    Values initialize(double, const Values&) override { return {}; }
    Values step(double, double, const Values&) override { return {}; }

    /// Camera bound to this component's frame.
    const Camera& camera() const noexcept { return camera_; }

  private:
    Camera camera_;
};

/// Field over world x, y, z and t. Publishes `field`, a three-argument
/// function giving the field magnitude at the current time.
class FieldComponent : public Component {
  public:
    FieldComponent(std::string id, const Params& p);
    std::string_view kind() const override { return "field"; }
    std::vector<Port> inputs() const override { return in_.ports(); }
    std::vector<Port> outputs() const override { return {{"field", formula::TypeTag::function(3)}}; }
    Values initialize(double t0, const Values& inputs) override { return update(t0, inputs); }
    Values step(double, double t_next, const Values& inputs) override { return update(t_next, inputs); }

    const FieldSpec& spec() const noexcept { return spec_; }
    /// Constants and current inputs, without x, y, z.
    const formula::Env& env() const noexcept { return env_; }
    double time() const noexcept { return t_; }

  private:
    Values update(double t, const Values& inputs);

    FormulaInputs in_;
    FieldSpec spec_;
    formula::Env env_;
    double t_ = 0;
};

/// Filtered star catalogue, loaded on initialize. Publishes `count`.
class StarSourceComponent : public Component {
  public:
    StarSourceComponent(std::string id, const Params& p, std::filesystem::path base_dir);
    std::string_view kind() const override { return "star-source"; }
    std::vector<Port> outputs() const override { return {{"count", formula::TypeTag::integer()}}; }
    Values initialize(double t0, const Values& inputs) override;
    Values step(double, double, const Values&) override { return publish(); }

    const std::vector<StarVisual>& visuals() const noexcept { return visuals_; }

  private:
    Values publish() const;

    std::filesystem::path path_;
    ColumnMap map_;
    std::optional<formula::Expr> filter_;
    StarConfig config_;
    std::vector<StarVisual> visuals_;
};

class ExternalComponent : public Component {
  public:
    ExternalComponent(std::string id, ExternalKind kind, Params p);
    std::string_view kind() const override { return kind_.name; }
    std::vector<Port> inputs() const override { return kind_.inputs; }
    std::vector<Port> outputs() const override { return kind_.outputs; }
    Values initialize(double t0, const Values& inputs) override;
    Values step(double t, double t_next, const Values& inputs) override;

  private:
    ExternalKind kind_;
    Params params_;
    Values previous_;
};

}  // namespace vrf
