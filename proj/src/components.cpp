#include "vrf/components.hpp"

#include "vrf/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>

namespace vrf {

namespace fm = formula;
using fm::TypeTag;

namespace {

std::string describe(const Params& v) { return v.dump(); }

const Params* find(const Params& p, const char* key) {
    if (!p.is_object()) throw SceneError("parameters must be an object");
    const auto it = p.find(key);
    return it == p.end() ? nullptr : &*it;
}

double number(const Params& p, const char* key, std::optional<double> fallback = std::nullopt) {
    const Params* v = find(p, key);
    if (!v) {
        if (fallback) return *fallback;
        throw SceneError(std::string("missing parameter '") + key + "'");
    }
    if (!v->is_number()) throw SceneError(std::string("parameter '") + key + "' must be a number, got " + describe(*v));
    return v->get<double>();
}

int integer(const Params& p, const char* key, std::optional<int> fallback = std::nullopt) {
    const Params* v = find(p, key);
    if (!v) {
        if (fallback) return *fallback;
        throw SceneError(std::string("missing parameter '") + key + "'");
    }
    if (!v->is_number_integer()) throw SceneError(std::string("parameter '") + key + "' must be an integer");
    return v->get<int>();
}

std::string text(const Params& p, const char* key) {
    const Params* v = find(p, key);
    if (!v || !v->is_string()) throw SceneError(std::string("parameter '") + key + "' must be a string");
    return v->get<std::string>();
}

fm::Expr expression(const Params& v, const std::string& what) {
    if (v.is_string()) return fm::parse(v.get<std::string>());
    if (v.is_number_integer()) return fm::Expr::literal(v.get<std::int64_t>());
    if (v.is_number()) return fm::Expr::literal(v.get<double>());
    throw SceneError(what + " must be a formula string or a number");
}

std::vector<fm::Expr> expressions(const Params& p, const char* key, std::size_t count) {
    const Params* v = find(p, key);
    if (!v || !v->is_array() || (count && v->size() != count))
        throw SceneError(std::string("parameter '") + key + "' must be an array of " +
                         (count ? std::to_string(count) + " " : std::string()) + "formulas");
    std::vector<fm::Expr> out;
    for (const auto& e : *v) out.push_back(expression(e, std::string("parameter '") + key + "'"));
    return out;
}

fm::Value value_of(const Params& v) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const Params& x) { return x.is_number(); }))
        return v.get<fm::Vector>();
    if (v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const Params& x) { return x.is_array(); })) {
        std::vector<fm::Vector> rows;
        for (const auto& r : v) {
            if (!std::all_of(r.begin(), r.end(), [](const Params& x) { return x.is_number(); }) || r.empty())
                throw SceneError("matrix rows must be non-empty number arrays");
            rows.push_back(r.get<fm::Vector>());
        }
        for (const auto& r : rows)
            if (r.size() != rows.front().size()) throw SceneError("matrix rows must have equal length");
        return fm::Matrix::from_rows(rows);
    }
    throw SceneError("cannot use " + describe(v) + " as a value");
}

Vec3 vec3(const Params& p, const char* key, Vec3 fallback) {
    const Params* v = find(p, key);
    if (!v) return fallback;
    if (!v->is_array() || v->size() != 3 || !std::all_of(v->begin(), v->end(), [](const Params& x) { return x.is_number(); }))
        throw SceneError(std::string("parameter '") + key + "' must be three numbers");
    return {(*v)[0].get<double>(), (*v)[1].get<double>(), (*v)[2].get<double>()};
}

void require_scalar(const TypeTag& t, const std::string& what) {
    if (!t.is_scalar() && t.kind != TypeTag::Kind::Unknown)
        throw TypeError(what + " must be Real, got " + fm::to_string(t));
}

fm::Value zero_of(const Port& port) {
    using K = TypeTag::Kind;
    const TypeTag& t = port.type;
    switch (t.kind) {
    case K::Boolean: return false;
    case K::Integer: return std::int64_t{0};
    case K::Real:
    case K::Unknown: return 0.0;
    case K::Vector:
        if (t.rows) return fm::Vector(*t.rows, 0.0);
        break;
    case K::Matrix:
        if (t.rows && t.cols) return fm::Matrix(*t.rows, *t.cols);
        break;
    case K::Function: break;
    }
    throw SceneError("input '" + port.name + "' of type " + fm::to_string(t) + " needs a known shape");
}

void require_finite(std::span<const double> xs, double t) {
    for (double x : xs)
        if (!std::isfinite(x)) throw NumericError("non-finite state at t=" + fm::format_real(t));
}

struct Registry {
    std::mutex mutex;
    std::map<std::string, ExternalKind, std::less<>> kinds;
};

Registry& registry() {
    static Registry r;
    return r;
}

constexpr std::string_view kBuiltinKinds[] = {"solver", "rigid-body", "transform",   "frame",
                                              "shape",  "camera",     "star-source", "field"};

bool is_builtin(std::string_view name) {
    return std::find(std::begin(kBuiltinKinds), std::end(kBuiltinKinds), name) != std::end(kBuiltinKinds);
}

}  // namespace

FormulaInputs::FormulaInputs(const Params& p, const std::vector<fm::Expr>& exprs,
                             const std::vector<std::string>& bound) {
    if (const Params* c = find(p, "constants")) {
        if (!c->is_object()) throw SceneError("parameter 'constants' must be an object");
        for (const auto& [name, v] : c->items()) constants_.set(name, value_of(v));
    }
    std::set<std::string> seen(bound.begin(), bound.end());
    for (const auto& [name, _] : constants_.variables()) seen.insert(name);
    if (const Params* in = find(p, "inputs")) {
        if (!in->is_object()) throw SceneError("parameter 'inputs' must be an object of type names");
        for (const auto& [name, v] : in->items()) {
            if (!v.is_string()) throw SceneError("type of input '" + name + "' must be a string");
            if (!seen.insert(name).second) throw SceneError("input '" + name + "' shadows another binding");
            ports_.push_back({name, fm::parse_type_tag(v.get<std::string>())});
        }
    }
    std::set<std::string> implicit;
    for (const auto& e : exprs)
        for (const auto& v : fm::free_variables(e))
            if (!seen.contains(v)) implicit.insert(v);
    for (const auto& name : implicit) ports_.push_back({name, TypeTag::real()});
}

fm::Env FormulaInputs::env(const Values& inputs) const {
    fm::Env env = constants_;
    for (const auto& port : ports_)
        if (const auto it = inputs.find(port.name); it != inputs.end()) env.set(port.name, it->second);
    return env;
}

fm::TypeMap FormulaInputs::types(const std::vector<std::string>& bound) const {
    fm::TypeMap types = constants_.types();
    for (const auto& port : ports_) types[port.name] = port.type;
    for (const auto& name : bound) types[name] = TypeTag::real();
    return types;
}

fm::Env FormulaInputs::placeholder_env() const {
    fm::Env env = constants_;
    for (const auto& port : ports_) env.set(port.name, zero_of(port));
    return env;
}

// ---- solver

namespace {

struct SolverSetup {
    std::vector<std::string> names;
    std::vector<fm::Expr> equations;
    fm::Vector initial;
};

SolverSetup solver_setup(const Params& p) {
    SolverSetup s;
    const Params* states = find(p, "states");
    if (!states || !states->is_array() || states->empty())
        throw SceneError("solver needs at least one state in 'states'");
    for (const auto& n : *states) {
        if (!n.is_string()) throw SceneError("state names must be strings");
        s.names.push_back(n.get<std::string>());
    }
    s.equations = expressions(p, "equations", s.names.size());
    const Params* init = find(p, "initial");
    const bool second = find(p, "second_order") && find(p, "second_order")->get<bool>();
    const std::size_t n = s.names.size() * (second ? 2 : 1);
    if (!init || !init->is_array() || init->size() != n)
        throw SceneError("solver 'initial' must hold " + std::to_string(n) + " numbers");
    s.initial = init->get<fm::Vector>();
    if (second) {
        std::vector<fm::Expr> first;
        for (const auto& name : s.names) first.push_back(fm::Expr::variable(name + "_dot"));
        const std::size_t count = s.names.size();
        for (std::size_t i = 0; i < count; ++i) s.names.push_back(s.names[i] + "_dot");
        first.insert(first.end(), s.equations.begin(), s.equations.end());
        s.equations = std::move(first);
    }
    return s;
}

std::vector<std::string> with_time(std::vector<std::string> names) {
    names.push_back("t");
    return names;
}

}  // namespace

SolverComponent::SolverComponent(std::string id, const Params& p)
    : Component(std::move(id)), in_(p, solver_setup(p).equations, with_time(solver_setup(p).names)) {
    SolverSetup s = solver_setup(p);
    system_ = OdeSystem::from_equations(std::move(s.names), s.equations, std::move(s.initial), in_.placeholder_env());
    const fm::TypeMap types = in_.types(with_time(system_.names));
    for (std::size_t i = 0; i < system_.names.size(); ++i)
        require_scalar(fm::infer(system_.rhs[i], types), "equation for " + system_.names[i]);
    for (const auto& imp : system_.impulses)
        require_scalar(fm::infer(imp.coefficient, types), "impulse coefficient of " + system_.names[imp.state]);
}

std::vector<Port> SolverComponent::outputs() const {
    std::vector<Port> out;
    for (const auto& n : system_.names) out.push_back({n, TypeTag::real()});
    return out;
}

Values SolverComponent::publish() const {
    Values v;
    for (std::size_t i = 0; i < state_.size(); ++i) v.insert_or_assign(system_.names[i], state_[i]);
    return v;
}

Values SolverComponent::initialize(double t0, const Values& inputs) {
    system_.params = in_.env(inputs);
    state_ = system_.initial;
    segment_ = Trajectory{system_.names, {}, {}, {}};
    segment_.push(t0, state_);
    return publish();
}

Values SolverComponent::step(double t, double t_next, const Values& inputs) {
    system_.params = in_.env(inputs);
    OdeSystem run = system_;
    run.initial = state_;
    const Trajectory full = integrate(run, t, t_next, t_next - t);
    segment_ = Trajectory{system_.names, {}, {}, {}};
    for (std::size_t k = 1; k < full.size(); ++k) segment_.push(full.times[k], full.rows[k], full.jump[k]);
    state_ = full.back();
    // Impulses exactly at t_next fire here; interior ones fired inside integrate.
    if (apply_impulses(system_, std::nextafter(t_next, -std::numeric_limits<double>::infinity()), t_next, state_)) {
        require_finite(state_, t_next);
        segment_.push(t_next, state_, true);
    }
    return publish();
}

// ---- rigid body

RigidBodyComponent::RigidBodyComponent(std::string id, const Params& p)
    : Component(std::move(id)),
      in_(p,
          {expression(find(p, "force") ? *find(p, "force") : Params("[0, 0, 0]"), "force"),
           expression(find(p, "torque") ? *find(p, "torque") : Params("[0, 0, 0]"), "torque")},
          {"t", "position", "velocity", "quaternion", "omega", "mass"}),
      mass_(number(p, "mass")),
      inertia_([&] {
          const Params* v = find(p, "inertia");
          if (!v) throw SceneError("missing parameter 'inertia'");
          const fm::Value m = value_of(*v);
          if (!m.is<fm::Matrix>()) throw SceneError("parameter 'inertia' must be a 3x3 matrix");
          return m.as<fm::Matrix>();
      }()),
      force_(expression(find(p, "force") ? *find(p, "force") : Params("[0, 0, 0]"), "force")),
      torque_(expression(find(p, "torque") ? *find(p, "torque") : Params("[0, 0, 0]"), "torque")) {
    initial_.position = vec3(p, "position", {0, 0, 0});
    initial_.velocity = vec3(p, "velocity", {0, 0, 0});
    initial_.omega = vec3(p, "omega", {0, 0, 0});
    if (const Params* q = find(p, "orientation")) {
        if (!q->is_array() || q->size() != 4) throw SceneError("parameter 'orientation' must be [w, x, y, z]");
        const Quat raw{(*q)[0].get<double>(), (*q)[1].get<double>(), (*q)[2].get<double>(), (*q)[3].get<double>()};
        if (!(raw.norm() > 0)) throw SceneError("parameter 'orientation' must be a nonzero quaternion");
        initial_.orientation = raw.normalized();
    }
    state_ = initial_;
    RigidBody6D(mass_, inertia_, force_, torque_, in_.placeholder_env());
}

RigidBody6D RigidBodyComponent::body(const Values& inputs) const {
    return RigidBody6D(mass_, inertia_, force_, torque_, in_.env(inputs));
}

std::vector<Port> RigidBodyComponent::outputs() const {
    return {{"position", TypeTag::vector(3)},
            {"velocity", TypeTag::vector(3)},
            {"quaternion", TypeTag::vector(4)},
            {"omega", TypeTag::vector(3)}};
}

std::vector<std::string> RigidBodyComponent::columns(const Values&) const { return RigidBody6D::column_names(); }

Values RigidBodyComponent::publish() const {
    const auto& s = state_;
    return {{"position", fm::Vector(s.position.begin(), s.position.end())},
            {"velocity", fm::Vector(s.velocity.begin(), s.velocity.end())},
            {"quaternion", fm::Vector{s.orientation.w, s.orientation.x, s.orientation.y, s.orientation.z}},
            {"omega", fm::Vector(s.omega.begin(), s.omega.end())}};
}

Values RigidBodyComponent::initialize(double, const Values&) {
    state_ = initial_;
    return publish();
}

Values RigidBodyComponent::step(double t, double t_next, const Values& inputs) {
    state_ = body(inputs).step(t, state_, t_next - t);
    require_finite(RigidBody6D::pack(state_), t_next);
    return publish();
}

// ---- transform

TransformComponent::TransformComponent(std::string id, const Params& p)
    : Component(std::move(id)),
      in_(p,
          [&] {
              const Params* f = find(p, "formulas");
              if (!f || !f->is_object() || f->empty()) throw SceneError("transform needs at least one entry in 'formulas'");
              std::vector<fm::Expr> exprs;
              for (const auto& [name, e] : f->items()) exprs.push_back(expression(e, "formula '" + name + "'"));
              return exprs;
          }(),
          {"t"}) {
    const fm::TypeMap types = in_.types({"t"});
    for (const auto& [name, e] : find(p, "formulas")->items()) {
        formulas_.emplace_back(name, expression(e, "formula '" + name + "'"));
        outputs_.push_back({name, fm::infer(formulas_.back().second, types)});
    }
}

std::vector<Port> TransformComponent::outputs() const { return outputs_; }

Values TransformComponent::evaluate(double t, const Values& inputs) const {
    fm::Env env = in_.env(inputs);
    env.set("t", t);
    Values out;
    for (const auto& [name, e] : formulas_) out.insert_or_assign(name, fm::eval(e, env));
    return out;
}

// ---- frame

FrameComponent::FrameComponent(std::string id, const Params& p)
    : Component(std::move(id)),
      in_(p,
          [&] {
              std::vector<fm::Expr> all;
              if (find(p, "position")) all = expressions(p, "position", 3);
              if (const Params* r = find(p, "rotation")) {
                  if (!r->is_object() || !find(*r, "angle")) throw SceneError("rotation needs 'axis' and 'angle'");
                  all.push_back(expression(*find(*r, "angle"), "rotation angle"));
              }
              if (find(p, "quaternion")) {
                  const auto q = expressions(p, "quaternion", 4);
                  all.insert(all.end(), q.begin(), q.end());
              }
              return all;
          }(),
          {"t"}) {
    position_ = find(p, "position") ? expressions(p, "position", 3)
                                    : std::vector<fm::Expr>(3, fm::Expr::literal(0.0));
    if (find(p, "rotation") && find(p, "quaternion")) throw SceneError("give either 'rotation' or 'quaternion'");
    if (const Params* r = find(p, "rotation")) {
        axis_ = vec3(*r, "axis", {0, 0, 1});
        if (!(norm(*axis_) > 0)) throw SceneError("rotation axis must be nonzero");
        angle_ = expression(*find(*r, "angle"), "rotation angle");
    }
    if (find(p, "quaternion")) quaternion_ = expressions(p, "quaternion", 4);
    const fm::TypeMap types = in_.types({"t"});
    for (const auto& e : position_) require_scalar(fm::infer(e, types), "frame position");
    if (angle_) require_scalar(fm::infer(*angle_, types), "rotation angle");
    for (const auto& e : quaternion_) require_scalar(fm::infer(e, types), "frame quaternion");
}

void FrameComponent::update(double t, const Values& inputs) {
    fm::Env env = in_.env(inputs);
    env.set("t", t);
    Pose6D pose;
    for (int i = 0; i < 3; ++i) pose.translation[i] = fm::eval_real(position_[i], env);
    if (angle_) pose.orientation = Quat::axis_angle(*axis_, fm::eval_real(*angle_, env));
    if (!quaternion_.empty()) {
        const Quat q{fm::eval_real(quaternion_[0], env), fm::eval_real(quaternion_[1], env),
                     fm::eval_real(quaternion_[2], env), fm::eval_real(quaternion_[3], env)};
        if (!(q.norm() > 0)) throw FrameError("frame quaternion is zero");
        pose.orientation = q.normalized();
    }
    pose_ = pose;
}

Values FrameComponent::initialize(double t0, const Values& inputs) {
    update(t0, inputs);
    return {};
}

Values FrameComponent::step(double, double t_next, const Values& inputs) {
    update(t_next, inputs);
    return {};
}

// ---- shape

namespace {

Mesh generate(const Params& m, const std::filesystem::path& base_dir, bool load_files) {
    const std::string type = text(m, "type");
    if (type == "plane") return make_plane(integer(m, "nx"), integer(m, "ny"), number(m, "sx"), number(m, "sy"));
    if (type == "torus") return make_torus(number(m, "R"), number(m, "r"), integer(m, "nu"), integer(m, "nv"));
    if (type == "box") return make_box(number(m, "sx"), number(m, "sy"), number(m, "sz"));
    if (type == "off") {
        const std::filesystem::path path = base_dir / text(m, "path");
        if (!load_files) return {};
        std::ifstream in(path);
        if (!in) throw IoError("cannot read mesh '" + path.string() + "'");
        return read_off(in);
    }
    throw SceneError("unknown mesh type '" + type + "'");
}

std::vector<fm::Expr> deform_exprs(const Params& p) {
    return find(p, "deform") ? expressions(p, "deform", 3) : std::vector<fm::Expr>{};
}

}  // namespace

ShapeComponent::ShapeComponent(std::string id, const Params& p, std::filesystem::path base_dir)
    : Component(std::move(id)),
      mesh_params_(find(p, "mesh") ? *find(p, "mesh") : throw SceneError("missing parameter 'mesh'")),
      base_dir_(std::move(base_dir)), in_(p, deform_exprs(p), {"x", "y", "z", "t"}) {
    base_ = generate(mesh_params_, base_dir_, false);
    if (const auto d = deform_exprs(p); !d.empty()) {
        deform_ = std::array<fm::Expr, 3>{d[0], d[1], d[2]};
        const fm::TypeMap types = in_.types({"x", "y", "z", "t"});
        for (const auto& e : d) require_scalar(fm::infer(e, types), "deformation");
    }
    if (const Params* c = find(p, "color")) {
        if (!c->is_array() || c->size() != 3) throw SceneError("parameter 'color' must be [r, g, b]");
        std::array<std::uint8_t, 3> rgb{};
        for (int i = 0; i < 3; ++i) {
            const auto& ch = (*c)[i];
            if (!ch.is_number_integer() || ch.get<int>() < 0 || ch.get<int>() > 255)
                throw SceneError("colour channels must be integers in [0, 255]");
            rgb[i] = static_cast<std::uint8_t>(ch.get<int>());
        }
        color_ = {rgb[0], rgb[1], rgb[2]};
    }
    for (const auto& port : in_.ports())
        if (port.name == "field") throw SceneError("'field' is reserved for the field input");
}

std::vector<Port> ShapeComponent::inputs() const {
    std::vector<Port> ports = in_.ports();
    ports.push_back({"field", TypeTag::function(3), true});
    return ports;
}

void ShapeComponent::update(double t, const Values& inputs) {
    if (!deform_) {
        mesh_ = base_;
        return;
    }
    fm::Env env = in_.env(inputs);
    env.set("t", t);
    mesh_ = deform(base_, (*deform_)[0], (*deform_)[1], (*deform_)[2], env);
}

Values ShapeComponent::initialize(double t0, const Values& inputs) {
    base_ = generate(mesh_params_, base_dir_, true);
    base_.validate();
    update(t0, inputs);
    return {};
}

Values ShapeComponent::step(double, double t_next, const Values& inputs) {
    update(t_next, inputs);
    return {};
}

// ---- camera

CameraComponent::CameraComponent(std::string id, const Params& p) : Component(std::move(id)) {
    camera_.frame = this->id();
    camera_.fov_deg = number(p, "fov", 60.0);
    camera_.width = integer(p, "width", 320);
    camera_.height = integer(p, "height", 240);
    camera_.near = number(p, "near", 0.1);
    if (find(p, "warp")) {
        const auto w = expressions(p, "warp", 2);
        camera_.warp = ViewWarp{w[0], w[1]};
        const fm::TypeMap types{{"x", TypeTag::real()}, {"y", TypeTag::real()}};
        for (const auto& e : w) require_scalar(fm::infer(e, types), "view warp");
    }
    camera_.validate();
}

// ---- field

FieldComponent::FieldComponent(std::string id, const Params& p)
    : Component(std::move(id)),
      in_(p, {expression(find(p, "value") ? *find(p, "value") : throw SceneError("missing parameter 'value'"), "field value")},
          {"x", "y", "z", "t"}),
      spec_{expression(*find(p, "value"), "field value"), number(p, "lo", 0.0), number(p, "hi", 1.0)} {
    if (!(spec_.lo < spec_.hi)) throw SceneError("field needs lo < hi");
    const TypeTag t = fm::infer(spec_.value, in_.types({"x", "y", "z", "t"}));
    const bool ok = t.is_scalar() || t.kind == TypeTag::Kind::Unknown ||
                    (t.kind == TypeTag::Kind::Vector && (!t.rows || *t.rows == 3));
    if (!ok) throw TypeError("field value must be Real or Vector(3), got " + fm::to_string(t));
}

Values FieldComponent::update(double t, const Values& inputs) {
    env_ = in_.env(inputs);
    t_ = t;
    fm::Env env = env_;
    env.set("t", t);
    const fm::Expr value = spec_.value;
    auto magnitude = [env, value](std::span<const double> xyz) mutable {
        env.set("x", xyz[0]);
        env.set("y", xyz[1]);
        env.set("z", xyz[2]);
        const fm::Value v = fm::eval(value, env);
        if (v.is_scalar()) return v.to_real();
        const auto& u = v.as<fm::Vector>();
        return norm({u.at(0), u.at(1), u.at(2)});
    };
    return {{"field", fm::FunctionRef::host(id(), 3, magnitude)}};
}

// ---- star source

StarSourceComponent::StarSourceComponent(std::string id, const Params& p, std::filesystem::path base_dir)
    : Component(std::move(id)), path_(base_dir / text(p, "catalog")) {
    if (find(p, "map")) map_ = ColumnMap::parse(text(p, "map"));
    if (const Params* f = find(p, "filter")) {
        filter_ = expression(*f, "filter");
        vrf::filter({}, *filter_);
    }
    config_.r_min = number(p, "r_min", config_.r_min);
    config_.k = number(p, "k", config_.k);
    if (const Params* c = find(p, "color")) {
        config_.color = expression(*c, "star colour");
        const TypeTag t = fm::infer(
            *config_.color, {{"bv", TypeTag::real()}, {"temp", TypeTag::real()}, {"v_mag", TypeTag::real()}});
        if (!t.unifies_with(TypeTag::vector(3))) throw TypeError("star colour must be Vector(3), got " + fm::to_string(t));
    }
    if (!(config_.r_min >= 0 && config_.k >= 0)) throw SceneError("star radii must be non-negative");
}

Values StarSourceComponent::initialize(double, const Values&) {
    const Catalog cat = load_catalog(path_, map_);
    const auto kept = filter_ ? filter(cat.records, *filter_) : cat.records;
    visuals_.clear();
    for (const auto& rec : kept) visuals_.push_back(visual(rec, config_));
    return publish();
}

Values StarSourceComponent::publish() const {
    return {{"count", static_cast<std::int64_t>(visuals_.size())}};
}

// ---- external

ExternalComponent::ExternalComponent(std::string id, ExternalKind kind, Params p)
    : Component(std::move(id)), kind_(std::move(kind)), params_(std::move(p)) {}

Values ExternalComponent::initialize(double, const Values&) {
    if (kind_.initial) {
        previous_ = kind_.initial(params_);
    } else {
        previous_.clear();
        for (const auto& port : kind_.outputs) previous_.insert_or_assign(port.name, zero_of(port));
    }
    return previous_;
}

Values ExternalComponent::step(double t, double t_next, const Values& inputs) {
    previous_ = kind_.step(t, t_next - t, inputs, previous_, params_);
    return previous_;
}

// ---- registry and factory

void register_external(ExternalKind kind) {
    if (kind.name.empty()) throw SceneError("external kind needs a name");
    if (!kind.step) throw SceneError("external kind '" + kind.name + "' needs a step procedure");
    Registry& r = registry();
    std::lock_guard lock(r.mutex);
    if (is_builtin(kind.name) || r.kinds.contains(kind.name))
        throw SceneError("component kind '" + kind.name + "' is already registered");
    std::string name = kind.name;
    r.kinds.emplace(std::move(name), std::move(kind));
}

bool is_known_kind(std::string_view name) {
    if (is_builtin(name)) return true;
    Registry& r = registry();
    std::lock_guard lock(r.mutex);
    return r.kinds.find(name) != r.kinds.end();
}

std::unique_ptr<Component> make_component(const ComponentSpec& spec, const std::filesystem::path& base_dir) {
    const Params& p = spec.parameters;
    if (!p.is_object()) throw SceneError("parameters must be an object");
    try {
        if (spec.kind == "solver") return std::make_unique<SolverComponent>(spec.id, p);
        if (spec.kind == "rigid-body") return std::make_unique<RigidBodyComponent>(spec.id, p);
        if (spec.kind == "transform") return std::make_unique<TransformComponent>(spec.id, p);
        if (spec.kind == "frame") return std::make_unique<FrameComponent>(spec.id, p);
        if (spec.kind == "shape") return std::make_unique<ShapeComponent>(spec.id, p, base_dir);
        if (spec.kind == "camera") return std::make_unique<CameraComponent>(spec.id, p);
        if (spec.kind == "field") return std::make_unique<FieldComponent>(spec.id, p);
        if (spec.kind == "star-source") return std::make_unique<StarSourceComponent>(spec.id, p, base_dir);
    } catch (const nlohmann::json::exception& e) {
        throw SceneError(std::string("bad parameters: ") + e.what());
    }
    Registry& r = registry();
    std::unique_lock lock(r.mutex);
    const auto it = r.kinds.find(spec.kind);
    if (it == r.kinds.end()) throw SceneError("unknown component kind '" + spec.kind + "'");
    ExternalKind kind = it->second;
    lock.unlock();
    return std::make_unique<ExternalComponent>(spec.id, std::move(kind), p);
}

}  // namespace vrf
