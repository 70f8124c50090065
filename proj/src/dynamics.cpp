#include "vrf/dynamics.hpp"

#include "vrf/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

namespace vrf {

using formula::Env;
using formula::Expr;
using formula::Matrix;
using formula::TypeTag;
using formula::Value;
using formula::Vector;

namespace {

std::string format_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", t);
    return buf;
}

void require_finite_state(std::span<const double> state, double t) {
    for (double x : state)
        if (!std::isfinite(x)) throw NumericError("non-finite state at t=" + format_time(t));
}

Vector axpy(std::span<const double> x, double a, const Vector& k) {
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * k[i];
    return out;
}

}  // namespace

OdeSystem OdeSystem::from_equations(std::vector<std::string> names, const std::vector<Expr>& equations,
                                    Vector initial, Env params, std::string time_var) {
    if (names.size() != equations.size() || names.size() != initial.size())
        throw SceneError("ODE system needs one equation and one initial value per state");
    if (std::set<std::string>(names.begin(), names.end()).size() != names.size())
        throw SceneError("duplicate state name");
    OdeSystem sys;
    sys.time_var = std::move(time_var);
    sys.names = std::move(names);
    sys.initial = std::move(initial);
    sys.params = std::move(params);
    for (std::size_t i = 0; i < equations.size(); ++i) {
        auto split = formula::extract_delta_terms(equations[i], sys.time_var);
        sys.rhs.push_back(std::move(split.smooth));
        for (auto& imp : split.impulses)
            sys.impulses.push_back({i, std::move(imp.coefficient), formula::eval_real(imp.firing_time, sys.params)});
    }
    return sys;
}

Vector OdeSystem::derivative(double t, std::span<const double> state) const {
    Env env = params;
    env.set(time_var, t);
    for (std::size_t i = 0; i < names.size(); ++i) env.set(names[i], state[i]);
    Vector out(rhs.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) out[i] = formula::eval_real(rhs[i], env);
    return out;
}

Vector step_rk4(const OdeSystem& sys, double t, std::span<const double> state, double dt) {
    auto stage = [&](int k, double ts, std::span<const double> x) {
        try {
            return sys.derivative(ts, x);
        } catch (const Error& e) {
            rethrow_with_context(e, "rk4 stage " + std::to_string(k) + " at t=" + format_time(ts));
        }
    };
    const Vector k1 = stage(1, t, state);
    const Vector k2 = stage(2, t + dt / 2, axpy(state, dt / 2, k1));
    const Vector k3 = stage(3, t + dt / 2, axpy(state, dt / 2, k2));
    const Vector k4 = stage(4, t + dt, axpy(state, dt, k3));
    Vector out(state.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = state[i] + dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
}

void Trajectory::push(double t, Vector row, bool is_jump) {
    times.push_back(t);
    rows.push_back(std::move(row));
    jump.push_back(is_jump);
}

void Trajectory::write_csv(std::ostream& out) const {
    out << 't';
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < times.size(); ++r) {
        out << format_time(times[r]);
        for (double x : rows[r]) out << ',' << format_time(x);
        if (jump[r]) out << ",jump=1";
        out << '\n';
    }
}

std::vector<double> time_grid(double t0, double t1, double dt) {
    if (!(dt > 0)) throw SceneError("dt must be positive");
    if (!(t0 < t1)) throw SceneError("t0 must be less than t1");
    std::vector<double> grid{t0};
    for (long k = 1;; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        if (t >= t1 - 1e-9 * dt) break;
        grid.push_back(t);
    }
    grid.push_back(t1);
    return grid;
}

bool apply_impulses(const OdeSystem& sys, double from, double to, Vector& state) {
    Env env = sys.params;
    for (std::size_t i = 0; i < sys.names.size(); ++i) env.set(sys.names[i], state[i]);
    Vector jumps(state.size(), 0.0);
    bool fired = false;
    for (const auto& imp : sys.impulses) {
        if (!(imp.time > from && imp.time <= to)) continue;
        env.set(sys.time_var, imp.time);
        jumps[imp.state] += formula::eval_real(imp.coefficient, env);
        fired = true;
    }
    for (std::size_t i = 0; i < state.size(); ++i) state[i] += jumps[i];
    return fired;
}

Trajectory integrate(const OdeSystem& sys, double t0, double t1, double dt) {
    std::vector<double> points = time_grid(t0, t1, dt);
    for (const auto& imp : sys.impulses)
        if (imp.time > t0 && imp.time < t1) points.push_back(imp.time);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    Trajectory traj;
    traj.names = sys.names;
    Vector state = sys.initial;
    require_finite_state(state, t0);
    traj.push(t0, state);
    for (std::size_t k = 1; k < points.size(); ++k) {
        const double t = points[k - 1], next = points[k];
        state = step_rk4(sys, t, state, next - t);
        require_finite_state(state, next);
        traj.push(next, state);
        if (next < t1 && apply_impulses(sys, t, next, state)) {
            require_finite_state(state, next);
            traj.push(next, state, true);
        }
    }
    return traj;
}

RigidBody6D::RigidBody6D(double mass, const Matrix& inertia, Expr force, Expr torque, Env params)
    : mass_(mass), inertia_(inertia), inverse_inertia_(inertia), force_(std::move(force)),
      torque_(std::move(torque)), params_(std::move(params)) {
    if (!(mass > 0) || !std::isfinite(mass)) throw SceneError("mass must be positive");
    if (inertia.rows() != 3 || inertia.cols() != 3) throw SceneError("inertia must be a 3x3 matrix");
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(inertia(i, j) - inertia(j, i)) > 1e-12) throw SceneError("inertia must be symmetric");
    // Sylvester's criterion on the leading minors.
    const Matrix& m = inertia;
    const double m1 = m(0, 0);
    const double m2 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double m3 = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                      m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                      m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    if (!(m1 > 0 && m2 > 0 && m3 > 0)) throw SceneError("inertia must be positive definite");
    inverse_inertia_ = formula::inverse(inertia);

    auto types = params_.types();
    types["t"] = TypeTag::real();
    types["position"] = TypeTag::vector(3);
    types["velocity"] = TypeTag::vector(3);
    types["quaternion"] = TypeTag::vector(4);
    types["omega"] = TypeTag::vector(3);
    types["mass"] = TypeTag::real();
    for (const auto* e : {&force_, &torque_}) {
        const TypeTag tag = formula::infer(*e, types);
        if (!tag.unifies_with(TypeTag::vector(3)) || tag.kind == TypeTag::Kind::Unknown)
            throw TypeError("force and torque must be Vector(3), got " + to_string(tag) + " for " + to_string(*e));
    }
}

Vec3 RigidBody6D::inertia_times(const Vec3& w) const {
    Vec3 out{};
    for (std::size_t i = 0; i < 3; ++i) out[i] = inertia_(i, 0) * w[0] + inertia_(i, 1) * w[1] + inertia_(i, 2) * w[2];
    return out;
}

Vec3 RigidBody6D::eval_vec3(const Expr& e, double t, const RigidBodyState& s, const char* what) const {
    Env env = params_;
    env.set("t", t);
    env.set("position", Vector(s.position.begin(), s.position.end()));
    env.set("velocity", Vector(s.velocity.begin(), s.velocity.end()));
    env.set("quaternion", Vector{s.orientation.w, s.orientation.x, s.orientation.y, s.orientation.z});
    env.set("omega", Vector(s.omega.begin(), s.omega.end()));
    env.set("mass", mass_);
    const Value v = formula::eval(e, env);
    if (!v.is<Vector>() || v.as<Vector>().size() != 3)
        throw TypeError(std::string(what) + " must evaluate to Vector(3)");
    const auto& x = v.as<Vector>();
    return {x[0], x[1], x[2]};
}

RigidDerivative RigidBody6D::derivative(double t, const RigidBodyState& s) const {
    const Vec3 force = eval_vec3(force_, t, s, "force");
    const Vec3 torque = eval_vec3(torque_, t, s, "torque");
    const Vec3 rhs = torque - cross(s.omega, inertia_times(s.omega));
    Vec3 domega{};
    for (std::size_t i = 0; i < 3; ++i)
        domega[i] = inverse_inertia_(i, 0) * rhs[0] + inverse_inertia_(i, 1) * rhs[1] + inverse_inertia_(i, 2) * rhs[2];
    const Quat dq = s.orientation * Quat{0, s.omega[0], s.omega[1], s.omega[2]};
    return {s.velocity, (1.0 / mass_) * force, {dq.w / 2, dq.x / 2, dq.y / 2, dq.z / 2}, domega};
}

namespace {

RigidBodyState advance(const RigidBodyState& s, double h, const RigidDerivative& d) {
    return {s.position + h * d.position, s.velocity + h * d.velocity,
            Quat{s.orientation.w + h * d.orientation.w, s.orientation.x + h * d.orientation.x,
                 s.orientation.y + h * d.orientation.y, s.orientation.z + h * d.orientation.z},
            s.omega + h * d.omega};
}

Vec3 rk4_sum(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return {a[0] + 2 * b[0] + 2 * c[0] + d[0], a[1] + 2 * b[1] + 2 * c[1] + d[1], a[2] + 2 * b[2] + 2 * c[2] + d[2]};
}

}  // namespace

RigidBodyState RigidBody6D::step(double t, const RigidBodyState& s, double dt) const {
    auto stage = [&](int k, double ts, const RigidBodyState& x) {
        try {
            return derivative(ts, x);
        } catch (const Error& e) {
            rethrow_with_context(e, "rk4 stage " + std::to_string(k) + " at t=" + format_time(ts));
        }
    };
    const RigidDerivative k1 = stage(1, t, s);
    const RigidDerivative k2 = stage(2, t + dt / 2, advance(s, dt / 2, k1));
    const RigidDerivative k3 = stage(3, t + dt / 2, advance(s, dt / 2, k2));
    const RigidDerivative k4 = stage(4, t + dt, advance(s, dt, k3));
    const double h = dt / 6;
    auto q_sum = [&](double Quat::*c) {
        return s.orientation.*c + h * (k1.orientation.*c + 2 * k2.orientation.*c + 2 * k3.orientation.*c +
                                       k4.orientation.*c);
    };
    RigidBodyState out{s.position + h * rk4_sum(k1.position, k2.position, k3.position, k4.position),
                       s.velocity + h * rk4_sum(k1.velocity, k2.velocity, k3.velocity, k4.velocity),
                       Quat{q_sum(&Quat::w), q_sum(&Quat::x), q_sum(&Quat::y), q_sum(&Quat::z)}.normalized(),
                       s.omega + h * rk4_sum(k1.omega, k2.omega, k3.omega, k4.omega)};
    return out;
}

Vec3 RigidBody6D::angular_momentum_world(const RigidBodyState& s) const {
    return rotate(s.orientation, inertia_times(s.omega));
}

double RigidBody6D::kinetic_energy_rotational(const RigidBodyState& s) const {
    return dot(s.omega, inertia_times(s.omega)) / 2;
}

std::vector<std::string> RigidBody6D::column_names() {
    return {"px", "py", "pz", "vx", "vy", "vz", "qw", "qx", "qy", "qz", "wx", "wy", "wz"};
}

Vector RigidBody6D::pack(const RigidBodyState& s) {
    const auto& [p, v, q, w] = s;
    return {p[0], p[1], p[2], v[0], v[1], v[2], q.w, q.x, q.y, q.z, w[0], w[1], w[2]};
}

Trajectory integrate_body(const RigidBody6D& body, const RigidBodyState& initial, double t0, double t1, double dt) {
    const std::vector<double> grid = time_grid(t0, t1, dt);
    Trajectory traj;
    traj.names = RigidBody6D::column_names();
    RigidBodyState s = initial;
    s.orientation = s.orientation.normalized();
    traj.push(t0, RigidBody6D::pack(s));
    for (std::size_t k = 1; k < grid.size(); ++k) {
        s = body.step(grid[k - 1], s, grid[k] - grid[k - 1]);
        Vector row = RigidBody6D::pack(s);
        require_finite_state(row, grid[k]);
        traj.push(grid[k], std::move(row));
    }
    return traj;
}

}  // namespace vrf
