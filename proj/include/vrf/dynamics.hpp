#pragma once

#include "vrf/formula.hpp"
#include "vrf/frames.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace vrf {

struct OdeImpulse {
    std::size_t state;
    formula::Expr coefficient;
    double time;
};

/// First-order system x' = f(t, x) + sum of impulse terms. Each right-hand
/// side may reference the time variable, every state name and the
/// bindings in `params`.
struct OdeSystem {
    std::string time_var = "t";
    std::vector<std::string> names;
    std::vector<formula::Expr> rhs;  ///< smooth parts, no delta left
    std::vector<OdeImpulse> impulses;
    formula::Vector initial;
    formula::Env params;

    /// Splits delta terms out of full right-hand sides and evaluates their
    /// firing times. Throws EvalError on malformed delta placement and
    /// SceneError on mismatched lengths or duplicate names.
    static OdeSystem from_equations(std::vector<std::string> names, const std::vector<formula::Expr>& equations,
                                    formula::Vector initial, formula::Env params = {}, std::string time_var = "t");

    /// Smooth derivative at (t, state).
    formula::Vector derivative(double t, std::span<const double> state) const;
};

/// One classical Runge-Kutta step of the smooth part. Formula errors are
/// re-thrown with the stage number and time.
formula::Vector step_rk4(const OdeSystem& sys, double t, std::span<const double> state, double dt);

/// Sampled states. A row flagged `jump` follows the row at the same time
/// and holds the state after an impulse.
struct Trajectory {
    std::vector<std::string> names;
    std::vector<double> times;
    std::vector<formula::Vector> rows;
    std::vector<bool> jump;

    void push(double t, formula::Vector row, bool is_jump = false);
    std::size_t size() const { return times.size(); }
    const formula::Vector& back() const { return rows.back(); }

    /// Header `t,<names>`, values as %.17g, jump rows end with `,jump=1`.
    void write_csv(std::ostream& out) const;
};

/// Grid points of a fixed-step run: t0 + k*dt for interior k, then t1.
/// A grid point within 1e-9*dt of t1 is replaced by t1.
std::vector<double> time_grid(double t0, double t1, double dt);

/// Fixed-step RK4 from t0 to t1. Steps are shortened to land on t1 and on
/// every impulse time strictly inside (t0, t1). Throws NumericError when
/// the state turns non-finite.
Trajectory integrate(const OdeSystem& sys, double t0, double t1, double dt);

/// Fires every impulse with time in (from, to] against `state` in place.
/// Coefficients all see the pre-jump state. Returns whether any fired.
bool apply_impulses(const OdeSystem& sys, double from, double to, formula::Vector& state);

struct RigidBodyState {
    Vec3 position{0, 0, 0};
    Vec3 velocity{0, 0, 0};
    Quat orientation;
    Vec3 omega{0, 0, 0};  ///< body frame

    friend bool operator==(const RigidBodyState&, const RigidBodyState&) = default;
};

struct RigidDerivative {
    Vec3 position, velocity;
    Quat orientation;
    Vec3 omega;
};

/// Newton-Euler rigid body. Force is world-frame, torque body-frame; both
/// are formulas over t, position, velocity, quaternion (w,x,y,z), omega
/// and mass, plus any bindings in `params`.
class RigidBody6D {
  public:
    /// Throws SceneError unless mass > 0 and inertia is 3x3, symmetric
    /// within 1e-12 and positive definite. Throws TypeError unless force
    /// and torque type-check as Vector(3).
    RigidBody6D(double mass, const formula::Matrix& inertia, formula::Expr force, formula::Expr torque,
                formula::Env params = {});

    double mass() const { return mass_; }
    const formula::Matrix& inertia() const { return inertia_; }

    RigidDerivative derivative(double t, const RigidBodyState& s) const;
    /// RK4 on the 13-component state; the quaternion is renormalized.
    RigidBodyState step(double t, const RigidBodyState& s, double dt) const;

    Vec3 angular_momentum_world(const RigidBodyState& s) const;
    double kinetic_energy_rotational(const RigidBodyState& s) const;

    static std::vector<std::string> column_names();
    static formula::Vector pack(const RigidBodyState& s);

  private:
    Vec3 inertia_times(const Vec3& w) const;
    Vec3 eval_vec3(const formula::Expr& e, double t, const RigidBodyState& s, const char* what) const;

    double mass_;
    formula::Matrix inertia_;
    formula::Matrix inverse_inertia_;
    formula::Expr force_;
    formula::Expr torque_;
    formula::Env params_;
};

Trajectory integrate_body(const RigidBody6D& body, const RigidBodyState& initial, double t0, double t1, double dt);

}  // namespace vrf
