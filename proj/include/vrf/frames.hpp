#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vrf {

using Vec3 = std::array<double, 3>;

Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(double s, const Vec3& a);
double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);

/// Hamilton quaternion, scalar first. Rotates vectors by v' = q v q*.
struct Quat {
    double w = 1, x = 0, y = 0, z = 0;

    static Quat identity() { return {}; }
    /// Rotation of `radians` about `axis` (need not be unit length, must be nonzero).
    static Quat axis_angle(const Vec3& axis, double radians);

    double norm() const;
    Quat normalized() const;
    Quat conjugate() const { return {w, -x, -y, -z}; }

    friend bool operator==(const Quat&, const Quat&) = default;
};

Quat operator*(const Quat& a, const Quat& b);
Vec3 rotate(const Quat& q, const Vec3& v);

/// Rigid placement: rotate, then translate.
struct Pose6D {
    Vec3 translation{0, 0, 0};
    Quat orientation;

    static Pose6D identity() { return {}; }
    static Pose6D translate(double x, double y, double z) { return {{x, y, z}, Quat::identity()}; }
    static Pose6D rotate_z(double radians) { return {{0, 0, 0}, Quat::axis_angle({0, 0, 1}, radians)}; }

    Vec3 apply(const Vec3& v) const;

    friend bool operator==(const Pose6D&, const Pose6D&) = default;
};

/// Applies `inner` then `outer`.
Pose6D compose(const Pose6D& outer, const Pose6D& inner);
Pose6D invert(const Pose6D& p);

/// Forest of frames hanging off an implicit identity root named "zero".
/// Parents must be added before children; cycles are rejected on every
/// mutation, so the forest is always well-formed.
class FrameForest {
  public:
    static constexpr std::string_view kZero = "zero";

    /// Throws FrameError on a duplicate id, the reserved root id, or an
    /// unknown parent. An empty parent attaches to the zero frame. Stored
    /// orientations are renormalized.
    void add(std::string id, Pose6D local, std::string parent = {});

    /// Reattaches `id`. Throws FrameError if the new edge would close a cycle.
    void set_parent(std::string_view id, std::string parent);
    void set_local(std::string_view id, const Pose6D& local);

    bool contains(std::string_view id) const;
    /// Empty for roots and for the zero frame.
    const std::string& parent(std::string_view id) const;
    const Pose6D& local(std::string_view id) const;
    std::vector<std::string> ids() const;

    Pose6D absolute(std::string_view id) const;
    Vec3 transform_point(std::string_view from, std::string_view to, const Vec3& p) const;

    friend bool operator==(const FrameForest&, const FrameForest&) = default;

  private:
    struct Node {
        std::string parent;
        Pose6D local;
        friend bool operator==(const Node&, const Node&) = default;
    };
    const Node& node(std::string_view id) const;
    Node& mutable_node(std::string_view id);
    bool is_ancestor(std::string_view maybe_ancestor, std::string_view id) const;

    std::map<std::string, Node, std::less<>> nodes_;
};

}  // namespace vrf
