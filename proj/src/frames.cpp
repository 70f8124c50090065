#include "vrf/frames.hpp"

#include "vrf/error.hpp"

#include <cmath>

namespace vrf {

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Quat Quat::axis_angle(const Vec3& axis, double radians) {
    const double n = vrf::norm(axis);
    if (n == 0) throw FrameError("rotation axis must be nonzero");
    const double s = std::sin(radians / 2) / n;
    return Quat{std::cos(radians / 2), axis[0] * s, axis[1] * s, axis[2] * s}.normalized();
}

double Quat::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quat Quat::normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
}

Quat operator*(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z, a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x, a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

Vec3 rotate(const Quat& q, const Vec3& v) {
    // v + 2w(u x v) + 2u x (u x v), u the vector part.
    const Vec3 u{q.x, q.y, q.z};
    const Vec3 c = cross(u, v);
    return v + (2 * q.w) * c + 2.0 * cross(u, c);
}

Pose6D compose(const Pose6D& outer, const Pose6D& inner) {
    return {outer.translation + rotate(outer.orientation, inner.translation),
            (outer.orientation * inner.orientation).normalized()};
}

Pose6D invert(const Pose6D& p) {
    const Quat qi = p.orientation.conjugate();
    return {-1.0 * rotate(qi, p.translation), qi};
}

Vec3 Pose6D::apply(const Vec3& v) const { return translation + rotate(orientation, v); }

void FrameForest::add(std::string id, Pose6D local, std::string parent) {
    if (id.empty() || id == kZero) throw FrameError("invalid frame id '" + id + "'");
    if (nodes_.contains(id)) throw FrameError("duplicate frame '" + id + "'");
    if (parent == kZero) parent.clear();
    if (!parent.empty() && !contains(parent)) throw FrameError("unknown frame '" + parent + "'");
    nodes_.emplace(std::move(id), Node{std::move(parent), {local.translation, local.orientation.normalized()}});
}

void FrameForest::set_parent(std::string_view id, std::string parent) {
    if (parent == kZero) parent.clear();
    if (!parent.empty()) {
        if (!contains(parent)) throw FrameError("unknown frame '" + parent + "'");
        if (parent == id || is_ancestor(id, parent))
            throw FrameError("parent '" + parent + "' of '" + std::string(id) + "' would create a cycle");
    }
    mutable_node(id).parent = std::move(parent);
}

void FrameForest::set_local(std::string_view id, const Pose6D& local) {
    mutable_node(id).local = {local.translation, local.orientation.normalized()};
}

bool FrameForest::contains(std::string_view id) const { return id == kZero || nodes_.find(id) != nodes_.end(); }

const FrameForest::Node& FrameForest::node(std::string_view id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw FrameError("unknown frame '" + std::string(id) + "'");
    return it->second;
}

FrameForest::Node& FrameForest::mutable_node(std::string_view id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw FrameError("unknown frame '" + std::string(id) + "'");
    return it->second;
}

const std::string& FrameForest::parent(std::string_view id) const {
    static const std::string none;
    return id == kZero ? none : node(id).parent;
}

const Pose6D& FrameForest::local(std::string_view id) const {
    static const Pose6D identity;
    return id == kZero ? identity : node(id).local;
}

std::vector<std::string> FrameForest::ids() const {
    std::vector<std::string> out;
    out.reserve(nodes_.size());
    for (const auto& [id, _] : nodes_) out.push_back(id);
    return out;
}

bool FrameForest::is_ancestor(std::string_view maybe_ancestor, std::string_view id) const {
    for (std::string_view cur = node(id).parent; !cur.empty(); cur = node(cur).parent)
        if (cur == maybe_ancestor) return true;
    return false;
}

Pose6D FrameForest::absolute(std::string_view id) const {
    if (id == kZero) return Pose6D::identity();
    const Node& n = node(id);
    return n.parent.empty() ? n.local : compose(absolute(n.parent), n.local);
}

Vec3 FrameForest::transform_point(std::string_view from, std::string_view to, const Vec3& p) const {
    if (!contains(from)) throw FrameError("unknown frame '" + std::string(from) + "'");
    if (!contains(to)) throw FrameError("unknown frame '" + std::string(to) + "'");
    if (from == to) return p;
    return invert(absolute(to)).apply(absolute(from).apply(p));
}

}  // namespace vrf
