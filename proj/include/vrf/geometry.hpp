#pragma once

#include "vrf/formula.hpp"
#include "vrf/frames.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace vrf {

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh in its local frame. Every index is in range and
/// distinct within its triangle; `scalar`, when present, has one entry per
/// vertex.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::optional<std::vector<double>> scalar;

    /// Throws SceneError when an invariant is broken.
    void validate() const;

    friend bool operator==(const Mesh&, const Mesh&) = default;
};

/// (nx+1)(ny+1) vertices on z=0 centred at the origin, 2*nx*ny triangles
/// wound counter-clockwise seen from +z.
Mesh make_plane(int nx, int ny, double sx, double sy);

/// Torus about the z axis: nu steps around the main circle of radius R, nv
/// around the tube of radius r. Outward normals.
Mesh make_torus(double R, double r, int nu, int nv);

/// Axis-aligned box centred at the origin, 8 vertices and 12 outward-wound
/// triangles.
Mesh make_box(double sx, double sy, double sz);

/// Remaps every vertex (x, y, z) to (fx, fy, fz) evaluated with x, y, z bound
/// on top of `env`. Connectivity and the scalar channel are kept. Formula
/// errors are re-thrown with the vertex index.
Mesh deform(const Mesh& mesh, const formula::Expr& fx, const formula::Expr& fy, const formula::Expr& fz,
            const formula::Env& env = {});

/// Number of distinct undirected edges.
std::size_t edge_count(const Mesh& mesh);

void write_off(std::ostream& out, const Mesh& mesh);
/// Reads triangle faces only. Throws SceneError on malformed input.
Mesh read_off(std::istream& in);

/// Sidecar `index,value` with a header line.
void write_scalar_csv(std::ostream& out, const std::vector<double>& scalar);
std::vector<double> read_scalar_csv(std::istream& in);

}  // namespace vrf
