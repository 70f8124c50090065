#include "vrf/geometry.hpp"

#include "vrf/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>

namespace vrf {

void Mesh::validate() const {
    for (std::size_t k = 0; k < triangles.size(); ++k) {
        const auto& [a, b, c] = triangles[k];
        if (a >= vertices.size() || b >= vertices.size() || c >= vertices.size())
            throw SceneError("triangle " + std::to_string(k) + " has an index out of range");
        if (a == b || b == c || a == c) throw SceneError("triangle " + std::to_string(k) + " repeats a vertex");
    }
    if (scalar && scalar->size() != vertices.size())
        throw SceneError("scalar channel has " + std::to_string(scalar->size()) + " values for " +
                         std::to_string(vertices.size()) + " vertices");
}

Mesh make_plane(int nx, int ny, double sx, double sy) {
    if (nx < 1 || ny < 1) throw SceneError("plane needs at least one cell per side");
    if (!(sx > 0 && sy > 0)) throw SceneError("plane size must be positive");
    Mesh m;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) m.vertices.push_back({-sx / 2 + sx * i / nx, -sy / 2 + sy * j / ny, 0.0});
    const auto at = [nx](int i, int j) { return static_cast<std::uint32_t>(j * (nx + 1) + i); };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            m.triangles.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
            m.triangles.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
        }
    return m;
}

Mesh make_torus(double R, double r, int nu, int nv) {
    if (!(r > 0 && R > r)) throw SceneError("torus needs R > r > 0");
    if (nu < 3 || nv < 3) throw SceneError("torus needs at least 3 steps each way");
    Mesh m;
    for (int u = 0; u < nu; ++u) {
        const double phi = 2 * std::numbers::pi * u / nu;
        for (int v = 0; v < nv; ++v) {
            const double theta = 2 * std::numbers::pi * v / nv;
            const double ring = R + r * std::cos(theta);
            m.vertices.push_back({ring * std::cos(phi), ring * std::sin(phi), r * std::sin(theta)});
        }
    }
    const auto at = [nu, nv](int u, int v) { return static_cast<std::uint32_t>((u % nu) * nv + v % nv); };
    for (int u = 0; u < nu; ++u)
        for (int v = 0; v < nv; ++v) {
            m.triangles.push_back({at(u, v), at(u + 1, v), at(u + 1, v + 1)});
            m.triangles.push_back({at(u, v), at(u + 1, v + 1), at(u, v + 1)});
        }
    return m;
}

Mesh make_box(double sx, double sy, double sz) {
    if (!(sx > 0 && sy > 0 && sz > 0)) throw SceneError("box size must be positive");
    Mesh m;
    // Vertex k has x from bit 0, y from bit 1, z from bit 2.
    for (int k = 0; k < 8; ++k)
        m.vertices.push_back({(k & 1 ? 0.5 : -0.5) * sx, (k & 2 ? 0.5 : -0.5) * sy, (k & 4 ? 0.5 : -0.5) * sz});
    const std::uint32_t quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
    for (const auto& q : quads) {
        m.triangles.push_back({q[0], q[1], q[2]});
        m.triangles.push_back({q[0], q[2], q[3]});
    }
    return m;
}

Mesh deform(const Mesh& mesh, const formula::Expr& fx, const formula::Expr& fy, const formula::Expr& fz,
            const formula::Env& env) {
    Mesh out = mesh;
    formula::Env local = env;
    for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
        const auto& [x, y, z] = mesh.vertices[k];
        local.set("x", x);
        local.set("y", y);
        local.set("z", z);
        try {
            out.vertices[k] = {formula::eval_real(fx, local), formula::eval_real(fy, local),
                               formula::eval_real(fz, local)};
        } catch (const Error& e) {
            rethrow_with_context(e, "deform at vertex " + std::to_string(k));
        }
    }
    return out;
}

std::size_t edge_count(const Mesh& mesh) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            const auto a = t[e], b = t[(e + 1) % 3];
            edges.insert(std::minmax(a, b));
        }
    return edges.size();
}

void write_off(std::ostream& out, const Mesh& mesh) {
    out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.triangles.size() << " 0\n";
    char buf[96];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v[0], v[1], v[2]);
        out << buf;
    }
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

namespace {

/// Next non-empty line with comments stripped.
bool next_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

}  // namespace

Mesh read_off(std::istream& in) {
    std::string line;
    if (!next_line(in, line) || line.rfind("OFF", 0) != 0) throw SceneError("OFF: missing header");
    std::size_t nv = 0, nf = 0;
    // The counts may share the header line.
    std::istringstream counts(line.size() > 3 ? line.substr(3) : std::string());
    if (!(counts >> nv >> nf)) {
        if (!next_line(in, line)) throw SceneError("OFF: missing counts");
        counts = std::istringstream(line);
        if (!(counts >> nv >> nf)) throw SceneError("OFF: malformed counts line");
    }
    Mesh m;
    m.vertices.reserve(nv);
    for (std::size_t k = 0; k < nv; ++k) {
        Vec3 v{};
        if (!next_line(in, line) || !(std::istringstream(line) >> v[0] >> v[1] >> v[2]))
            throw SceneError("OFF: malformed vertex " + std::to_string(k));
        m.vertices.push_back(v);
    }
    for (std::size_t k = 0; k < nf; ++k) {
        std::size_t n = 0;
        Triangle t{};
        if (!next_line(in, line)) throw SceneError("OFF: missing face " + std::to_string(k));
        std::istringstream face(line);
        if (!(face >> n) || n != 3 || !(face >> t[0] >> t[1] >> t[2]))
            throw SceneError("OFF: face " + std::to_string(k) + " is not a triangle");
        m.triangles.push_back(t);
    }
    m.validate();
    return m;
}

void write_scalar_csv(std::ostream& out, const std::vector<double>& scalar) {
    out << "index,value\n";
    char buf[40];
    for (std::size_t k = 0; k < scalar.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", scalar[k]);
        out << k << ',' << buf << '\n';
    }
}

std::vector<double> read_scalar_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SceneError("scalar CSV: missing header");
    std::vector<double> out;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw SceneError("scalar CSV: malformed line '" + line + "'");
        std::size_t index = 0;
        double value = 0;
        try {
            index = std::stoul(line.substr(0, comma));
            value = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw SceneError("scalar CSV: malformed line '" + line + "'");
        }
        if (index != out.size()) throw SceneError("scalar CSV: indices must be 0, 1, 2, ...");
        out.push_back(value);
    }
    return out;
}

}  // namespace vrf
