#include "vrf/render.hpp"

#include "vrf/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

namespace vrf {

namespace {

struct Vertex {
    ScreenPoint s;
    Vec3 cam;
    std::array<double, 3> color;
};

double edge(const ScreenPoint& a, const ScreenPoint& b, double px, double py) {
    return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// For positively oriented triangles in y-down screen space.
bool top_left(const ScreenPoint& a, const ScreenPoint& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    return (dy == 0 && dx > 0) || dy < 0;
}

bool covers(double w, bool tl) { return w > 0 || (w == 0 && tl); }

std::uint8_t channel(double c) { return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 255.0))); }

// Rounds halves toward zero.
int round_half_down(double x) { return static_cast<int>(std::ceil(x - 0.5)); }

class Raster {
  public:
    Raster(const Camera& cam) : image_(cam.width, cam.height), depth_(std::size_t(cam.width) * cam.height, kFar) {}

    void disc(double cx, double cy, double radius, Rgb c) {
        const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
        const int x1 = std::min(image_.width() - 1, static_cast<int>(std::ceil(cx + radius)));
        const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
        const int y1 = std::min(image_.height() - 1, static_cast<int>(std::ceil(cy + radius)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
                if (dx * dx + dy * dy <= radius * radius) image_.set(x, y, c);
            }
    }

    /// `flat` set means every pixel takes that colour; otherwise vertex
    /// colours are interpolated perspective-correctly.
    void triangle(Vertex a, Vertex b, Vertex c, std::optional<Rgb> flat) {
        double area = edge(a.s, b.s, c.s.x, c.s.y);
        if (area == 0) return;
        if (area < 0) {
            std::swap(b, c);
            area = -area;
        }
        const bool tl0 = top_left(b.s, c.s), tl1 = top_left(c.s, a.s), tl2 = top_left(a.s, b.s);
        const double min_x = std::min({a.s.x, b.s.x, c.s.x}), max_x = std::max({a.s.x, b.s.x, c.s.x});
        const double min_y = std::min({a.s.y, b.s.y, c.s.y}), max_y = std::max({a.s.y, b.s.y, c.s.y});
        const int x0 = first_pixel(min_x, image_.width()), x1 = last_pixel(max_x, image_.width());
        const int y0 = first_pixel(min_y, image_.height()), y1 = last_pixel(max_y, image_.height());
        const double iz0 = 1 / a.s.depth, iz1 = 1 / b.s.depth, iz2 = 1 / c.s.depth;
        for (int y = y0; y <= y1; ++y) {
            const double py = y + 0.5;
            for (int x = x0; x <= x1; ++x) {
                const double px = x + 0.5;
                const double w0 = edge(b.s, c.s, px, py), w1 = edge(c.s, a.s, px, py), w2 = edge(a.s, b.s, px, py);
                if (!covers(w0, tl0) || !covers(w1, tl1) || !covers(w2, tl2)) continue;
                const double l0 = w0 / area, l1 = w1 / area, l2 = w2 / area;
                const double iz = l0 * iz0 + l1 * iz1 + l2 * iz2;
                const double depth = 1 / iz;
                double& slot = depth_[std::size_t(y) * image_.width() + x];
                if (!(depth < slot)) continue;
                slot = depth;
                if (flat) {
                    image_.set(x, y, *flat);
                    continue;
                }
                std::array<std::uint8_t, 3> rgb;
                for (int k = 0; k < 3; ++k)
                    rgb[k] = channel((l0 * a.color[k] * iz0 + l1 * b.color[k] * iz1 + l2 * c.color[k] * iz2) / iz);
                image_.set(x, y, {rgb[0], rgb[1], rgb[2]});
            }
        }
    }

    Image take() && { return std::move(image_); }

  private:
    static constexpr double kFar = std::numeric_limits<double>::infinity();

    // Pixel k has its centre at k + 0.5.
    static int first_pixel(double lo, int size) {
        return static_cast<int>(std::clamp(std::ceil(lo - 0.5), 0.0, static_cast<double>(size)));
    }
    static int last_pixel(double hi, int size) {
        return static_cast<int>(std::clamp(std::floor(hi - 0.5), -1.0, size - 1.0));
    }

    Image image_;
    std::vector<double> depth_;
};

}  // namespace

Image::Image(int width, int height) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw SceneError("image size must be positive");
    pixels_.resize(std::size_t(width) * height);
}

std::size_t Image::index(int x, int y) const {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) throw SceneError("pixel out of range");
    return std::size_t(y) * width_ + x;
}

void write_ppm(std::ostream& out, const Image& image) {
    out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
    for (const Rgb& p : image.pixels()) {
        const char bytes[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
        out.write(bytes, 3);
    }
}

Image read_ppm(std::istream& in) {
    auto token = [&]() {
        std::string t;
        while (in >> std::ws && in.peek() == '#') in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
        in >> t;
        return t;
    };
    if (token() != "P6") throw SceneError("not a binary PPM");
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(token());
        h = std::stoi(token());
        maxval = std::stoi(token());
    } catch (const std::exception&) {
        throw SceneError("malformed PPM header");
    }
    if (maxval != 255) throw SceneError("PPM maxval must be 255");
    in.get();
    Image image(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            char bytes[3];
            if (!in.read(bytes, 3)) throw SceneError("truncated PPM");
            image.set(x, y,
                      {static_cast<std::uint8_t>(bytes[0]), static_cast<std::uint8_t>(bytes[1]),
                       static_cast<std::uint8_t>(bytes[2])});
        }
    return image;
}

void Camera::validate() const {
    if (!(fov_deg > 0 && fov_deg < 180)) throw SceneError("camera fov must be in (0, 180) degrees");
    if (width <= 0 || height <= 0) throw SceneError("camera size must be positive");
    if (!(near > 0)) throw SceneError("camera near plane must be positive");
    if (warp) {
        for (const auto& e : {warp->wx, warp->wy})
            for (const auto& v : formula::free_variables(e))
                if (v != "x" && v != "y") throw SceneError("view warp may only use x and y, found '" + v + "'");
    }
}

std::optional<ScreenPoint> project_camera_point(const Camera& cam, const Vec3& p) {
    if (p[2] >= -cam.near) return std::nullopt;
    const double depth = -p[2];
    const double f = 1 / std::tan(cam.fov_deg * std::numbers::pi / 360);
    double nx = f / cam.aspect() * p[0] / depth;
    double ny = f * p[1] / depth;
    if (cam.warp) {
        formula::Env env;
        env.set("x", nx);
        env.set("y", ny);
        try {
            const double wx = formula::eval_real(cam.warp->wx, env);
            ny = formula::eval_real(cam.warp->wy, env);
            nx = wx;
        } catch (const Error& e) {
            rethrow_with_context(e, "view warp");
        }
    }
    return ScreenPoint{(nx + 1) / 2 * cam.width, (1 - ny) / 2 * cam.height, depth};
}

std::optional<ScreenPoint> project(const Camera& cam, const FrameForest& forest, const Vec3& p_world) {
    return project_camera_point(cam, forest.transform_point(FrameForest::kZero, cam.frame, p_world));
}

std::vector<double> sample_field(const FieldSpec& field, const Mesh& mesh, std::string_view frame,
                                 const FrameForest& forest, double t, const formula::Env& env) {
    const Pose6D pose = forest.absolute(frame);
    formula::Env local = env;
    local.set("t", t);
    std::vector<double> out;
    out.reserve(mesh.vertices.size());
    for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
        const Vec3 p = pose.apply(mesh.vertices[k]);
        local.set("x", p[0]);
        local.set("y", p[1]);
        local.set("z", p[2]);
        try {
            const formula::Value v = formula::eval(field.value, local);
            if (v.is<formula::Vector>() && v.as<formula::Vector>().size() == 3) {
                const auto& u = v.as<formula::Vector>();
                out.push_back(norm({u[0], u[1], u[2]}));
            } else if (v.is_scalar()) {
                out.push_back(v.to_real());
            } else {
                throw TypeError("field must be Real or Vector(3)");
            }
        } catch (const Error& e) {
            rethrow_with_context(e, "field at vertex " + std::to_string(k));
        }
    }
    return out;
}

Rgb colormap(double v, double lo, double hi) {
    if (!(lo < hi)) throw SceneError("colormap needs lo < hi");
    const double u = (std::clamp(v, lo, hi) - lo) / (hi - lo);
    if (u <= 0.5) {
        const int g = round_half_down(255 * (u / 0.5));
        return {0, static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(255 - g)};
    }
    const int r = round_half_down(255 * ((u - 0.5) / 0.5));
    return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(255 - r), 0};
}

Image render(const Camera& cam, const FrameForest& forest, const RenderList& list) {
    cam.validate();
    const Pose6D to_camera = invert(forest.absolute(cam.frame));
    Raster raster(cam);

    for (const Sprite& s : list.sprites) {
        const Vec3 d = rotate(to_camera.orientation, s.direction);
        const auto p = project_camera_point(cam, (cam.near + 1) / std::max(norm(d), 1e-300) * d);
        if (p) raster.disc(p->x, p->y, s.radius_px, s.color);
    }

    for (const Drawable& item : list.meshes) {
        item.mesh.validate();
        const Pose6D pose = compose(to_camera, forest.absolute(item.frame));
        const bool mapped = item.mesh.scalar.has_value();
        std::vector<std::optional<Vertex>> verts;
        verts.reserve(item.mesh.vertices.size());
        for (std::size_t k = 0; k < item.mesh.vertices.size(); ++k) {
            const Vec3 c = pose.apply(item.mesh.vertices[k]);
            const auto s = project_camera_point(cam, c);
            if (!s) {
                verts.emplace_back();
                continue;
            }
            std::array<double, 3> color{};
            if (mapped) {
                const Rgb m = colormap((*item.mesh.scalar)[k], item.lo, item.hi);
                color = {double(m.r), double(m.g), double(m.b)};
            }
            verts.push_back(Vertex{*s, c, color});
        }
        for (const Triangle& t : item.mesh.triangles) {
            const auto& a = verts[t[0]];
            const auto& b = verts[t[1]];
            const auto& c = verts[t[2]];
            if (!a || !b || !c) continue;
            std::optional<Rgb> flat;
            if (!mapped) {
                const Vec3 n = cross(b->cam - a->cam, c->cam - a->cam);
                const Vec3 centre = (1.0 / 3) * (a->cam + b->cam + c->cam);
                const double nn = norm(n), cn = norm(centre);
                const double lambert = nn > 0 && cn > 0 ? std::abs(dot(n, centre)) / (nn * cn) : 0;
                flat = Rgb{channel(item.color.r * lambert), channel(item.color.g * lambert),
                           channel(item.color.b * lambert)};
            }
            raster.triangle(*a, *b, *c, flat);
        }
    }
    return std::move(raster).take();
}

}  // namespace vrf
