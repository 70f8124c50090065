#pragma once

#include "vrf/color.hpp"
#include "vrf/formula.hpp"
#include "vrf/frames.hpp"
#include "vrf/geometry.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vrf {

/// Row-major RGB image, top row first.
class Image {
  public:
    Image(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    Rgb at(int x, int y) const { return pixels_[index(x, y)]; }
    void set(int x, int y, Rgb c) { pixels_[index(x, y)] = c; }
    const std::vector<Rgb>& pixels() const noexcept { return pixels_; }

    friend bool operator==(const Image&, const Image&) = default;

  private:
    std::size_t index(int x, int y) const;

    int width_;
    int height_;
    std::vector<Rgb> pixels_;
};

/// Binary P6 with maxval 255.
void write_ppm(std::ostream& out, const Image& image);
Image read_ppm(std::istream& in);

/// 2D remap of normalized device coordinates x, y in [-1, 1].
struct ViewWarp {
    formula::Expr wx;
    formula::Expr wy;
};

/// Pinhole camera looking down -z of its frame with +y up.
struct Camera {
    std::string frame{FrameForest::kZero};
    double fov_deg = 60;  ///< vertical
    int width = 320;
    int height = 240;
    double near = 0.1;
    std::optional<ViewWarp> warp;

    /// Throws SceneError on a field outside its range.
    void validate() const;
    double aspect() const { return static_cast<double>(width) / height; }
};

struct ScreenPoint {
    double x;      ///< pixels from the left edge
    double y;      ///< pixels from the top edge
    double depth;  ///< distance along the view axis
};

/// Empty for points at or behind the near plane. Throws FrameError on an
/// unknown camera frame.
std::optional<ScreenPoint> project(const Camera& cam, const FrameForest& forest, const Vec3& p_world);

/// Same, for a point already in camera coordinates.
std::optional<ScreenPoint> project_camera_point(const Camera& cam, const Vec3& p_cam);

/// Scalar field over world x, y, z and t. Vector(3) values reduce to their
/// length.
struct FieldSpec {
    formula::Expr value;
    double lo = 0;
    double hi = 1;
};

/// One value per vertex of `mesh` placed in `frame`. Formula errors carry
/// the vertex index.
std::vector<double> sample_field(const FieldSpec& field, const Mesh& mesh, std::string_view frame,
                                 const FrameForest& forest, double t, const formula::Env& env = {});

/// Blue to green to red over [lo, hi]; values outside are clamped. The two
/// ramping channels always sum to 255. Requires lo < hi.
Rgb colormap(double v, double lo, double hi);

struct Drawable {
    Mesh mesh;
    std::string frame{FrameForest::kZero};
    Rgb color{200, 200, 200};
    /// Colormap range for the scalar channel; ignored without one.
    double lo = 0;
    double hi = 1;
};

/// Star drawn as a disc at infinity in `direction` (world frame).
struct Sprite {
    Vec3 direction;
    Rgb color;
    double radius_px;
};

struct RenderList {
    std::vector<Drawable> meshes;
    std::vector<Sprite> sprites;
};

/// Z-buffered rasterization. Sprites lie behind every mesh. Meshes without a
/// scalar channel get flat headlight shading; with one, vertex colours from
/// the colormap are interpolated. Triangles crossing the near plane are
/// dropped. Output depends only on the arguments.
Image render(const Camera& cam, const FrameForest& forest, const RenderList& list);

}  // namespace vrf
