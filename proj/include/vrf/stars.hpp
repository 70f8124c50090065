#pragma once

#include "vrf/color.hpp"
#include "vrf/formula.hpp"
#include "vrf/frames.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vrf {

/// One catalogue row. Angles are radians, parallax milliarcseconds. At
/// least one of bt, vt is present.
struct StarRecord {
    std::string id;
    double ra = 0;
    double dec = 0;
    double parallax = 0;
    std::optional<double> bt;
    std::optional<double> vt;
    /// Source cells as read, in header order; export writes them back verbatim.
    std::vector<std::string> raw;

    friend bool operator==(const StarRecord&, const StarRecord&) = default;
};

enum class AngleUnit { Degrees, Radians };

/// Source column names. An empty name for bt or vt means the catalogue has
/// no such column; an empty id name numbers rows instead.
struct ColumnMap {
    std::string id = "id";
    std::string ra = "ra";
    std::string dec = "dec";
    std::string parallax = "parallax";
    std::string bt = "bt";
    std::string vt = "vt";
    AngleUnit angles = AngleUnit::Degrees;

    /// Parses `key=value` pairs separated by commas, keys id, ra, dec,
    /// parallax, bt, vt and angles (deg or rad). Unset keys keep defaults.
    static ColumnMap parse(std::string_view spec);
};

struct Catalog {
    std::vector<std::string> header;
    std::vector<StarRecord> records;
    std::vector<std::string> diagnostics;  ///< one per skipped row
    std::size_t rows_read = 0;
};

/// Rows failing range or number checks are skipped with a diagnostic.
/// Throws SceneError on a missing mapped column and IoError on an
/// unreadable file.
Catalog read_catalog(std::istream& in, const ColumnMap& map);
Catalog load_catalog(const std::filesystem::path& path, const ColumnMap& map);

/// Johnson V from Tycho magnitudes, or the single magnitude present.
double visual_magnitude(const StarRecord& rec);

/// Keeps records for which `predicate` is true, in order. The predicate
/// may use ra, dec, parallax, bt, vt and v_mag; a record missing a
/// referenced bt or vt is dropped. Throws TypeError unless the predicate is
/// Boolean.
std::vector<StarRecord> filter(const std::vector<StarRecord>& records, const formula::Expr& predicate);

Vec3 to_direction(double ra, double dec);

/// Approximate blackbody colour of a temperature in kelvin.
Rgb temperature_to_rgb(double kelvin);
double bv_to_temperature(double bv);

struct StarConfig {
    double r_min = 0.5;  ///< px
    double k = 8.0;      ///< px at magnitude 0
    /// Optional Vector(3) formula over bv, temp and v_mag giving RGB in
    /// [0, 255]; replaces the blackbody colour.
    std::optional<formula::Expr> color;
};

struct StarVisual {
    Vec3 direction;
    std::optional<double> distance;  ///< parsecs; absent for parallax <= 0.1 mas
    double v_mag = 0;
    double bv = 0;
    double temperature = 0;
    Rgb color;
    double radius_px = 0;
};

StarVisual visual(const StarRecord& rec, const StarConfig& config = {});

/// Header plus v_mag,dist_pc,r,g,b; original cells are written unchanged.
void write_catalog(std::ostream& out, const std::vector<std::string>& header, const std::vector<StarRecord>& records,
                   const StarConfig& config = {});

}  // namespace vrf
