#include "vrf/stars.hpp"

#include "vrf/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace vrf {

namespace {

constexpr double kParallaxFloor = 0.1;  // mas
constexpr double kTychoV = 0.090;
constexpr double kTychoBV = 0.850;

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    for (auto& c : cells) {
        const auto first = c.find_first_not_of(" \t\r");
        const auto last = c.find_last_not_of(" \t\r");
        c = first == std::string::npos ? std::string() : c.substr(first, last - first + 1);
    }
    return cells;
}

std::optional<double> parse_number(const std::string& s) {
    double v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::uint8_t to_channel(double c) { return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 255.0))); }

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ColumnMap ColumnMap::parse(std::string_view spec) {
    ColumnMap map;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        auto comma = spec.find(',', pos);
        if (comma == std::string_view::npos) comma = spec.size();
        const std::string_view item = spec.substr(pos, comma - pos);
        pos = comma + 1;
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw SceneError("column map entry '" + std::string(item) + "' needs key=value");
        const std::string_view key = item.substr(0, eq);
        std::string value(item.substr(eq + 1));
        if (key == "id") map.id = value;
        else if (key == "ra") map.ra = value;
        else if (key == "dec") map.dec = value;
        else if (key == "parallax" || key == "plx") map.parallax = value;
        else if (key == "bt") map.bt = value;
        else if (key == "vt") map.vt = value;
        else if (key == "angles") {
            if (value == "deg") map.angles = AngleUnit::Degrees;
            else if (value == "rad") map.angles = AngleUnit::Radians;
            else throw SceneError("angles must be deg or rad");
        } else
            throw SceneError("unknown column map key '" + std::string(key) + "'");
    }
    return map;
}

Catalog read_catalog(std::istream& in, const ColumnMap& map) {
    Catalog cat;
    std::string line;
    if (!std::getline(in, line)) throw SceneError("catalogue has no header");
    cat.header = split_csv(line);
    auto column = [&](const std::string& name, bool required) -> std::optional<std::size_t> {
        if (name.empty()) {
            if (required) throw SceneError("column map leaves a required column unnamed");
            return std::nullopt;
        }
        const auto it = std::find(cat.header.begin(), cat.header.end(), name);
        if (it == cat.header.end()) throw SceneError("catalogue has no column '" + name + "'");
        return static_cast<std::size_t>(it - cat.header.begin());
    };
    const auto id_col = column(map.id, false);
    const std::size_t ra_col = *column(map.ra, true);
    const std::size_t dec_col = *column(map.dec, true);
    const std::size_t plx_col = *column(map.parallax, true);
    const auto bt_col = column(map.bt, false);
    const auto vt_col = column(map.vt, false);
    const bool degrees = map.angles == AngleUnit::Degrees;
    // Range checks run in source units so 90 degrees is exactly the pole.
    const double full_turn = degrees ? 360.0 : 2 * std::numbers::pi;
    auto to_radians = [degrees](double a) { return degrees ? a * std::numbers::pi / 180 : a; };

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++row;
        ++cat.rows_read;
        auto skip = [&](const std::string& why) { cat.diagnostics.push_back("row " + std::to_string(row) + ": " + why); };
        auto cells = split_csv(line);
        if (cells.size() != cat.header.size()) {
            skip("expected " + std::to_string(cat.header.size()) + " cells, got " + std::to_string(cells.size()));
            continue;
        }
        const auto ra = parse_number(cells[ra_col]);
        const auto dec = parse_number(cells[dec_col]);
        const auto plx = parse_number(cells[plx_col]);
        if (!ra || !dec || !plx) {
            skip("ra, dec and parallax must be numbers");
            continue;
        }
        StarRecord rec;
        rec.id = id_col ? cells[*id_col] : std::to_string(row);
        rec.ra = to_radians(*ra);
        rec.dec = to_radians(*dec);
        rec.parallax = *plx;
        bool bad_magnitude = false;
        for (auto [col, slot] : {std::pair{bt_col, &rec.bt}, std::pair{vt_col, &rec.vt}}) {
            if (!col || cells[*col].empty()) continue;
            *slot = parse_number(cells[*col]);
            bad_magnitude |= !*slot;
        }
        if (bad_magnitude) {
            skip("magnitude is not a number");
            continue;
        }
        if (!(*ra >= 0 && *ra < full_turn && rec.ra < 2 * std::numbers::pi)) {
            skip("ra out of range");
            continue;
        }
        if (!(std::abs(*dec) <= full_turn / 4)) {
            skip("dec out of range");
            continue;
        }
        if (rec.parallax < 0) {
            skip("negative parallax");
            continue;
        }
        if (!rec.bt && !rec.vt) {
            skip("neither bt nor vt present");
            continue;
        }
        rec.raw = std::move(cells);
        cat.records.push_back(std::move(rec));
    }
    return cat;
}

Catalog load_catalog(const std::filesystem::path& path, const ColumnMap& map) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read catalogue '" + path.string() + "'");
    return read_catalog(in, map);
}

double visual_magnitude(const StarRecord& rec) {
    if (rec.bt && rec.vt) return *rec.vt - kTychoV * (*rec.bt - *rec.vt);
    return rec.vt ? *rec.vt : *rec.bt;
}

std::vector<StarRecord> filter(const std::vector<StarRecord>& records, const formula::Expr& predicate) {
    using formula::TypeTag;
    formula::TypeMap types;
    for (const char* name : {"ra", "dec", "parallax", "bt", "vt", "v_mag"}) types[name] = TypeTag::real();
    const TypeTag tag = formula::infer(predicate, types);
    if (tag.kind != TypeTag::Kind::Boolean)
        throw TypeError("star predicate must be Boolean, got " + to_string(tag));
    const auto used = formula::free_variables(predicate);
    const bool needs_bt = used.contains("bt"), needs_vt = used.contains("vt");

    std::vector<StarRecord> kept;
    for (const auto& rec : records) {
        if ((needs_bt && !rec.bt) || (needs_vt && !rec.vt)) continue;
        formula::Env env;
        env.set("ra", rec.ra);
        env.set("dec", rec.dec);
        env.set("parallax", rec.parallax);
        env.set("v_mag", visual_magnitude(rec));
        if (rec.bt) env.set("bt", *rec.bt);
        if (rec.vt) env.set("vt", *rec.vt);
        if (formula::eval(predicate, env).as<bool>()) kept.push_back(rec);
    }
    return kept;
}

Vec3 to_direction(double ra, double dec) {
    return {std::cos(dec) * std::cos(ra), std::cos(dec) * std::sin(ra), std::sin(dec)};
}

double bv_to_temperature(double bv) { return 4600 * (1 / (0.92 * bv + 1.7) + 1 / (0.92 * bv + 0.62)); }

Rgb temperature_to_rgb(double kelvin) {
    // Curve fit to blackbody chromaticity, valid 1000 K to 40000 K.
    const double t = std::clamp(kelvin, 1000.0, 40000.0) / 100;
    const double r = t <= 66 ? 255 : 329.698727446 * std::pow(t - 60, -0.1332047592);
    const double g = t <= 66 ? 99.4708025861 * std::log(t) - 161.1195681661
                             : 288.1221695283 * std::pow(t - 60, -0.0755148492);
    const double b = t >= 66 ? 255 : t <= 19 ? 0 : 138.5177312231 * std::log(t - 10) - 305.0447927307;
    return {to_channel(r), to_channel(g), to_channel(b)};
}

StarVisual visual(const StarRecord& rec, const StarConfig& config) {
    StarVisual v;
    v.direction = to_direction(rec.ra, rec.dec);
    if (rec.parallax > kParallaxFloor) v.distance = 1000 / rec.parallax;
    v.v_mag = visual_magnitude(rec);
    v.bv = rec.bt && rec.vt ? kTychoBV * (*rec.bt - *rec.vt) : 0.0;
    v.temperature = bv_to_temperature(v.bv);
    if (config.color) {
        formula::Env env;
        env.set("bv", v.bv);
        env.set("temp", v.temperature);
        env.set("v_mag", v.v_mag);
        const formula::Value c = formula::eval(*config.color, env);
        if (!c.is<formula::Vector>() || c.as<formula::Vector>().size() != 3)
            throw TypeError("star colour formula must give Vector(3)");
        const auto& x = c.as<formula::Vector>();
        v.color = {to_channel(x[0]), to_channel(x[1]), to_channel(x[2])};
    } else {
        v.color = temperature_to_rgb(v.temperature);
    }
    v.radius_px = std::max(config.r_min, config.k * std::pow(10.0, -v.v_mag / 5));
    return v;
}

void write_catalog(std::ostream& out, const std::vector<std::string>& header, const std::vector<StarRecord>& records,
                   const StarConfig& config) {
    for (const auto& h : header) out << h << ',';
    out << "v_mag,dist_pc,r,g,b\n";
    for (const auto& rec : records) {
        const StarVisual v = visual(rec, config);
        for (const auto& cell : rec.raw) out << cell << ',';
        out << format_real(v.v_mag) << ',' << (v.distance ? format_real(*v.distance) : std::string()) << ','
            << int(v.color.r) << ',' << int(v.color.g) << ',' << int(v.color.b) << '\n';
    }
}

}  // namespace vrf
