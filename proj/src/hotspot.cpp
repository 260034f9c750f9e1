#include "tripchain/hotspot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "tripchain/config.hpp"
#include "tripchain/errors.hpp"
#include "tripchain/parallel.hpp"

namespace tripchain {

double Raster::mass() const noexcept {
    const double cell_km2 = cell_size_m * cell_size_m / 1e6;
    double s = 0.0;
    for (double v : values) {
        if (v != nodata) s += v;
    }
    return s * cell_km2;
}

double quartic_kernel(double d, double radius_m) noexcept {
    if (d >= radius_m) return 0.0;
    const double u = 1.0 - (d * d) / (radius_m * radius_m);
    return 3.0 / (std::numbers::pi * radius_m * radius_m) * u * u;
}

GeoExtent padded_extent(std::span<const WeightedPoint> points, double pad_m) {
    if (points.empty()) throw ValidationError("cannot compute the extent of an empty point set");
    GeoExtent e{points[0].location.lon, points[0].location.lat, points[0].location.lon,
                points[0].location.lat};
    for (const auto& p : points) {
        e.min_lon = std::min(e.min_lon, p.location.lon);
        e.max_lon = std::max(e.max_lon, p.location.lon);
        e.min_lat = std::min(e.min_lat, p.location.lat);
        e.max_lat = std::max(e.max_lat, p.location.lat);
    }
    constexpr double rad_to_deg = 180.0 / std::numbers::pi;
    const double dlat = pad_m / geo::kEarthRadiusM * rad_to_deg;
    const double dlon = dlat / std::cos(e.center().lat / rad_to_deg);
    e.min_lon -= dlon;
    e.max_lon += dlon;
    e.min_lat -= dlat;
    e.max_lat += dlat;
    return e;
}

std::vector<double> kde_grid(std::span<const PlanarWeightedPoint> points, double radius_m,
                             double cell_size_m, double xll, double yll, int n_cols, int n_rows,
                             unsigned workers) {
    std::vector<PlanarWeightedPoint> sorted(points.begin(), points.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.xy.y < b.xy.y; });

    const double norm = 3.0 / (std::numbers::pi * radius_m * radius_m) * 1e6;  // per km^2
    const double r2 = radius_m * radius_m;
    std::vector<double> values(static_cast<std::size_t>(n_cols) * n_rows, 0.0);

    parallel_for(static_cast<std::size_t>(n_rows), workers, [&](std::size_t row) {
        const double yc = yll + (n_rows - static_cast<double>(row) - 0.5) * cell_size_m;
        const auto lo = std::lower_bound(sorted.begin(), sorted.end(), yc - radius_m,
                                         [](const auto& p, double y) { return p.xy.y < y; });
        const auto hi = std::upper_bound(lo, sorted.end(), yc + radius_m,
                                         [](double y, const auto& p) { return y < p.xy.y; });
        double* out = values.data() + row * static_cast<std::size_t>(n_cols);
        for (auto it = lo; it != hi; ++it) {
            const double dy = yc - it->xy.y;
            const double c_lo = std::ceil((it->xy.x - radius_m - xll) / cell_size_m - 0.5);
            const double c_hi = std::floor((it->xy.x + radius_m - xll) / cell_size_m - 0.5);
            const int first = static_cast<int>(std::max(0.0, c_lo));
            const int last = static_cast<int>(std::min<double>(n_cols - 1, c_hi));
            for (int c = first; c <= last; ++c) {
                const double dx = xll + (c + 0.5) * cell_size_m - it->xy.x;
                const double d2 = dx * dx + dy * dy;
                if (d2 >= r2) continue;
                const double u = 1.0 - d2 / r2;
                out[c] += it->weight * norm * u * u;
            }
        }
    });
    return values;
}

Raster kde_raster(std::span<const WeightedPoint> points, double radius_m, double cell_size_m,
                  const GeoExtent& extent, unsigned workers) {
    if (points.empty()) throw ValidationError("kernel density needs at least one point");
    if (!(cell_size_m > 0.0) || !(radius_m > cell_size_m)) {
        throw ValidationError("kernel density requires radius > cell size > 0");
    }
    if (!(extent.max_lon > extent.min_lon) || !(extent.max_lat > extent.min_lat)) {
        throw ValidationError("kernel density extent is degenerate");
    }

    Raster r;
    r.projection_origin = extent.center();
    r.cell_size_m = cell_size_m;
    try {
        const auto sw = geo::local_project(r.projection_origin, {extent.min_lon, extent.min_lat});
        const auto ne = geo::local_project(r.projection_origin, {extent.max_lon, extent.max_lat});
        r.xll = sw.x;
        r.yll = sw.y;
        r.n_cols = std::max(1, static_cast<int>(std::ceil((ne.x - sw.x) / cell_size_m - 1e-9)));
        r.n_rows = std::max(1, static_cast<int>(std::ceil((ne.y - sw.y) / cell_size_m - 1e-9)));
    } catch (const std::domain_error& e) {
        throw ValidationError(std::string("kernel density extent too large: ") + e.what());
    }
    r.origin = geo::local_unproject(r.projection_origin, {r.xll, r.yll});

    std::vector<PlanarWeightedPoint> planar;
    planar.reserve(points.size());
    for (const auto& p : points) {
        if (!(p.weight >= 0.0)) throw ValidationError("kernel density weights must be >= 0");
        try {
            planar.push_back({geo::local_project(r.projection_origin, p.location), p.weight});
        } catch (const std::domain_error& e) {
            throw ValidationError(std::string("kernel density point: ") + e.what());
        }
    }
    r.values = kde_grid(planar, radius_m, cell_size_m, r.xll, r.yll, r.n_cols, r.n_rows, workers);
    return r;
}

void write_esri_ascii(std::ostream& out, const Raster& raster) {
    out << "ncols " << raster.n_cols << '\n'
        << "nrows " << raster.n_rows << '\n'
        << "xllcorner " << format_fixed(raster.xll) << '\n'
        << "yllcorner " << format_fixed(raster.yll) << '\n'
        << "cellsize " << format_fixed(raster.cell_size_m) << '\n'
        << "NODATA_value " << format_fixed(raster.nodata) << '\n';
    std::string line;
    for (int row = 0; row < raster.n_rows; ++row) {
        line.clear();
        for (int col = 0; col < raster.n_cols; ++col) {
            if (col) line += ' ';
            line += format_fixed(raster.at(row, col));
        }
        out << line << '\n';
    }
}

void write_raster_sidecar(std::ostream& out, const Raster& raster) {
    out << "projection = equirectangular\n"
        << "origin_lon = " << fmt::format("{:.9f}", raster.projection_origin.lon) << '\n'
        << "origin_lat = " << fmt::format("{:.9f}", raster.projection_origin.lat) << '\n'
        << "earth_radius_m = " << format_fixed(geo::kEarthRadiusM, 1) << '\n'
        << "lower_left_lon = " << fmt::format("{:.9f}", raster.origin.lon) << '\n'
        << "lower_left_lat = " << fmt::format("{:.9f}", raster.origin.lat) << '\n'
        << "units = density_per_km2\n";
}

}  // namespace tripchain
