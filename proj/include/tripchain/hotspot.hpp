#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "tripchain/geo.hpp"

namespace tripchain {

struct WeightedPoint {
    geo::GeoPoint location;
    double weight = 1.0;
};

struct PlanarWeightedPoint {
    geo::PlanarPoint xy;
    double weight = 1.0;
};

struct GeoExtent {
    double min_lon = 0.0, min_lat = 0.0, max_lon = 0.0, max_lat = 0.0;

    geo::GeoPoint center() const noexcept {
        return {(min_lon + max_lon) / 2.0, (min_lat + max_lat) / 2.0};
    }
};

/// Density surface in a local planar frame. Row 0 is the northernmost row.
struct Raster {
    geo::GeoPoint projection_origin;  // frame origin (extent center)
    geo::GeoPoint origin;             // lower-left corner, WGS84
    double xll = 0.0, yll = 0.0;      // lower-left corner, projected meters
    double cell_size_m = 0.0;
    int n_cols = 0, n_rows = 0;
    std::vector<double> values;  // density per km^2, row-major
    double nodata = -9999.0;

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * n_cols + col]; }
    double cell_center_x(int col) const noexcept { return xll + (col + 0.5) * cell_size_m; }
    double cell_center_y(int row) const noexcept {
        return yll + (n_rows - row - 0.5) * cell_size_m;
    }
    /// Sum of density times cell area: total kernel mass on the grid.
    double mass() const noexcept;
};

/// Quartic kernel value (per m^2) at distance d.
double quartic_kernel(double d, double radius_m) noexcept;

/// Bounding box of the points padded by `pad_m` meters on every side.
GeoExtent padded_extent(std::span<const WeightedPoint> points, double pad_m);

/// Quartic kernel density at every cell center of a planar grid, per km^2.
/// Cells are summed in a fixed point order, so output does not depend on `workers`.
std::vector<double> kde_grid(std::span<const PlanarWeightedPoint> points, double radius_m,
                             double cell_size_m, double xll, double yll, int n_cols, int n_rows,
                             unsigned workers = 1);

/// Projects about the extent center and evaluates kde_grid over the extent.
/// Throws ValidationError on empty input, negative weight, bad radius/cell,
/// or a degenerate extent.
Raster kde_raster(std::span<const WeightedPoint> points, double radius_m, double cell_size_m,
                  const GeoExtent& extent, unsigned workers = 1);

/// ESRI ASCII grid, rows top to bottom, coordinates in the projected frame.
void write_esri_ascii(std::ostream& out, const Raster& raster);
/// Key-value sidecar recording the projection origin.
void write_raster_sidecar(std::ostream& out, const Raster& raster);

}  // namespace tripchain
