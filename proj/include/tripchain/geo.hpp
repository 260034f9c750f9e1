#pragma once

namespace tripchain::geo {

/// Mean Earth radius (IUGG), meters.
inline constexpr double kEarthRadiusM = 6371008.8;

/// Largest |delta lon| or |delta lat| (degrees) accepted by local_project.
inline constexpr double kMaxProjectionSpanDeg = 2.0;

struct GeoPoint {
    double lon = 0.0;
    double lat = 0.0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct PlanarPoint {
    double x = 0.0;  // meters east of the origin
    double y = 0.0;  // meters north of the origin
};

bool is_valid(const GeoPoint& p) noexcept;

/// Great-circle distance in meters.
double haversine_m(const GeoPoint& a, const GeoPoint& b) noexcept;
double haversine_m(const GeoPoint& a, const GeoPoint& b, double radius_m) noexcept;

/// Equirectangular projection about `origin`. Throws std::domain_error when
/// `p` is more than kMaxProjectionSpanDeg away from the origin on either axis.
PlanarPoint local_project(const GeoPoint& origin, const GeoPoint& p);

/// Inverse of local_project.
GeoPoint local_unproject(const GeoPoint& origin, const PlanarPoint& xy) noexcept;

}  // namespace tripchain::geo
