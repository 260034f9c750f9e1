#include "tripchain/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tripchain::geo {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Wraps a longitude difference into [-180, 180).
double wrap_delta_lon(double d) noexcept {
    if (d >= 180.0 || d < -180.0) {
        d = std::fmod(d + 180.0, 360.0);
        if (d < 0.0) d += 360.0;
        d -= 180.0;
    }
    return d;
}

}  // namespace

bool is_valid(const GeoPoint& p) noexcept {
    return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 && p.lon <= 180.0 &&
           p.lat >= -90.0 && p.lat <= 90.0;
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) noexcept {
    return haversine_m(a, b, kEarthRadiusM);
}

double haversine_m(const GeoPoint& a, const GeoPoint& b, double radius_m) noexcept {
    const double lat1 = a.lat * kDegToRad;
    const double lat2 = b.lat * kDegToRad;
    const double u = std::sin((lat2 - lat1) / 2.0);
    const double v = std::sin((b.lon - a.lon) * kDegToRad / 2.0);
    const double h = std::min(1.0, u * u + std::cos(lat1) * std::cos(lat2) * v * v);
    return 2.0 * radius_m * std::asin(std::sqrt(h));
}

PlanarPoint local_project(const GeoPoint& origin, const GeoPoint& p) {
    const double dlon = wrap_delta_lon(p.lon - origin.lon);
    const double dlat = p.lat - origin.lat;
    if (std::abs(dlon) > kMaxProjectionSpanDeg || std::abs(dlat) > kMaxProjectionSpanDeg) {
        throw std::domain_error("point too far from projection origin for local projection");
    }
    return {kEarthRadiusM * dlon * kDegToRad * std::cos(origin.lat * kDegToRad),
            kEarthRadiusM * dlat * kDegToRad};
}

GeoPoint local_unproject(const GeoPoint& origin, const PlanarPoint& xy) noexcept {
    const double dlat = xy.y / kEarthRadiusM / kDegToRad;
    const double dlon = xy.x / (kEarthRadiusM * std::cos(origin.lat * kDegToRad)) / kDegToRad;
    double lon = origin.lon + dlon;
    if (lon > 180.0) lon -= 360.0;
    if (lon < -180.0) lon += 360.0;
    return {lon, origin.lat + dlat};
}

}  // namespace tripchain::geo
