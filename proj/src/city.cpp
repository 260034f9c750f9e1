#include "tripchain/city.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tripchain/errors.hpp"

namespace tripchain {
namespace {

using geo::GeoPoint;

double cross(const GeoPoint& o, const GeoPoint& a, const GeoPoint& b) {
    return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

bool on_segment(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
    constexpr double eps = 1e-12;
    const double scale = std::max({1.0, std::abs(b.lon - a.lon), std::abs(b.lat - a.lat)});
    if (std::abs(cross(a, b, p)) > eps * scale * scale) return false;
    return p.lon >= std::min(a.lon, b.lon) - eps && p.lon <= std::max(a.lon, b.lon) + eps &&
           p.lat >= std::min(a.lat, b.lat) - eps && p.lat <= std::max(a.lat, b.lat) + eps;
}

int sign(double v) { return (v > 0) - (v < 0); }

bool segments_intersect(const GeoPoint& p1, const GeoPoint& p2, const GeoPoint& q1,
                        const GeoPoint& q2) {
    const int d1 = sign(cross(q1, q2, p1));
    const int d2 = sign(cross(q1, q2, p2));
    const int d3 = sign(cross(p1, p2, q1));
    const int d4 = sign(cross(p1, p2, q2));
    if (d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0) return true;
    return (d1 == 0 && on_segment(q1, q2, p1)) || (d2 == 0 && on_segment(q1, q2, p2)) ||
           (d3 == 0 && on_segment(p1, p2, q1)) || (d4 == 0 && on_segment(p1, p2, q2));
}

CityDefinition::Ring ring_from_json(const nlohmann::json& coords) {
    if (!coords.is_array() || coords.empty()) {
        throw ValidationError("GeoJSON Polygon has no coordinates");
    }
    if (coords.size() > 1) throw ValidationError("GeoJSON Polygon holes are not supported");
    CityDefinition::Ring ring;
    for (const auto& pt : coords[0]) {
        if (!pt.is_array() || pt.size() < 2) throw ValidationError("GeoJSON position malformed");
        ring.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    return ring;
}

std::string read_all(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open city definition '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

bool ring_contains(const CityDefinition::Ring& ring, const GeoPoint& p) {
    const std::size_t n = ring.size() - 1;  // last vertex repeats the first
    for (std::size_t i = 0; i < n; ++i) {
        if (on_segment(ring[i], ring[i + 1], p)) return true;
    }
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        const GeoPoint& a = ring[i];
        const GeoPoint& b = ring[i + 1];
        if ((a.lat > p.lat) != (b.lat > p.lat)) {
            const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
            if (p.lon < x) inside = !inside;
        }
    }
    return inside;
}

CityDefinition CityDefinition::from_polygon(std::string name, Ring ring) {
    if (ring.size() < 4) throw ValidationError("polygon needs at least 3 vertices plus closure");
    if (!(ring.front() == ring.back())) throw ValidationError("polygon ring is not closed");
    for (const auto& p : ring) {
        if (!geo::is_valid(p)) throw ValidationError("polygon vertex out of WGS84 range");
    }
    const std::size_t n = ring.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) {
                if (ring[i] == ring[i + 1]) throw ValidationError("polygon has repeated vertex");
                continue;
            }
            if (segments_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1])) {
                throw ValidationError("polygon is self-intersecting (edges " + std::to_string(i) +
                                      " and " + std::to_string(j) + ")");
            }
        }
    }
    return CityDefinition(std::move(name), std::move(ring));
}

CityDefinition CityDefinition::from_towers(std::string name, TowerSet towers) {
    if (towers.empty()) throw ValidationError("in-city tower set is empty");
    return CityDefinition(std::move(name), std::move(towers));
}

CityDefinition CityDefinition::load_geojson(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_all(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("city GeoJSON '" + path + "': " + e.what());
    }
    std::string name = path;
    if (doc.value("type", "") == "Feature") {
        if (doc.contains("properties") && doc["properties"].is_object()) {
            name = doc["properties"].value("name", path);
        }
        doc = doc.at("geometry");
    }
    if (doc.value("type", "") != "Polygon") {
        throw ValidationError("city GeoJSON must be a Polygon geometry");
    }
    return from_polygon(std::move(name), ring_from_json(doc.at("coordinates")));
}

CityDefinition CityDefinition::load_tower_list(const std::string& path) {
    std::istringstream in(read_all(path));
    TowerSet towers;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        towers.insert(line.substr(b, e - b + 1));
    }
    return from_towers(path, std::move(towers));
}

CityDefinition CityDefinition::load(const std::string& path) {
    const std::string text = read_all(path);
    const auto b = text.find_first_not_of(" \t\r\n");
    if (b != std::string::npos && text[b] == '{') return load_geojson(path);
    return load_tower_list(path);
}

bool CityDefinition::contains(const std::string& tower_id, const GeoPoint& location) const {
    if (const auto* ring = std::get_if<Ring>(&boundary_)) return ring_contains(*ring, location);
    const auto& towers = std::get<TowerSet>(boundary_);
    return towers.find(tower_id) != towers.end();
}

}  // namespace tripchain
