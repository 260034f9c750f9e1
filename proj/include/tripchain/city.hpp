#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "tripchain/geo.hpp"

namespace tripchain {

/// City membership either by boundary polygon (outer ring, closed) or by an
/// explicit set of in-city tower ids.
class CityDefinition {
public:
    using Ring = std::vector<geo::GeoPoint>;
    using TowerSet = std::set<std::string, std::less<>>;

    /// Throws ValidationError if the ring is not closed, has fewer than three
    /// distinct vertices, or self-intersects.
    static CityDefinition from_polygon(std::string name, Ring ring);
    /// Throws ValidationError on an empty set.
    static CityDefinition from_towers(std::string name, TowerSet towers);

    /// GeoJSON Polygon (or a Feature wrapping one). Holes are rejected.
    static CityDefinition load_geojson(const std::string& path);
    /// Newline-delimited tower ids; blank lines and `#` comments ignored.
    static CityDefinition load_tower_list(const std::string& path);
    /// Dispatches on content: a leading `{` means GeoJSON.
    static CityDefinition load(const std::string& path);

    const std::string& name() const noexcept { return name_; }
    bool is_polygon() const noexcept { return std::holds_alternative<Ring>(boundary_); }

    /// Boundary points count as inside. Unknown towers in set mode are outside.
    bool contains(const std::string& tower_id, const geo::GeoPoint& location) const;

private:
    CityDefinition(std::string name, std::variant<Ring, TowerSet> b)
        : name_(std::move(name)), boundary_(std::move(b)) {}

    std::string name_;
    std::variant<Ring, TowerSet> boundary_;
};

/// Point-in-polygon on a closed ring, boundary inclusive.
bool ring_contains(const CityDefinition::Ring& ring, const geo::GeoPoint& p);

}  // namespace tripchain
