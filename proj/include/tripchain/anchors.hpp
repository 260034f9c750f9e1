#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tripchain/dates.hpp"
#include "tripchain/geo.hpp"
#include "tripchain/ingest.hpp"

namespace tripchain {

/// A cluster of nearby towers standing for one stay location of one user.
struct AnchorPoint {
    int ap_id = 0;  // 1-based, in seed-selection order within the clustering scope
    std::string seed_tower;
    std::vector<std::string> member_towers;  // sorted, includes the seed
    geo::GeoPoint location;                  // seed tower coordinate
    std::int64_t total_stay_s = 0;
    bool in_city = false;
};

/// One dwell at an anchor point. Star nodes (collapsed out-of-city runs)
/// carry ap_id == kStarNode.
struct APVisit {
    int ap_id = 0;
    TimeOfDay start{};
    TimeOfDay end{};
    bool in_city = false;
    geo::GeoPoint location;

    bool is_star() const noexcept { return ap_id == kStarNode; }

    static constexpr int kStarNode = 0;
};

/// Total dwell seconds per tower.
std::map<std::string, std::int64_t> tower_stay_durations(std::span<const StayRecord> trace);

/// Greedy duration-ranked clustering: the unassigned tower with the longest
/// total stay seeds a new anchor point and absorbs every unassigned tower
/// within `roaming_distance_m` of it; repeat until no tower is left.
/// Ties on total stay go to the lexicographically smaller tower id. A seed
/// only absorbs towers with the same in-city flag.
/// Throws ValidationError if one tower id appears with two coordinates.
std::vector<AnchorPoint> extract_anchor_points(std::span<const StayRecord> trace,
                                               double roaming_distance_m);

/// tower_id -> anchor point lookup for one clustering scope.
class AnchorIndex {
public:
    explicit AnchorIndex(std::span<const AnchorPoint> aps);

    const AnchorPoint& of_tower(const std::string& tower_id) const;
    const AnchorPoint& by_id(int ap_id) const { return aps_[static_cast<std::size_t>(ap_id - 1)]; }
    std::span<const AnchorPoint> all() const noexcept { return aps_; }

private:
    std::span<const AnchorPoint> aps_;
    std::unordered_map<std::string, std::size_t> tower_to_ap_;
};

/// Merges maximal runs of equal ap_id into one visit spanning the run.
std::vector<APVisit> merge_consecutive(std::span<const APVisit> visits);

/// Maps a chronologically sorted trace to anchor-point visits, drops anchor
/// points whose total stay is below `min_ap_stay_s`, and merges repeats.
std::vector<APVisit> ap_sequence(std::span<const StayRecord> trace, const AnchorIndex& index,
                                 std::int64_t min_ap_stay_s = 0);

}  // namespace tripchain
