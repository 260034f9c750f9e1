#include "tripchain/anchors.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "tripchain/errors.hpp"

namespace tripchain {

std::map<std::string, std::int64_t> tower_stay_durations(std::span<const StayRecord> trace) {
    std::map<std::string, std::int64_t> out;
    for (const auto& r : trace) out[r.tower_id] += r.dwell().count();
    return out;
}

std::vector<AnchorPoint> extract_anchor_points(std::span<const StayRecord> trace,
                                               double roaming_distance_m) {
    struct Tower {
        std::string id;
        geo::GeoPoint location;
        bool in_city = false;
        std::int64_t stay = 0;
        bool assigned = false;
    };

    std::map<std::string, Tower> by_id;
    for (const auto& r : trace) {
        auto [it, inserted] = by_id.try_emplace(r.tower_id);
        Tower& t = it->second;
        if (inserted) {
            t.id = r.tower_id;
            t.location = r.location;
            t.in_city = r.in_city;
        } else if (!(t.location == r.location)) {
            throw ValidationError(fmt::format("tower {} appears with two coordinates for user {}",
                                              r.tower_id, r.user_id));
        }
        t.stay += r.dwell().count();
    }

    std::vector<Tower> towers;
    towers.reserve(by_id.size());
    for (auto& [id, t] : by_id) towers.push_back(std::move(t));
    // Longest stay first; std::map iteration already gives ascending ids for ties.
    std::stable_sort(towers.begin(), towers.end(),
                     [](const Tower& a, const Tower& b) { return a.stay > b.stay; });

    std::vector<AnchorPoint> aps;
    for (std::size_t s = 0; s < towers.size(); ++s) {
        if (towers[s].assigned) continue;
        Tower& seed = towers[s];
        seed.assigned = true;
        AnchorPoint ap;
        ap.ap_id = static_cast<int>(aps.size()) + 1;
        ap.seed_tower = seed.id;
        ap.location = seed.location;
        ap.in_city = seed.in_city;
        ap.total_stay_s = seed.stay;
        ap.member_towers.push_back(seed.id);
        for (std::size_t k = s + 1; k < towers.size(); ++k) {
            Tower& t = towers[k];
            if (t.assigned || t.in_city != seed.in_city) continue;
            if (geo::haversine_m(seed.location, t.location) <= roaming_distance_m) {
                t.assigned = true;
                ap.total_stay_s += t.stay;
                ap.member_towers.push_back(t.id);
            }
        }
        std::sort(ap.member_towers.begin(), ap.member_towers.end());
        aps.push_back(std::move(ap));
    }
    return aps;
}

AnchorIndex::AnchorIndex(std::span<const AnchorPoint> aps) : aps_(aps) {
    for (std::size_t i = 0; i < aps.size(); ++i) {
        for (const auto& t : aps[i].member_towers) tower_to_ap_.emplace(t, i);
    }
}

const AnchorPoint& AnchorIndex::of_tower(const std::string& tower_id) const {
    const auto it = tower_to_ap_.find(tower_id);
    if (it == tower_to_ap_.end()) {
        throw ValidationError("tower " + tower_id + " is not assigned to any anchor point");
    }
    return aps_[it->second];
}

std::vector<APVisit> merge_consecutive(std::span<const APVisit> visits) {
    std::vector<APVisit> out;
    for (const auto& v : visits) {
        if (!out.empty() && out.back().ap_id == v.ap_id) {
            out.back().end = std::max(out.back().end, v.end);
        } else {
            out.push_back(v);
        }
    }
    return out;
}

std::vector<APVisit> ap_sequence(std::span<const StayRecord> trace, const AnchorIndex& index,
                                 std::int64_t min_ap_stay_s) {
    std::vector<APVisit> raw;
    raw.reserve(trace.size());
    for (const auto& r : trace) {
        const AnchorPoint& ap = index.of_tower(r.tower_id);
        if (ap.total_stay_s < min_ap_stay_s) continue;
        raw.push_back({ap.ap_id, r.start, r.end, ap.in_city, ap.location});
    }
    return merge_consecutive(raw);
}

}  // namespace tripchain
