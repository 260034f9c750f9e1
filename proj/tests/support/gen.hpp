#pragma once

// Small seeded generators for property tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tripchain/chains.hpp"
#include "tripchain/geo.hpp"
#include "tripchain/ingest.hpp"

namespace gen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
    std::mt19937_64& rng() { return rng_; }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
    }

    tripchain::geo::GeoPoint point_near(tripchain::geo::GeoPoint c, double span_deg) {
        return {c.lon + real(-span_deg, span_deg), c.lat + real(-span_deg, span_deg)};
    }

    tripchain::geo::GeoPoint anywhere() { return {real(-180.0, 180.0), real(-89.0, 89.0)}; }

    // Random canonical label over up to max_aps anchors, optional boundary stars.
    std::string canonical_label(int max_len, int max_aps, bool stars) {
        const int len = integer(1, max_len);
        std::vector<int> seq;
        int next_new = 0;
        while (static_cast<int>(seq.size()) < len) {
            int v;
            if (next_new < max_aps && (seq.empty() || coin(0.5))) {
                v = next_new++;
            } else {
                v = integer(0, next_new - 1);
            }
            if (!seq.empty() && seq.back() == v) continue;
            seq.push_back(v);
        }
        std::string out;
        const bool lead = stars && coin(0.3);
        const bool trail = stars && coin(0.3);
        if (lead) out += "*-";
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (i) out += '-';
            out += tripchain::anchor_token(static_cast<std::size_t>(seq[i]));
        }
        if (trail) out += "-*";
        return out;
    }

private:
    std::mt19937_64 rng_;
};

inline tripchain::StayRecord record(std::string user, const std::string& date, int start_s, int end_s,
                                    tripchain::geo::GeoPoint loc, std::string tower,
                                    bool in_city = true) {
    tripchain::StayRecord r;
    r.user_id = std::move(user);
    r.date = *tripchain::parse_date(date);
    r.start = std::chrono::seconds(start_s);
    r.end = std::chrono::seconds(end_s);
    r.location = loc;
    r.tower_id = std::move(tower);
    r.in_city = in_city;
    return r;
}

// Point at the given bearing and distance from c, using the local tangent plane.
inline tripchain::geo::GeoPoint offset_m(tripchain::geo::GeoPoint c, double east_m, double north_m) {
    return tripchain::geo::local_unproject(c, {east_m, north_m});
}

}  // namespace gen
