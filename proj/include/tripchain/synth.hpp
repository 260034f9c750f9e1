#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tripchain/chains.hpp"
#include "tripchain/config.hpp"
#include "tripchain/geo.hpp"
#include "tripchain/ingest.hpp"

namespace tripchain {

struct MarkovSpec {
    std::vector<ChainTypeLabel> states;
    std::vector<std::vector<double>> rows;  // rows[i][j] = P(next = j | current = i)
};

/// Everything needed to generate a synthetic stay-record corpus with known
/// chain labels.
struct ScenarioSpec {
    std::uint64_t seed = 1;
    std::size_t n_users = 100;
    std::map<int, double> days_per_user{{1, 1.0}};
    Date start_date = Date{std::chrono::year{2017} / 8 / 1};
    int start_spread_days = 0;
    std::vector<std::pair<ChainTypeLabel, double>> mixture;
    std::optional<MarkovSpec> markov;

    // AP layout: explicit centers, or a rows x cols grid around city_center.
    geo::GeoPoint city_center{127.15, 35.82};
    std::vector<geo::GeoPoint> ap_centers;
    int layout_rows = 5;
    int layout_cols = 5;
    double ap_spacing_m = 1500.0;
    int towers_per_ap = 3;
    double tower_offset_m = 150.0;
    double roaming_distance_m = 500.0;

    double ping_pong_rate = 0.0;
    geo::GeoPoint out_of_city_anchor{128.9, 37.75};
    TimeOfDay day_start{6 * 3600};
    TimeOfDay day_end{23 * 3600};

    /// Throws ConfigError on an invalid or infeasible scenario.
    void validate() const;

    static ScenarioSpec from_file(const KeyValueFile& kv);
    static ScenarioSpec load(const std::string& path);
};

struct TruthRow {
    std::string user_id;
    Date date{};
    ChainTypeLabel label;
    int n_aps = 0;
};

struct SyntheticTower {
    std::string id;
    geo::GeoPoint location;
};

struct SyntheticPopulation {
    std::vector<StayRecord> records;  // user, date, start order
    std::vector<TruthRow> truth;      // user, date order
    std::vector<std::vector<SyntheticTower>> ap_towers;  // per layout AP
    std::vector<SyntheticTower> out_of_city_towers;
    CityDefinition::Ring city_ring;  // closed, encloses every in-city tower
};

/// Independent deterministic random stream for one user; `stream` separates
/// several streams of the same user.
std::mt19937_64 derive_seeded_stream(std::uint64_t seed, std::uint64_t user_index,
                                     std::uint64_t stream = 0);

/// Throws ConfigError when the scenario is invalid or the AP layout infeasible.
SyntheticPopulation generate_population(const ScenarioSpec& spec, unsigned workers = 1);

void write_ground_truth(std::ostream& out, const std::vector<TruthRow>& truth);
void write_city_geojson(std::ostream& out, const CityDefinition::Ring& ring);
void write_in_city_towers(std::ostream& out, const SyntheticPopulation& pop);

}  // namespace tripchain
