#include "tripchain/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "tripchain/errors.hpp"
#include "tripchain/parallel.hpp"

namespace tripchain {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double parse_number(const std::string& key, std::string_view v) {
    while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
    while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError(fmt::format("scenario key '{}': not a number: '{}'", key, v));
    }
    return out;
}

geo::GeoPoint parse_point(const std::string& key, const std::string& v) {
    const auto comma = v.find(',');
    if (comma == std::string::npos) {
        throw ConfigError("scenario key '" + key + "': expected 'lon,lat'");
    }
    return {parse_number(key, std::string_view(v).substr(0, comma)),
            parse_number(key, std::string_view(v).substr(comma + 1))};
}

std::vector<std::string> words(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string w;
    while (ss >> w) out.push_back(w);
    return out;
}

double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

struct Layout {
    std::vector<std::vector<SyntheticTower>> ap_towers;
    std::vector<SyntheticTower> out_towers;
};

Layout build_layout(const ScenarioSpec& spec) {
    std::vector<geo::GeoPoint> centers = spec.ap_centers;
    if (centers.empty()) {
        for (int r = 0; r < spec.layout_rows; ++r) {
            for (int c = 0; c < spec.layout_cols; ++c) {
                const geo::PlanarPoint xy{(c - (spec.layout_cols - 1) / 2.0) * spec.ap_spacing_m,
                                          (r - (spec.layout_rows - 1) / 2.0) * spec.ap_spacing_m};
                centers.push_back(geo::local_unproject(spec.city_center, xy));
            }
        }
    }
    Layout out;
    for (std::size_t a = 0; a < centers.size(); ++a) {
        std::vector<SyntheticTower> towers;
        for (int k = 0; k < spec.towers_per_ap; ++k) {
            const double angle = 2.0 * std::numbers::pi * k / spec.towers_per_ap + 0.7 * a;
            const double radius = k == 0 ? 0.0 : spec.tower_offset_m;
            const geo::PlanarPoint off{radius * std::cos(angle), radius * std::sin(angle)};
            towers.push_back({fmt::format("T{:04d}_{}", a + 1, k), geo::local_unproject(centers[a], off)});
        }
        out.ap_towers.push_back(std::move(towers));
    }
    for (int k = 0; k < 3; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / 3.0;
        const geo::PlanarPoint off{200.0 * std::cos(angle), 200.0 * std::sin(angle)};
        out.out_towers.push_back(
            {fmt::format("X_{}", k), geo::local_unproject(spec.out_of_city_anchor, off)});
    }
    return out;
}

CityDefinition::Ring city_ring_for(const Layout& layout, double pad_m) {
    double min_lon = 180, max_lon = -180, min_lat = 90, max_lat = -90;
    for (const auto& ts : layout.ap_towers) {
        for (const auto& t : ts) {
            min_lon = std::min(min_lon, t.location.lon);
            max_lon = std::max(max_lon, t.location.lon);
            min_lat = std::min(min_lat, t.location.lat);
            max_lat = std::max(max_lat, t.location.lat);
        }
    }
    const geo::GeoPoint c{(min_lon + max_lon) / 2, (min_lat + max_lat) / 2};
    const double dlat = pad_m / geo::kEarthRadiusM * 180.0 / std::numbers::pi;
    const double dlon = dlat / std::cos(c.lat * std::numbers::pi / 180.0);
    min_lon -= dlon;
    max_lon += dlon;
    min_lat -= dlat;
    max_lat += dlat;
    return {{min_lon, min_lat}, {max_lon, min_lat}, {max_lon, max_lat}, {min_lon, max_lat},
            {min_lon, min_lat}};
}

}  // namespace

std::mt19937_64 derive_seeded_stream(std::uint64_t seed, std::uint64_t user_index, std::uint64_t stream) {
    const std::uint64_t a = splitmix64(seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(user_index + 0x632be59bd9b4e019ULL) ^
                                       (stream * 0x9e3779b97f4a7c15ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

void ScenarioSpec::validate() const {
    if (n_users == 0) throw ConfigError("scenario needs n_users >= 1");
    if (mixture.empty()) throw ConfigError("scenario mixture is empty");
    std::vector<double> w;
    for (const auto& [label, p] : mixture) {
        if (p < 0.0) throw ConfigError("mixture probability for " + label.str() + " is negative");
        w.push_back(p);
    }
    if (std::abs(sum_of(w) - 1.0) > 1e-9) throw ConfigError("mixture probabilities must sum to 1");
    if (days_per_user.empty()) throw ConfigError("days_per_user is empty");
    std::vector<double> dw;
    for (const auto& [d, p] : days_per_user) {
        if (d < 1 || p < 0.0) throw ConfigError("days_per_user entries must be day>=1, p>=0");
        dw.push_back(p);
    }
    if (std::abs(sum_of(dw) - 1.0) > 1e-9) throw ConfigError("days_per_user must sum to 1");
    if (start_spread_days < 0) throw ConfigError("start_spread_days must be >= 0");
    if (!(ping_pong_rate >= 0.0 && ping_pong_rate <= 1.0)) {
        throw ConfigError("ping_pong_rate must be in [0, 1]");
    }
    if (!(day_start < day_end)) throw ConfigError("day_start must precede day_end");
    if (towers_per_ap < 1) throw ConfigError("towers_per_ap must be >= 1");
    if (!(roaming_distance_m > 0.0)) throw ConfigError("roaming_distance_m must be > 0");
    if (!(tower_offset_m >= 0.0 && tower_offset_m < roaming_distance_m / 2.0)) {
        throw ConfigError("infeasible layout: tower_offset_m must be < roaming_distance_m / 2");
    }
    if (markov) {
        const std::size_t k = markov->states.size();
        if (k == 0 || markov->rows.size() != k) throw ConfigError("markov matrix shape mismatch");
        for (const auto& row : markov->rows) {
            if (row.size() != k) throw ConfigError("markov matrix shape mismatch");
            if (std::any_of(row.begin(), row.end(), [](double p) { return p < 0.0; }) ||
                std::abs(sum_of(row) - 1.0) > 1e-9) {
                throw ConfigError("markov rows must be non-negative and sum to 1");
            }
        }
        for (const auto& [label, p] : mixture) {
            if (p > 0.0 && std::find(markov->states.begin(), markov->states.end(), label) ==
                               markov->states.end()) {
                throw ConfigError("mixture label " + label.str() + " is not a markov state");
            }
        }
    }

    std::vector<geo::GeoPoint> centers = ap_centers;
    if (centers.empty()) {
        if (layout_rows < 1 || layout_cols < 1) throw ConfigError("layout needs rows, cols >= 1");
        if (!(ap_spacing_m > 2.0 * roaming_distance_m)) {
            throw ConfigError("infeasible layout: ap_spacing_m must exceed 2 * roaming_distance_m");
        }
    }
    const Layout layout = build_layout(*this);
    for (std::size_t i = 0; i < layout.ap_towers.size(); ++i) {
        for (std::size_t j = i + 1; j < layout.ap_towers.size(); ++j) {
            const double d = geo::haversine_m(layout.ap_towers[i][0].location,
                                              layout.ap_towers[j][0].location);
            if (!(d > 2.0 * roaming_distance_m)) {
                throw ConfigError(fmt::format(
                    "infeasible layout: AP centers {} and {} are {:.1f} m apart (need > {:.1f} m)",
                    i + 1, j + 1, d, 2.0 * roaming_distance_m));
            }
        }
    }
    std::size_t letters = 0;
    auto count_letters = [](const ChainTypeLabel& l) {
        std::set<std::string> s;
        for (const auto& t : l.tokens()) {
            if (t != "*") s.insert(t);
        }
        return s.size();
    };
    for (const auto& [label, p] : mixture) letters = std::max(letters, count_letters(label));
    if (markov) {
        for (const auto& l : markov->states) letters = std::max(letters, count_letters(l));
    }
    if (letters > layout.ap_towers.size()) {
        throw ConfigError("layout has fewer anchor points than the largest chain label needs");
    }
    const auto ring = city_ring_for(layout, std::max(ap_spacing_m / 2.0, 2.0 * roaming_distance_m));
    for (const auto& t : layout.out_towers) {
        if (ring_contains(ring, t.location)) {
            throw ConfigError("out_of_city_anchor lies inside the synthetic city boundary");
        }
    }
}

ScenarioSpec ScenarioSpec::from_file(const KeyValueFile& kv) {
    ScenarioSpec s;
    for (const auto& [k, v] : kv.entries) {
        if (k == "seed") s.seed = static_cast<std::uint64_t>(parse_number(k, v));
        else if (k == "n_users") s.n_users = static_cast<std::size_t>(parse_number(k, v));
        else if (k == "days_per_user") {
            s.days_per_user.clear();
            std::stringstream ss(v);
            std::string part;
            while (std::getline(ss, part, ',')) {
                const auto colon = part.find(':');
                if (colon == std::string::npos) {
                    s.days_per_user[static_cast<int>(parse_number(k, part))] = 1.0;
                } else {
                    s.days_per_user[static_cast<int>(parse_number(k, part.substr(0, colon)))] =
                        parse_number(k, part.substr(colon + 1));
                }
            }
        } else if (k == "start_date") {
            const auto d = parse_date(v);
            if (!d) throw ConfigError("scenario key 'start_date': bad date");
            s.start_date = *d;
        } else if (k == "start_spread_days") s.start_spread_days = static_cast<int>(parse_number(k, v));
        else if (k == "city_center") s.city_center = parse_point(k, v);
        else if (k == "layout_rows") s.layout_rows = static_cast<int>(parse_number(k, v));
        else if (k == "layout_cols") s.layout_cols = static_cast<int>(parse_number(k, v));
        else if (k == "ap_spacing_m") s.ap_spacing_m = parse_number(k, v);
        else if (k == "towers_per_ap") s.towers_per_ap = static_cast<int>(parse_number(k, v));
        else if (k == "tower_offset_m") s.tower_offset_m = parse_number(k, v);
        else if (k == "roaming_distance_m") s.roaming_distance_m = parse_number(k, v);
        else if (k == "ping_pong_rate") s.ping_pong_rate = parse_number(k, v);
        else if (k == "out_of_city_anchor") s.out_of_city_anchor = parse_point(k, v);
        else if (k == "day_start" || k == "day_end") {
            const auto t = parse_time(v);
            if (!t) throw ConfigError("scenario key '" + k + "': bad time");
            (k == "day_start" ? s.day_start : s.day_end) = *t;
        } else {
            throw ConfigError("unknown scenario key '" + k + "'");
        }
    }
    if (auto it = kv.sections.find("mixture"); it != kv.sections.end()) {
        for (const auto& line : it->second) {
            const auto w = words(line);
            if (w.size() != 2) throw ConfigError("mixture lines must be '<label> <probability>'");
            s.mixture.emplace_back(ChainTypeLabel(w[0]), parse_number("mixture", w[1]));
        }
    }
    if (auto it = kv.sections.find("markov"); it != kv.sections.end() && !it->second.empty()) {
        MarkovSpec m;
        for (const auto& l : words(it->second.front())) m.states.emplace_back(l);
        for (std::size_t i = 1; i < it->second.size(); ++i) {
            const auto w = words(it->second[i]);
            if (w.size() != m.states.size() + 1 || ChainTypeLabel(w[0]) != m.states[i - 1]) {
                throw ConfigError("markov row " + std::to_string(i) +
                                  " must be '<label> p1 .. pk' in header order");
            }
            std::vector<double> row;
            for (std::size_t j = 1; j < w.size(); ++j) row.push_back(parse_number("markov", w[j]));
            m.rows.push_back(std::move(row));
        }
        s.markov = std::move(m);
    }
    if (auto it = kv.sections.find("ap_centers"); it != kv.sections.end()) {
        for (const auto& line : it->second) {
            const auto w = words(line);
            if (w.size() != 2) throw ConfigError("ap_centers lines must be '<lon> <lat>'");
            s.ap_centers.push_back({parse_number("ap_centers", w[0]), parse_number("ap_centers", w[1])});
        }
    }
    return s;
}

ScenarioSpec ScenarioSpec::load(const std::string& path) {
    return from_file(KeyValueFile::load(path));
}

SyntheticPopulation generate_population(const ScenarioSpec& spec, unsigned workers) {
    spec.validate();
    const Layout layout = build_layout(spec);

    std::vector<double> mix_w;
    for (const auto& [l, p] : spec.mixture) mix_w.push_back(p);
    std::vector<int> day_values;
    std::vector<double> day_w;
    for (const auto& [d, p] : spec.days_per_user) {
        day_values.push_back(d);
        day_w.push_back(p);
    }
    // Markov state index for each mixture entry, and the row distributions.
    std::vector<std::size_t> mix_to_state;
    std::vector<std::vector<double>> markov_rows;
    if (spec.markov) {
        for (const auto& [l, p] : spec.mixture) {
            mix_to_state.push_back(static_cast<std::size_t>(
                std::find(spec.markov->states.begin(), spec.markov->states.end(), l) -
                spec.markov->states.begin()));
        }
        markov_rows = spec.markov->rows;
    }

    struct UserOut {
        std::vector<StayRecord> records;
        std::vector<TruthRow> truth;
    };
    std::vector<UserOut> users(spec.n_users);
    const std::size_t n_aps = layout.ap_towers.size();
    const auto day_len = (spec.day_end - spec.day_start).count();

    parallel_for(spec.n_users, workers, [&](std::size_t u) {
        // Structure (days, labels, anchor choice) and record noise draw from
        // separate streams, so the noise settings never change the labels.
        auto rng = derive_seeded_stream(spec.seed, u, 0);
        auto noise = derive_seeded_stream(spec.seed, u, 1);
        std::discrete_distribution<std::size_t> pick_mix(mix_w.begin(), mix_w.end());
        std::discrete_distribution<std::size_t> pick_days(day_w.begin(), day_w.end());
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        UserOut& out = users[u];
        const std::string user_id = fmt::format("u{:07d}", u);
        const int n_days = day_values[pick_days(rng)];
        const Date first = spec.start_date +
                           std::chrono::days{std::uniform_int_distribution<int>(0, spec.start_spread_days)(rng)};

        std::optional<std::size_t> state;
        for (int d = 0; d < n_days; ++d) {
            ChainTypeLabel label;
            if (spec.markov && state) {
                const auto& row = markov_rows[*state];
                state = std::discrete_distribution<std::size_t>(row.begin(), row.end())(rng);
                label = spec.markov->states[*state];
            } else {
                const std::size_t m = pick_mix(rng);
                label = spec.mixture[m].first;
                if (spec.markov) state = mix_to_state[m];
            }

            const auto tokens = label.tokens();
            std::vector<std::size_t> ap_pool(n_aps);
            std::iota(ap_pool.begin(), ap_pool.end(), 0);
            std::map<std::string, std::size_t> letter_ap;
            std::size_t taken = 0;
            for (const auto& t : tokens) {
                if (t == "*" || letter_ap.count(t)) continue;
                const std::size_t j = std::uniform_int_distribution<std::size_t>(taken, n_aps - 1)(rng);
                std::swap(ap_pool[taken], ap_pool[j]);
                letter_ap[t] = ap_pool[taken++];
            }

            const Date date = first + std::chrono::days{d};
            const auto slot = day_len / static_cast<long>(tokens.size());
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                std::uniform_int_distribution<long> jitter(0, slot / 5);
                const long s = spec.day_start.count() + static_cast<long>(i) * slot + jitter(noise);
                const long e = spec.day_start.count() + static_cast<long>(i + 1) * slot - 1 - jitter(noise);
                const auto& towers = tokens[i] == "*" ? layout.out_towers
                                                      : layout.ap_towers[letter_ap[tokens[i]]];
                const std::size_t t0 = std::uniform_int_distribution<std::size_t>(0, towers.size() - 1)(noise);
                int pieces = 1;
                std::size_t t1 = t0;
                if (towers.size() > 1 && unit(noise) < spec.ping_pong_rate) {
                    pieces = std::uniform_int_distribution<int>(2, 4)(noise);
                    t1 = (t0 + 1 + std::uniform_int_distribution<std::size_t>(0, towers.size() - 2)(noise)) %
                         towers.size();
                }
                for (int p = 0; p < pieces; ++p) {
                    const auto& tw = towers[p % 2 == 0 ? t0 : t1];
                    StayRecord r;
                    r.user_id = user_id;
                    r.date = date;
                    r.start = TimeOfDay{s + (e - s) * p / pieces};
                    r.end = TimeOfDay{s + (e - s) * (p + 1) / pieces};
                    r.location = tw.location;
                    r.tower_id = tw.id;
                    out.records.push_back(std::move(r));
                }
            }
            std::set<std::string> letters;
            for (const auto& t : tokens) {
                if (t != "*") letters.insert(t);
            }
            out.truth.push_back({user_id, date, label, static_cast<int>(letters.size())});
        }
    });

    SyntheticPopulation pop;
    std::size_t n_records = 0, n_truth = 0;
    for (const auto& u : users) {
        n_records += u.records.size();
        n_truth += u.truth.size();
    }
    pop.records.reserve(n_records);
    pop.truth.reserve(n_truth);
    for (auto& u : users) {
        std::move(u.records.begin(), u.records.end(), std::back_inserter(pop.records));
        std::move(u.truth.begin(), u.truth.end(), std::back_inserter(pop.truth));
    }
    pop.ap_towers = layout.ap_towers;
    pop.out_of_city_towers = layout.out_towers;
    pop.city_ring = city_ring_for(layout, std::max(spec.ap_spacing_m / 2.0, 2.0 * spec.roaming_distance_m));
    return pop;
}

void write_ground_truth(std::ostream& out, const std::vector<TruthRow>& truth) {
    out << "user_id,date,true_label,true_n\n";
    for (const auto& t : truth) {
        out << t.user_id << ',' << format_date(t.date) << ',' << t.label.str() << ',' << t.n_aps << '\n';
    }
}

void write_city_geojson(std::ostream& out, const CityDefinition::Ring& ring) {
    out << R"({"type":"Polygon","coordinates":[[)";
    for (std::size_t i = 0; i < ring.size(); ++i) {
        if (i) out << ',';
        out << fmt::format("[{},{}]", ring[i].lon, ring[i].lat);
    }
    out << "]]}\n";
}

void write_in_city_towers(std::ostream& out, const SyntheticPopulation& pop) {
    for (const auto& ts : pop.ap_towers) {
        for (const auto& t : ts) out << t.id << '\n';
    }
}

}  // namespace tripchain
