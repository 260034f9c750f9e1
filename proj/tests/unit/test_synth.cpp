#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "tripchain/city.hpp"
#include "tripchain/errors.hpp"
#include "tripchain/ingest.hpp"
#include "tripchain/pipeline.hpp"
#include "tripchain/synth.hpp"

using namespace tripchain;

namespace {

ScenarioSpec mixed(std::uint64_t seed, double ping_pong) {
    ScenarioSpec s;
    s.seed = seed;
    s.n_users = 300;
    s.days_per_user = {{3, 0.5}, {4, 0.5}};
    s.start_spread_days = 10;
    s.ping_pong_rate = ping_pong;
    for (auto [l, p] : std::vector<std::pair<const char*, double>>{
             {"A", 0.3}, {"A-B-A", 0.3}, {"A-B-C-A", 0.1}, {"*-A", 0.1}, {"A-*", 0.1}, {"*-A-B-*", 0.1}}) {
        s.mixture.emplace_back(ChainTypeLabel(l), p);
    }
    return s;
}

std::map<std::pair<std::string, Date>, std::string> recovered_labels(const SyntheticPopulation& pop) {
    StudyConfig cfg;
    CityDefinition::TowerSet towers;
    for (const auto& ts : pop.ap_towers) {
        for (const auto& t : ts) towers.insert(t.id);
    }
    const auto ing = run_ingest(cfg, pop.records, CityDefinition::from_towers("synthetic", towers), 4);
    const auto chains = run_chain_stage(run_anchor_stage(ing, cfg, 4), 4);
    std::map<std::pair<std::string, Date>, std::string> out;
    for (const auto& c : chains.hybrid) out[{c.user_id, c.date}] = c.label.str();
    return out;
}

std::string dump(const SyntheticPopulation& pop) {
    std::ostringstream out;
    write_stay_records(out, pop.records);
    write_ground_truth(out, pop.truth);
    return out.str();
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("derived streams") {
    auto a = derive_seeded_stream(42, 7), b = derive_seeded_stream(42, 7);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    auto c = derive_seeded_stream(42, 8), d = derive_seeded_stream(43, 7), f = derive_seeded_stream(42, 7, 1);
    auto e = derive_seeded_stream(42, 7);
    int same = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = e();
        same += (c() == x) + (d() == x) + (f() == x);
    }
    CHECK(same == 0);
}

TEST_CASE("generation is deterministic and worker independent") {
    const auto s = mixed(9, 0.2);
    const auto one = generate_population(s, 1);
    const auto again = generate_population(s, 1);
    const auto eight = generate_population(s, 8);
    CHECK(dump(one) == dump(again));
    CHECK(dump(one) == dump(eight));

    // No two users share a record sequence.
    std::set<std::string> seqs;
    std::map<std::string, std::string> by_user;
    for (const auto& r : one.records) {
        by_user[r.user_id] += r.tower_id + format_time(r.start) + format_time(r.end) + ";";
    }
    for (const auto& [u, seq] : by_user) seqs.insert(seq);
    CHECK(seqs.size() == by_user.size());
}

TEST_CASE("single-anchor mixture gives one AP per day") {
    ScenarioSpec s;
    s.n_users = 50;
    s.days_per_user = {{2, 1.0}};
    s.mixture.emplace_back(ChainTypeLabel("A"), 1.0);
    const auto pop = generate_population(s);
    for (const auto& t : pop.truth) CHECK(t.n_aps == 1);
    const auto labels = recovered_labels(pop);
    CHECK(labels.size() == 100);
    for (const auto& [k, l] : labels) CHECK(l == "A");
}

TEST_CASE("labels are recovered, with and without ping-pong") {
    for (double rate : {0.0, 0.3}) {
        const auto pop = generate_population(mixed(5, rate), 4);
        const auto labels = recovered_labels(pop);
        REQUIRE(labels.size() == pop.truth.size());
        std::size_t agree = 0;
        for (const auto& t : pop.truth) agree += labels.at({t.user_id, t.date}) == t.label.str();
        CHECK(agree == pop.truth.size());
    }
}

TEST_CASE("ping-pong leaves labels unchanged against the rate-zero run") {
    const auto clean = generate_population(mixed(77, 0.0));
    const auto noisy = generate_population(mixed(77, 0.3));
    CHECK(noisy.records.size() > clean.records.size());
    REQUIRE(clean.truth.size() == noisy.truth.size());
    for (std::size_t i = 0; i < clean.truth.size(); ++i) CHECK(clean.truth[i].label == noisy.truth[i].label);
    CHECK(recovered_labels(clean) == recovered_labels(noisy));
}

TEST_CASE("synthetic city encloses in-city towers only") {
    const auto pop = generate_population(mixed(3, 0.0));
    const auto city = CityDefinition::from_polygon("synthetic", pop.city_ring);
    for (const auto& ts : pop.ap_towers) {
        for (const auto& t : ts) CHECK(city.contains(t.id, t.location));
    }
    for (const auto& t : pop.out_of_city_towers) CHECK_FALSE(city.contains(t.id, t.location));
}

TEST_CASE("scenario validation") {
    ScenarioSpec s;
    CHECK_THROWS_AS(generate_population(s), ConfigError);  // empty mixture
    s.mixture.emplace_back(ChainTypeLabel("A"), 0.5);
    CHECK_THROWS_AS(s.validate(), ConfigError);  // does not sum to 1
    s.mixture[0].second = 1.0;
    CHECK_NOTHROW(s.validate());
    s.ap_spacing_m = 900;  // not > 2 * 500
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.ap_spacing_m = 1500;
    s.layout_rows = s.layout_cols = 1;
    s.mixture[0].first = ChainTypeLabel("A-B-A");
    CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("scenario files") {
    std::istringstream in(
        "seed = 11\nn_users = 20\ndays_per_user = 2:0.5,3:0.5\nping_pong_rate = 0.1\n"
        "[mixture]\nA 0.5\nA-B-A 0.5\n"
        "[markov]\nA A-B-A\nA 0.9 0.1\nA-B-A 0.2 0.8\n");
    const auto s = ScenarioSpec::from_file(KeyValueFile::parse(in));
    CHECK(s.seed == 11);
    CHECK(s.n_users == 20);
    CHECK(s.days_per_user.size() == 2);
    REQUIRE(s.markov);
    CHECK(s.markov->rows[1][1] == 0.8);
    CHECK_NOTHROW(s.validate());

    std::istringstream bad("colour = blue\n");
    CHECK_THROWS_AS(ScenarioSpec::from_file(KeyValueFile::parse(bad)), ConfigError);
}

}
