#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "tmp.hpp"
#include "tripchain/errors.hpp"
#include "tripchain/pipeline.hpp"
#include "tripchain/synth.hpp"

using namespace tripchain;

namespace {

ScenarioSpec scenario() {
    ScenarioSpec s;
    s.seed = 21;
    s.n_users = 120;
    s.days_per_user = {{1, 0.2}, {4, 0.8}};
    s.ping_pong_rate = 0.2;
    for (auto [l, p] : std::vector<std::pair<const char*, double>>{
             {"A", 0.35}, {"A-B-A", 0.35}, {"A-B-C-A", 0.1}, {"*-A", 0.1}, {"A-*-A", 0.1}}) {
        s.mixture.emplace_back(ChainTypeLabel(l), p);
    }
    return s;
}

PipelineInputs materialize(const gen::TempDir& dir, const SyntheticPopulation& pop) {
    std::ofstream rec(dir.file("records.csv"));
    write_stay_records(rec, pop.records);
    std::ofstream city(dir.file("city.geojson"));
    write_city_geojson(city, pop.city_ring);
    return {dir.file("records.csv"), dir.file("city.geojson")};
}

std::map<std::string, std::string> tree(const std::string& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        files[e.path().filename().string()] = gen::slurp(e.path().string());
    }
    return files;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("manifest counts match the generator") {
    gen::TempDir dir;
    const auto pop = generate_population(scenario(), 4);
    const auto inputs = materialize(dir, pop);
    const auto m = run_pipeline(StudyConfig{}, inputs, dir.file("out"), 4);

    std::size_t intra = 0;
    std::set<std::string> users;
    for (const auto& t : pop.truth) {
        intra += t.label.str().find('*') == std::string::npos;
        users.insert(t.user_id);
    }
    CHECK(m.count("records_parsed") == pop.records.size());
    CHECK(m.count("users_total") == users.size());
    CHECK(m.count("users_gap_excluded") == 0);
    CHECK(m.count("user_days") == pop.truth.size());
    CHECK(m.count("chains_hybrid") == pop.truth.size());
    CHECK(m.count("chains_intra") == intra);
    CHECK(m.count("pass_through_days") == 0);
    CHECK(m.count("types_hybrid") == 5);

    for (const char* f : {"anchors.csv", "chains_hybrid.csv", "chains_intra.csv", "ranking_intra.csv",
                          "transitions_prob.csv", "transitions_n_prob.csv", "metrics_degree.csv",
                          "ap_count_pmf.csv", "fit.txt", "hotspot.asc", "hotspot_georef.txt",
                          "manifest.txt"}) {
        CHECK_MESSAGE(std::filesystem::exists(dir.file("out/") + f), f);
    }
    const auto manifest = gen::slurp(dir.file("out/manifest.txt"));
    CHECK(manifest.find("output.fit.txt.sha256 = " + sha256_file(dir.file("out/fit.txt"))) != std::string::npos);
    CHECK(manifest.find("input.records.sha256 = " + sha256_file(inputs.records_path)) != std::string::npos);
}

TEST_CASE("reruns and worker counts give identical bytes") {
    gen::TempDir dir;
    const auto inputs = materialize(dir, generate_population(scenario()));
    run_pipeline(StudyConfig{}, inputs, dir.file("a"), 1);
    run_pipeline(StudyConfig{}, inputs, dir.file("b"), 1);
    run_pipeline(StudyConfig{}, inputs, dir.file("c"), 8);
    const auto a = tree(dir.file("a"));
    CHECK(a.size() >= 19);
    CHECK(a == tree(dir.file("b")));
    CHECK(a == tree(dir.file("c")));
}

TEST_CASE("gap-day users are excluded unless asked for") {
    const auto pop = generate_population(scenario());
    // Drop the second day of the first user with four days.
    std::string victim;
    std::map<std::string, int> days;
    for (const auto& t : pop.truth) ++days[t.user_id];
    for (const auto& [u, n] : days) {
        if (n == 4) {
            victim = u;
            break;
        }
    }
    REQUIRE_FALSE(victim.empty());
    Date second{};
    for (const auto& t : pop.truth) {
        if (t.user_id == victim) {
            second = t.date + std::chrono::days{1};
            break;
        }
    }
    std::vector<StayRecord> records;
    for (const auto& r : pop.records) {
        if (!(r.user_id == victim && r.date == second)) records.push_back(r);
    }
    const auto city = CityDefinition::from_polygon("synthetic", pop.city_ring);
    StudyConfig cfg;
    const auto ing = run_ingest(cfg, records, city, 2);
    CHECK(ing.users_gap_excluded == 1);
    CHECK(ing.users_kept == days.size() - 1);
    cfg.include_gap_day_users = true;
    CHECK(run_ingest(cfg, records, city, 2).users_gap_excluded == 0);
}

TEST_CASE("per-user-day clustering scope") {
    const auto pop = generate_population(scenario());
    const auto city = CityDefinition::from_polygon("synthetic", pop.city_ring);
    StudyConfig cfg;
    cfg.cluster_scope = ClusterScope::per_user_day;
    const auto ing = run_ingest(cfg, pop.records, city, 2);
    const auto anchors = run_anchor_stage(ing, cfg, 2);
    CHECK(anchors.scopes.size() == pop.truth.size());
    const auto chains = run_chain_stage(anchors, 2);
    REQUIRE(chains.hybrid.size() == pop.truth.size());
    for (std::size_t i = 0; i < pop.truth.size(); ++i) CHECK(chains.hybrid[i].label == pop.truth[i].label);
}

TEST_CASE("empty and broken inputs") {
    gen::TempDir dir;
    const auto city = dir.write("city.txt", "T1\n");
    const auto empty = dir.write("empty.csv", "");
    CHECK_THROWS_AS(run_pipeline(StudyConfig{}, {empty, city}, dir.file("out")), Error);
    const auto overlap = dir.write("overlap.csv",
                                   "user_id,date,start_time,end_time,lon,lat,tower_id\n"
                                   "u,2017-08-01,08:00:00,10:00:00,127.1,35.8,T1\n"
                                   "u,2017-08-01,09:00:00,11:00:00,127.2,35.8,T2\n");
    CHECK_THROWS_AS(run_pipeline(StudyConfig{}, {overlap, city}, dir.file("out")), Error);
}

TEST_CASE("thin data skips stages with notes") {
    gen::TempDir dir;
    const auto city = dir.write("city.txt", "T1\n");
    const auto one = dir.write("one.csv",
                               "user_id,date,start_time,end_time,lon,lat,tower_id\n"
                               "u,2017-08-01,08:00:00,10:00:00,127.1,35.8,T1\n");
    const auto m = run_pipeline(StudyConfig{}, {one, city}, dir.file("out"));
    CHECK(m.count("chains_intra") == 1);
    CHECK(m.count("transition_pairs") == 0);
    CHECK(m.notes.size() >= 2);
    CHECK(std::filesystem::exists(dir.file("out/hotspot.asc")));
    CHECK_FALSE(std::filesystem::exists(dir.file("out/fit.txt")));
}

}
