#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

#include "tmp.hpp"

namespace {

struct Result {
    int code = -1;
    std::string output;
};

Result cli(const std::string& args) {
    const std::string cmd = std::string(TRIPCHAIN_CLI_PATH) + " " + args + " 2>&1";
    Result r;
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.output.append(buf.data(), n);
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

const std::string kScenario = std::string(TRIPCHAIN_SCENARIO_DIR) + "/demo.txt";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 2") {
    CHECK(cli("").code == 2);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("run --input x").code == 2);
    CHECK(cli("synth --scenario " + kScenario + " --out /tmp --bogus-flag").code == 2);
    CHECK(cli("chains --mode sideways --input " + kScenario + " --city " + kScenario + " --out /tmp").code == 2);
}

TEST_CASE("help and version exit 0") {
    const auto h = cli("--help");
    CHECK(h.code == 0);
    CHECK(h.output.find("synth") != std::string::npos);
    CHECK(cli("run --help").code == 0);
    CHECK(cli("--version").output.find("1.0.0") != std::string::npos);
}

TEST_CASE("data errors exit 1") {
    gen::TempDir dir;
    const auto empty = dir.write("empty.csv", "");
    const auto city = dir.write("city.txt", "T1\n");
    const auto r = cli("run --input " + empty + " --city " + city + " --out " + dir.file("out"));
    CHECK(r.code == 1);
    CHECK(r.output.find("error:") != std::string::npos);
    const auto bad_set = cli("run --input " + empty + " --city " + city + " --out " + dir.file("out") +
                             " --set roaming_distance_m=-5");
    CHECK(bad_set.code == 1);
}

TEST_CASE("synth, run and stage commands") {
    gen::TempDir dir;
    const auto d = dir.path.string();
    REQUIRE(cli("synth --scenario " + kScenario + " --out " + d + "/syn --users 60 --workers 3").code == 0);
    for (const char* f : {"records.csv", "truth.csv", "city.geojson", "city_towers.txt"}) {
        CHECK(std::filesystem::exists(d + "/syn/" + f));
    }
    const std::string in = " --input " + d + "/syn/records.csv --city " + d + "/syn/city.geojson";
    CHECK(cli("run" + in + " --out " + d + "/run --workers 4").code == 0);
    CHECK(std::filesystem::exists(d + "/run/manifest.txt"));

    // Tower-list city definition gives the same chains as the polygon.
    CHECK(cli("chains --input " + d + "/syn/records.csv --city " + d + "/syn/city_towers.txt --out " + d + "/towers").code == 0);
    CHECK(gen::slurp(d + "/towers/chains_hybrid.csv") == gen::slurp(d + "/run/chains_hybrid.csv"));

    CHECK(cli("ingest" + in + " --out " + d + "/ing").code == 0);
    CHECK(gen::slurp(d + "/ing/ingest_summary.txt").find("users_total = 60") != std::string::npos);
    CHECK(cli("anchors" + in + " --out " + d + "/anc").code == 0);
    CHECK(gen::slurp(d + "/anc/anchors.csv") == gen::slurp(d + "/run/anchors.csv"));

    const auto rank = cli("rank --mode intra --threshold 0.01" + in + " --out " + d + "/rank");
    CHECK(rank.code == 0);
    CHECK(gen::slurp(d + "/rank/ranking_intra.csv") == gen::slurp(d + "/run/ranking_intra.csv"));
    CHECK_FALSE(std::filesystem::exists(d + "/rank/ranking_hybrid.csv"));

    CHECK(cli("transitions" + in + " --out " + d + "/tr").code == 0);
    CHECK(gen::slurp(d + "/tr/transitions_prob.csv") == gen::slurp(d + "/run/transitions_prob.csv"));
    CHECK(cli("metrics" + in + " --out " + d + "/met").code == 0);
    CHECK(gen::slurp(d + "/met/ap_count_pmf.csv") == gen::slurp(d + "/run/ap_count_pmf.csv"));
    CHECK(cli("hotspot" + in + " --out " + d + "/hot --kde-radius 1500").code == 0);
    CHECK(gen::slurp(d + "/hot/hotspot.asc").rfind("ncols ", 0) == 0);

    const auto fit = cli("fit --input " + d + "/run/ap_count_pmf.csv");
    CHECK(fit.code == 0);
    CHECK(fit.output == gen::slurp(d + "/run/fit.txt"));
}

TEST_CASE("config file and overrides") {
    gen::TempDir dir;
    const auto d = dir.path.string();
    REQUIRE(cli("synth --scenario " + kScenario + " --out " + d + "/syn --users 30").code == 0);
    const auto cfg = dir.write("study.cfg", "roaming_distance_m = 400\nkde_radius_m = 2000\n");
    const std::string in = " --input " + d + "/syn/records.csv --city " + d + "/syn/city.geojson";
    REQUIRE(cli("run --config " + cfg + " --set significance_share=0.05" + in + " --out " + d + "/run").code == 0);
    const auto manifest = gen::slurp(d + "/run/manifest.txt");
    CHECK(manifest.find("config.roaming_distance_m = 400.000000") != std::string::npos);
    CHECK(manifest.find("config.kde_radius_m = 2000.000000") != std::string::npos);
    CHECK(manifest.find("config.significance_share = 0.050000") != std::string::npos);
}

}
