#include <doctest.h>

#include <map>
#include <set>

#include "gen.hpp"
#include "tripchain/chains.hpp"
#include "tripchain/errors.hpp"

using namespace tripchain;

namespace {

APVisit ap(int id, bool in_city = true) {
    APVisit v;
    v.ap_id = id;
    v.in_city = in_city;
    v.location = {127.0 + id * 0.01, 35.8};
    return v;
}
APVisit out() { return ap(90, false); }
APVisit star() { return ap(APVisit::kStarNode, false); }

std::string label_of(std::vector<APVisit> vs) { return canonicalize(vs).str(); }

DailyChain chain(const std::string& label) {
    DailyChain c;
    c.label = ChainTypeLabel(label);
    return c;
}

}  // namespace

TEST_SUITE("chains") {

TEST_CASE("anchor tokens") {
    CHECK(anchor_token(0) == "A");
    CHECK(anchor_token(25) == "Z");
    CHECK(anchor_token(26) == "AA");
    CHECK(anchor_token(27) == "AB");
    CHECK(anchor_token(26 + 26 * 26) == "AAA");
}

TEST_CASE("collapse out-of-city runs") {
    auto tokens = [](std::vector<APVisit> vs) {
        std::string s;
        for (const auto& v : collapse_out_of_city(vs)) s += v.is_star() ? "*" : std::to_string(v.ap_id);
        return s;
    };
    CHECK(tokens({out(), ap(91, false), ap(1), ap(2), out()}) == "*12*");
    CHECK(tokens({ap(1), out()}) == "1*");
    CHECK(tokens({out(), ap(91, false), out()}) == "*");
    CHECK(tokens({ap(1), out(), ap(2)}) == "1*2");
}

TEST_CASE("canonical labels") {
    CHECK(label_of({ap(7), ap(3), ap(7)}) == "A-B-A");
    CHECK(label_of({ap(2)}) == "A");
    CHECK(label_of({star(), ap(9), ap(4), star()}) == "*-A-B-*");
    CHECK(label_of({star()}) == "*");
    CHECK_THROWS_AS(canonicalize(std::vector<APVisit>{}), ValidationError);
    CHECK_THROWS_AS(label_of({ap(1), ap(1)}), ValidationError);
}

TEST_CASE("label grammar") {
    for (const char* ok : {"A", "A-B-A", "*-A-B-*", "*", "A-*-A", "A-B-C-D-E-F-G-H-I-J-K-L-M-N-O-P-Q-R-S-T-U-V-W-X-Y-Z-AA"}) {
        CHECK_MESSAGE(is_canonical_label(ok), ok);
    }
    for (const char* bad : {"", "B", "A-A", "A-C", "A--B", "-A", "A-", "a", "*-*", "A-B-D", "AA", "A-*-*"}) {
        CHECK_FALSE_MESSAGE(is_canonical_label(bad), bad);
        CHECK_THROWS(ChainTypeLabel(bad));
    }
    const ChainTypeLabel l("*-A-B-*");
    CHECK(l.tokens() == std::vector<std::string>{"*", "A", "B", "*"});
    CHECK(l.starts_with_star());
    CHECK(l.ends_with_star());
}

TEST_CASE("label grammar fuzzing") {
    gen::Gen g(101);
    const std::string alphabet = "AB*-C";
    for (int i = 0; i < 20000; ++i) {
        // Generated canonical labels are accepted and survive canonicalization.
        const auto good = g.canonical_label(8, 5, true);
        CHECK(is_canonical_label(good));
        std::vector<APVisit> vs;
        for (const auto& t : ChainTypeLabel(good).tokens()) {
            vs.push_back(t == "*" ? star() : ap(static_cast<int>(t[0] - 'A') * 7 + 3));
        }
        CHECK(canonicalize(vs).str() == good);

        // Random strings: accepted exactly when they re-canonicalize to themselves.
        std::string s;
        for (int k = g.integer(1, 9); k > 0; --k) s += alphabet[static_cast<std::size_t>(g.integer(0, 4))];
        if (is_canonical_label(s)) {
            std::vector<APVisit> ws;
            for (const auto& t : ChainTypeLabel(s).tokens()) ws.push_back(t == "*" ? star() : ap(t[0]));
            CHECK(canonicalize(ws).str() == s);
        }
    }
}

TEST_CASE("categories") {
    CHECK(classify_category(ChainTypeLabel("A-B-A")) == Category::C1);
    CHECK(classify_category(ChainTypeLabel("A-*-A")) == Category::C1);
    CHECK(classify_category(ChainTypeLabel("*-A-*")) == Category::C2);
    CHECK(classify_category(ChainTypeLabel("*")) == Category::C2);
    CHECK(classify_category(ChainTypeLabel("*-A")) == Category::C3);
    CHECK(classify_category(ChainTypeLabel("A-*")) == Category::C4);
    DailyChain intra = chain("A");
    intra.mode = ChainMode::intra_city;
    CHECK_THROWS_AS(classify_category(intra), ValidationError);
    CHECK(to_string(Category::C3) == "C3");
}

TEST_CASE("daily chains in both modes") {
    const Date d = *parse_date("2017-08-01");
    const std::vector<DayVisits> days{
        {"u1", d, {out(), ap(1), ap(2), out()}, true},
        {"u2", d, {ap(1), ap(2), ap(1)}, false},
        {"u3", d, {out(), ap(5), out()}, true},
        {"u4", d, {out(), ap(91, false)}, true},
    };
    const auto hybrid = build_daily_chains(days, ChainMode::hybrid);
    REQUIRE(hybrid.size() == 4);
    CHECK(hybrid[0].label.str() == "*-A-B-*");
    CHECK(hybrid[0].category == Category::C2);
    CHECK(hybrid[0].n_aps == 2);
    CHECK(hybrid[0].n_edges == 3);
    CHECK_FALSE(hybrid[0].avg_distance_km);
    CHECK(hybrid[3].label.str() == "*");
    CHECK(hybrid[3].is_pass_through());
    CHECK_FALSE(hybrid[3].degree);

    const auto intra = build_daily_chains(days, ChainMode::intra_city);
    REQUIRE(intra.size() == 1);
    CHECK(intra[0].user_id == "u2");
    CHECK(intra[0].label.str() == "A-B-A");
    CHECK(intra[0].n_aps == 2);
    CHECK(intra[0].n_edges == 2);
    CHECK(intra[0].degree == 1.0);
    CHECK_FALSE(intra[0].category);
    CHECK(build_daily_chains(days, ChainMode::hybrid, 8).size() == 4);
}

TEST_CASE("ranking with strict significance") {
    std::vector<DailyChain> cs;
    for (int i = 0; i < 60; ++i) cs.push_back(chain("A"));
    for (int i = 0; i < 30; ++i) cs.push_back(chain("A-B-A"));
    const char* singles[] = {"A-B", "A-B-C", "A-B-C-A", "A-B-A-B", "A-B-C-B", "A-B-C-D",
                             "A-B-A-C", "A-B-C-A-B", "A-B-C-D-A", "A-B-A-C-A"};
    for (const char* s : singles) cs.push_back(chain(s));
    const auto r = rank_chain_types(cs, 0.01);
    CHECK(r.total_chains == 100);
    CHECK(r.total_type_count == 12);
    CHECK(r.significant_labels() == std::vector<ChainTypeLabel>{ChainTypeLabel("A"), ChainTypeLabel("A-B-A")});
    CHECK(r.coverage_share == doctest::Approx(0.90));
    CHECK(r.types[0].share == doctest::Approx(0.6));
    CHECK(r.types[2].label.str() == "A-B");  // ties by label

    std::vector<DailyChain> same(7, chain("A-B-A"));
    const auto one = rank_chain_types(same, 0.01);
    CHECK(one.total_type_count == 1);
    CHECK(one.coverage_share == 1.0);
}

TEST_CASE("ranking counts sum to the chain total") {
    gen::Gen g(7);
    for (int round = 0; round < 100; ++round) {
        std::vector<DailyChain> cs;
        for (int i = g.integer(1, 400); i > 0; --i) cs.push_back(chain(g.canonical_label(5, 3, true)));
        const auto r = rank_chain_types(cs, g.real(0.001, 0.2));
        std::size_t sum = 0;
        double share = 0.0;
        for (std::size_t i = 0; i < r.types.size(); ++i) {
            sum += r.types[i].count;
            share += r.types[i].share;
            if (i) CHECK(r.types[i - 1].count >= r.types[i].count);
        }
        CHECK(sum == cs.size());
        CHECK(share == doctest::Approx(1.0));
        CHECK(r.coverage_share <= 1.0 + 1e-12);
    }
}

TEST_CASE("chain modes parse") {
    CHECK(parse_chain_mode("hybrid") == ChainMode::hybrid);
    CHECK(parse_chain_mode("intra") == ChainMode::intra_city);
    CHECK_FALSE(parse_chain_mode("both"));
}

}
