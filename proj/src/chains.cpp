#include "tripchain/chains.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tripchain/errors.hpp"
#include "tripchain/parallel.hpp"
#include "tripchain/stats.hpp"

namespace tripchain {

std::string_view to_string(ChainMode m) noexcept {
    return m == ChainMode::hybrid ? "hybrid" : "intra";
}

std::string_view to_string(Category c) noexcept {
    switch (c) {
        case Category::C1: return "C1";
        case Category::C2: return "C2";
        case Category::C3: return "C3";
        case Category::C4: return "C4";
    }
    return "?";
}

std::optional<ChainMode> parse_chain_mode(std::string_view s) noexcept {
    if (s == "hybrid") return ChainMode::hybrid;
    if (s == "intra" || s == "intra_city") return ChainMode::intra_city;
    return std::nullopt;
}

std::string anchor_token(std::size_t k) {
    std::string out;
    ++k;
    while (k > 0) {
        --k;
        out.insert(out.begin(), static_cast<char>('A' + k % 26));
        k /= 26;
    }
    return out;
}

namespace {

std::vector<std::string> split_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (;;) {
        const auto dash = text.find('-', pos);
        out.emplace_back(text.substr(pos, dash == std::string_view::npos ? dash : dash - pos));
        if (dash == std::string_view::npos) return out;
        pos = dash + 1;
    }
}

}  // namespace

bool is_canonical_label(std::string_view text) {
    if (text.empty()) return false;
    std::set<std::string> seen;
    std::size_t next = 0;
    std::string prev;
    for (const auto& tok : split_tokens(text)) {
        if (tok.empty() || tok == prev) return false;
        if (tok != "*") {
            if (!std::all_of(tok.begin(), tok.end(), [](char c) { return c >= 'A' && c <= 'Z'; })) {
                return false;
            }
            if (!seen.count(tok)) {
                if (tok != anchor_token(next)) return false;
                seen.insert(tok);
                ++next;
            }
        }
        prev = tok;
    }
    return true;
}

ChainTypeLabel::ChainTypeLabel(std::string text) : text_(std::move(text)) {
    if (!is_canonical_label(text_)) throw ValidationError("not a canonical chain label: '" + text_ + "'");
}

std::vector<std::string> ChainTypeLabel::tokens() const { return split_tokens(text_); }

std::vector<APVisit> collapse_out_of_city(std::span<const APVisit> visits) {
    std::vector<APVisit> out;
    for (const auto& v : visits) {
        if (v.in_city && !v.is_star()) {
            out.push_back(v);
            continue;
        }
        if (!out.empty() && out.back().is_star()) {
            out.back().end = std::max(out.back().end, v.end);
            continue;
        }
        APVisit star = v;
        star.ap_id = APVisit::kStarNode;
        star.in_city = false;
        star.location = {};
        out.push_back(star);
    }
    return out;
}

ChainTypeLabel canonicalize(std::span<const APVisit> visits) {
    if (visits.empty()) throw ValidationError("cannot canonicalize an empty visit sequence");
    std::map<int, std::size_t> names;
    std::string text;
    for (std::size_t i = 0; i < visits.size(); ++i) {
        const auto& v = visits[i];
        if (i > 0 && visits[i - 1].ap_id == v.ap_id) {
            throw ValidationError("consecutive visits to the same node must be merged first");
        }
        if (i > 0) text += '-';
        if (v.is_star()) {
            text += '*';
            continue;
        }
        const auto [it, _] = names.try_emplace(v.ap_id, names.size());
        text += anchor_token(it->second);
    }
    return ChainTypeLabel(std::move(text));
}

Category classify_category(const ChainTypeLabel& label) noexcept {
    const bool s = label.starts_with_star();
    const bool e = label.ends_with_star();
    if (s && e) return Category::C2;
    if (s) return Category::C3;
    if (e) return Category::C4;
    return Category::C1;
}

Category classify_category(const DailyChain& chain) {
    if (chain.mode != ChainMode::hybrid) {
        throw ValidationError("categories are defined for hybrid chains only");
    }
    return classify_category(chain.label);
}

std::vector<DailyChain> build_daily_chains(std::span<const DayVisits> days, ChainMode mode,
                                           unsigned workers) {
    std::vector<std::optional<DailyChain>> slots(days.size());
    parallel_for(days.size(), workers, [&](std::size_t i) {
        const DayVisits& day = days[i];
        std::vector<APVisit> visits;
        if (mode == ChainMode::hybrid) {
            visits = merge_consecutive(collapse_out_of_city(day.visits));
        } else {
            if (day.any_out_of_city) return;
            std::vector<APVisit> kept;
            for (const auto& v : day.visits) {
                if (v.in_city && !v.is_star()) kept.push_back(v);
            }
            visits = merge_consecutive(kept);
        }
        if (visits.empty()) return;

        DailyChain c;
        c.user_id = day.user_id;
        c.date = day.date;
        c.mode = mode;
        c.label = canonicalize(visits);
        c.n_aps = distinct_in_city_aps(visits);
        c.n_edges = static_cast<int>(visits.size()) - 1;
        if (c.n_aps > 0) c.degree = static_cast<double>(c.n_edges) / c.n_aps;
        const bool has_star = std::any_of(visits.begin(), visits.end(),
                                          [](const APVisit& v) { return v.is_star(); });
        if (!has_star) c.avg_distance_km = chain_avg_distance_km(visits);
        if (mode == ChainMode::hybrid) c.category = classify_category(c.label);
        c.visits = std::move(visits);
        slots[i] = std::move(c);
    });

    std::vector<DailyChain> out;
    out.reserve(days.size());
    for (auto& s : slots) {
        if (s) out.push_back(std::move(*s));
    }
    return out;
}

std::vector<ChainTypeLabel> ChainTypeRanking::significant_labels() const {
    std::vector<ChainTypeLabel> out;
    for (const auto& t : types) {
        if (t.significant) out.push_back(t.label);
    }
    return out;
}

ChainTypeRanking rank_chain_types(std::span<const DailyChain> chains, double significance_share) {
    if (chains.empty()) throw ValidationError("cannot rank an empty chain set");
    std::map<ChainTypeLabel, std::size_t> counts;
    for (const auto& c : chains) ++counts[c.label];

    ChainTypeRanking r;
    r.total_chains = chains.size();
    r.total_type_count = counts.size();
    const double total = static_cast<double>(chains.size());
    for (const auto& [label, count] : counts) {
        RankedChainType t;
        t.label = label;
        t.count = count;
        t.share = static_cast<double>(count) / total;
        // Strictly above the threshold; the slack keeps a share equal to it from rounding over.
        t.significant = static_cast<double>(count) > significance_share * total * (1.0 + 1e-12);
        r.types.push_back(std::move(t));
    }
    std::stable_sort(r.types.begin(), r.types.end(),
                     [](const RankedChainType& a, const RankedChainType& b) { return a.count > b.count; });
    for (const auto& t : r.types) {
        if (t.significant) r.coverage_share += t.share;
    }
    return r;
}

}  // namespace tripchain
