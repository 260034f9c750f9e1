#include "tripchain/transitions.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "tripchain/errors.hpp"

namespace tripchain {

std::uint64_t TransitionMatrix::total() const noexcept {
    return std::accumulate(frequencies.begin(), frequencies.end(), std::uint64_t{0});
}

std::vector<ChainPair> consecutive_day_pairs(std::span<const DailyChain> chains) {
    std::vector<const DailyChain*> sorted;
    sorted.reserve(chains.size());
    for (const auto& c : chains) {
        if (c.mode != ChainMode::intra_city) {
            throw ValidationError("day-to-day transitions use intra-city chains only");
        }
        sorted.push_back(&c);
    }
    std::sort(sorted.begin(), sorted.end(), [](const DailyChain* a, const DailyChain* b) {
        if (a->user_id != b->user_id) return a->user_id < b->user_id;
        return a->date < b->date;
    });
    std::vector<ChainPair> pairs;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        const DailyChain* a = sorted[i - 1];
        const DailyChain* b = sorted[i];
        if (a->user_id == b->user_id && b->date == a->date + std::chrono::days{1}) {
            pairs.emplace_back(a, b);
        }
    }
    return pairs;
}

void normalize_rows(TransitionMatrix& m) {
    const std::size_t nr = m.rows(), nc = m.cols();
    m.probabilities.assign(nr * nc, 0.0);
    m.empty_rows.assign(nr, false);
    for (std::size_t r = 0; r < nr; ++r) {
        std::uint64_t row_total = 0;
        for (std::size_t c = 0; c < nc; ++c) row_total += m.frequency(r, c);
        if (row_total == 0) {
            m.empty_rows[r] = true;
            continue;
        }
        for (std::size_t c = 0; c < nc; ++c) {
            m.probabilities[r * nc + c] =
                static_cast<double>(m.frequency(r, c)) / static_cast<double>(row_total);
        }
    }
}

TransitionMatrix build_transition_matrix(std::span<const ChainPair> pairs,
                                         std::span<const ChainTypeLabel> significant_labels) {
    if (pairs.empty()) throw ValidationError("no consecutive-day pairs to build a transition matrix");
    std::map<std::string, std::size_t, std::less<>> index;
    TransitionMatrix m;
    for (const auto& l : significant_labels) {
        if (index.try_emplace(l.str(), m.row_labels.size()).second) m.row_labels.push_back(l.str());
    }
    const std::size_t others = m.row_labels.size();
    m.row_labels.emplace_back(kOthersLabel);
    m.col_labels = m.row_labels;

    const std::size_t n = m.row_labels.size();
    m.frequencies.assign(n * n, 0);
    auto slot = [&](const DailyChain* c) {
        const auto it = index.find(c->label.str());
        return it == index.end() ? others : it->second;
    };
    for (const auto& [orig, next] : pairs) ++m.frequencies[slot(orig) * n + slot(next)];
    normalize_rows(m);
    return m;
}

TransitionMatrix aggregate_by_ap_count(std::span<const ChainPair> pairs, int max_n) {
    if (max_n < 1) throw ValidationError("max_n must be >= 1");
    TransitionMatrix m;
    for (int k = 1; k <= max_n; ++k) m.row_labels.push_back(std::to_string(k));
    m.row_labels.push_back(">" + std::to_string(max_n));
    m.col_labels = m.row_labels;
    const std::size_t n = m.row_labels.size();
    m.frequencies.assign(n * n, 0);
    auto slot = [&](const DailyChain* c) {
        return static_cast<std::size_t>(std::clamp(c->n_aps, 1, max_n + 1) - 1);
    };
    for (const auto& [orig, next] : pairs) ++m.frequencies[slot(orig) * n + slot(next)];
    normalize_rows(m);
    return m;
}

}  // namespace tripchain
