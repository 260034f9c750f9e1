#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tripchain/chains.hpp"

namespace tripchain {

/// Frequency matrix with its row-normalized probabilities. Rows are the
/// original (former-day) state, columns the transferred (latter-day) state.
struct TransitionMatrix {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::uint64_t> frequencies;  // row-major
    std::vector<double> probabilities;       // row-major; all-zero rows stay zero
    std::vector<bool> empty_rows;

    std::size_t rows() const noexcept { return row_labels.size(); }
    std::size_t cols() const noexcept { return col_labels.size(); }
    std::uint64_t frequency(std::size_t r, std::size_t c) const { return frequencies[r * cols() + c]; }
    double probability(std::size_t r, std::size_t c) const { return probabilities[r * cols() + c]; }
    std::uint64_t total() const noexcept;
};

inline constexpr const char* kOthersLabel = "others";

using ChainPair = std::pair<const DailyChain*, const DailyChain*>;  // (original, transferred)

/// One pair per consecutive calendar-date pair of the same user. Input must be
/// intra-city chains; order does not matter. Throws ValidationError on hybrid input.
std::vector<ChainPair> consecutive_day_pairs(std::span<const DailyChain> chains);

/// Labels outside `significant_labels` fall into "others" on both axes; axis
/// order is the given label order followed by "others".
/// Throws ValidationError on an empty pair list.
TransitionMatrix build_transition_matrix(std::span<const ChainPair> pairs,
                                         std::span<const ChainTypeLabel> significant_labels);

/// Same counting over anchor counts N = 1..max_n plus one overflow bucket (N > max_n).
TransitionMatrix aggregate_by_ap_count(std::span<const ChainPair> pairs, int max_n);

/// Fills probabilities and empty_rows from frequencies.
void normalize_rows(TransitionMatrix& m);

}  // namespace tripchain
