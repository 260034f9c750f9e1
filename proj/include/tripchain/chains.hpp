#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tripchain/anchors.hpp"
#include "tripchain/dates.hpp"

namespace tripchain {

enum class ChainMode { hybrid, intra_city };
enum class Category { C1, C2, C3, C4 };  // staying in, passing by, coming to, leaving

std::string_view to_string(ChainMode m) noexcept;
std::string_view to_string(Category c) noexcept;
std::optional<ChainMode> parse_chain_mode(std::string_view s) noexcept;

/// Canonical topology of a daily chain: in-city anchors are renamed A, B, C...
/// by first appearance (AA, AB... after Z), out-of-city runs are "*", tokens
/// joined by "-".
class ChainTypeLabel {
public:
    ChainTypeLabel() = default;
    /// Throws ValidationError unless `text` satisfies the label grammar.
    explicit ChainTypeLabel(std::string text);

    const std::string& str() const noexcept { return text_; }
    std::vector<std::string> tokens() const;
    bool starts_with_star() const noexcept { return !text_.empty() && text_.front() == '*'; }
    bool ends_with_star() const noexcept { return !text_.empty() && text_.back() == '*'; }

    friend auto operator<=>(const ChainTypeLabel&, const ChainTypeLabel&) = default;

private:
    std::string text_;
};

/// Grammar check: first letter token is "A", every new letter token is the
/// next unused name, no two consecutive tokens equal.
bool is_canonical_label(std::string_view text);

/// Name of the k-th distinct anchor (0 -> "A", 25 -> "Z", 26 -> "AA").
std::string anchor_token(std::size_t k);

struct DailyChain {
    std::string user_id;
    Date date{};
    ChainMode mode = ChainMode::hybrid;
    std::vector<APVisit> visits;
    ChainTypeLabel label;
    std::optional<Category> category;  // hybrid mode only
    int n_aps = 0;                     // distinct in-city anchors (N)
    int n_edges = 0;                   // movement segments (E)
    std::optional<double> degree;      // E / N, undefined when N == 0
    std::optional<double> avg_distance_km;

    /// Star-only day with no in-city stop.
    bool is_pass_through() const noexcept { return n_aps == 0; }
};

/// Replaces every maximal run of out-of-city visits by one star node.
std::vector<APVisit> collapse_out_of_city(std::span<const APVisit> visits);

/// Throws ValidationError on empty input or consecutive equal nodes.
ChainTypeLabel canonicalize(std::span<const APVisit> visits);

/// C1 no star at either end, C2 both ends, C3 star at start only (arrival),
/// C4 star at end only (departure).
Category classify_category(const ChainTypeLabel& label) noexcept;
/// Throws ValidationError for intra-city chains.
Category classify_category(const DailyChain& chain);

/// AP-level visits of one user-day, the input to chain construction.
struct DayVisits {
    std::string user_id;
    Date date{};
    std::vector<APVisit> visits;
    bool any_out_of_city = false;  // any raw record of the day was out of city
};

/// Hybrid mode keeps every visit and collapses out-of-city runs into stars.
/// Intra-city mode keeps only days without any out-of-city record. Days with
/// no visits produce no chain.
std::vector<DailyChain> build_daily_chains(std::span<const DayVisits> days, ChainMode mode,
                                           unsigned workers = 1);

struct RankedChainType {
    ChainTypeLabel label;
    std::size_t count = 0;
    double share = 0.0;
    bool significant = false;
};

struct ChainTypeRanking {
    std::vector<RankedChainType> types;  // count descending, then label ascending
    double coverage_share = 0.0;         // combined share of the significant types
    std::size_t total_type_count = 0;
    std::size_t total_chains = 0;

    std::vector<ChainTypeLabel> significant_labels() const;
};

/// Significant types are those whose share strictly exceeds `significance_share`.
/// Throws ValidationError on empty input.
ChainTypeRanking rank_chain_types(std::span<const DailyChain> chains, double significance_share);

}  // namespace tripchain
