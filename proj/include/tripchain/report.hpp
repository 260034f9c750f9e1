#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tripchain/anchors.hpp"
#include "tripchain/chains.hpp"
#include "tripchain/stats.hpp"
#include "tripchain/transitions.hpp"

// Delimited-text writers for every report artifact. Numbers use six fixed
// decimals so golden files stay stable.

namespace tripchain {

/// Anchor points of one clustering scope (a user, or a user-day).
struct UserAnchors {
    std::string user_id;
    std::optional<Date> date;  // set for per-user-day scope
    std::vector<AnchorPoint> aps;
};

void write_anchor_dump(std::ostream& out, std::span<const UserAnchors> scopes);
void write_chains(std::ostream& out, std::span<const DailyChain> chains);
void write_ranking(std::ostream& out, const ChainTypeRanking& ranking);
/// category,count,share over hybrid chains, then one pass_through row (a subset of C2).
void write_categories(std::ostream& out, std::span<const DailyChain> hybrid_chains);
void write_matrix(std::ostream& out, const TransitionMatrix& m, bool probabilities);
void write_group_summaries(std::ostream& out, std::span<const GroupSummary> groups);
/// Long-format per-chain values for violin plots: group,value.
void write_group_values(std::ostream& out, std::span<const GroupSummary> groups);
void write_pmf(std::ostream& out, const std::map<int, double>& pmf);
/// Reads `n,probability` lines (header optional). Throws ParseError.
std::map<int, double> read_pmf(std::istream& in);
void write_fit(std::ostream& out, const LogNormalFit& fit);

}  // namespace tripchain
