#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tripchain/anchors.hpp"
#include "tripchain/chains.hpp"

namespace tripchain {

/// Number of distinct in-city anchor points (N).
int distinct_in_city_aps(std::span<const APVisit> visits);

/// Degree K = E / N with E = visits - 1. Throws ValidationError when N == 0.
double chain_degree(std::span<const APVisit> visits);
double chain_degree(const DailyChain& chain);

/// Mean great-circle length of the movement segments, in km.
/// nullopt when there is no segment; throws ValidationError on star nodes.
std::optional<double> chain_avg_distance_km(std::span<const APVisit> visits);
std::optional<double> chain_avg_distance_km(const DailyChain& chain);

/// Linear interpolation between order statistics of a sorted sample.
double quantile(std::span<const double> sorted, double q);

struct GroupSummary {
    int key = 0;            // N, or overflow_at for the overflow group
    bool overflow = false;  // group holds every N >= key
    std::size_t count = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
    std::vector<double> values;  // sorted

    std::string name() const;
};

/// Groups (N, value) samples into N = 1 .. overflow_at-1 plus one overflow
/// group. Samples with N < 1 are ignored; empty groups are omitted.
std::vector<GroupSummary> group_by_node_count(std::span<const std::pair<int, double>> samples,
                                              int overflow_at = 7);

enum class ChainMetric { degree, avg_distance };

/// Chains whose metric is undefined are skipped.
std::vector<GroupSummary> group_by_node_count(std::span<const DailyChain> chains,
                                              ChainMetric metric, int overflow_at = 7);

/// Observed distribution of N over chains with N >= 1.
std::map<int, double> ap_count_pmf(std::span<const DailyChain> chains);

struct LogNormalFit {
    double mu = 0.0;
    double sigma = 0.0;
    double r_squared = 0.0;
    int support_min = 0;
    int support_max = 0;
};

/// Standard log-normal probability density.
double lognormal_density(double x, double mu, double sigma) noexcept;

/// Least-squares fit of the log-normal density to a pmf over integers >= 1.
/// Missing integers inside the support count as zero. Coarse grid over
/// mu in [-2, 3], sigma in (0, 3], then pattern-search refinement.
/// Throws ValidationError with fewer than three support points.
LogNormalFit fit_lognormal(const std::map<int, double>& pmf);

}  // namespace tripchain
