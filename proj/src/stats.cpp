#include "tripchain/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "tripchain/errors.hpp"

namespace tripchain {

int distinct_in_city_aps(std::span<const APVisit> visits) {
    std::set<int> ids;
    for (const auto& v : visits) {
        if (!v.is_star() && v.in_city) ids.insert(v.ap_id);
    }
    return static_cast<int>(ids.size());
}

double chain_degree(std::span<const APVisit> visits) {
    const int n = distinct_in_city_aps(visits);
    if (n == 0) throw ValidationError("degree undefined for a chain without in-city anchors");
    return static_cast<double>(visits.size() - 1) / n;
}

double chain_degree(const DailyChain& chain) { return chain_degree(chain.visits); }

std::optional<double> chain_avg_distance_km(std::span<const APVisit> visits) {
    for (const auto& v : visits) {
        if (v.is_star()) throw ValidationError("average distance undefined for star nodes");
    }
    if (visits.size() < 2) return std::nullopt;
    double total_m = 0.0;
    for (std::size_t i = 1; i < visits.size(); ++i) {
        total_m += geo::haversine_m(visits[i - 1].location, visits[i].location);
    }
    return total_m / 1000.0 / static_cast<double>(visits.size() - 1);
}

std::optional<double> chain_avg_distance_km(const DailyChain& chain) {
    return chain_avg_distance_km(chain.visits);
}

double quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ValidationError("quantile of an empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

std::string GroupSummary::name() const {
    return overflow ? ">=" + std::to_string(key) : std::to_string(key);
}

std::vector<GroupSummary> group_by_node_count(std::span<const std::pair<int, double>> samples,
                                              int overflow_at) {
    std::map<int, std::vector<double>> groups;
    for (const auto& [n, value] : samples) {
        if (n < 1) continue;
        groups[std::min(n, overflow_at)].push_back(value);
    }
    std::vector<GroupSummary> out;
    for (auto& [key, values] : groups) {
        std::sort(values.begin(), values.end());
        GroupSummary g;
        g.key = key;
        g.overflow = key == overflow_at;
        g.count = values.size();
        g.min = values.front();
        g.q1 = quantile(values, 0.25);
        g.median = quantile(values, 0.5);
        g.q3 = quantile(values, 0.75);
        g.max = values.back();
        g.values = std::move(values);
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<GroupSummary> group_by_node_count(std::span<const DailyChain> chains,
                                              ChainMetric metric, int overflow_at) {
    std::vector<std::pair<int, double>> samples;
    samples.reserve(chains.size());
    for (const auto& c : chains) {
        const auto& v = metric == ChainMetric::degree ? c.degree : c.avg_distance_km;
        if (v) samples.emplace_back(c.n_aps, *v);
    }
    return group_by_node_count(samples, overflow_at);
}

std::map<int, double> ap_count_pmf(std::span<const DailyChain> chains) {
    std::map<int, std::size_t> counts;
    std::size_t total = 0;
    for (const auto& c : chains) {
        if (c.n_aps < 1) continue;
        ++counts[c.n_aps];
        ++total;
    }
    std::map<int, double> pmf;
    for (const auto& [n, k] : counts) pmf[n] = static_cast<double>(k) / static_cast<double>(total);
    return pmf;
}

double lognormal_density(double x, double mu, double sigma) noexcept {
    if (!(x > 0.0)) return 0.0;
    const double z = (std::log(x) - mu) / sigma;
    return std::exp(-0.5 * z * z) / (x * sigma * std::sqrt(2.0 * std::numbers::pi));
}

LogNormalFit fit_lognormal(const std::map<int, double>& pmf) {
    if (pmf.size() < 3) throw ValidationError("log-normal fit needs at least three support points");
    if (pmf.begin()->first < 1) throw ValidationError("log-normal fit support must be >= 1");

    const int lo = pmf.begin()->first;
    const int hi = pmf.rbegin()->first;
    std::vector<double> xs, ps;
    for (int x = lo; x <= hi; ++x) {
        const auto it = pmf.find(x);
        xs.push_back(x);
        ps.push_back(it == pmf.end() ? 0.0 : it->second);
    }
    auto sse = [&](double mu, double sigma) {
        double s = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ps[i] - lognormal_density(xs[i], mu, sigma);
            s += r * r;
        }
        return s;
    };

    double best_mu = 0.0, best_sigma = 1.0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 500; ++i) {
        const double mu = -2.0 + 0.01 * i;
        for (int j = 1; j <= 300; ++j) {
            const double sigma = 0.01 * j;
            const double e = sse(mu, sigma);
            if (e < best) {
                best = e;
                best_mu = mu;
                best_sigma = sigma;
            }
        }
    }

    // Compass search: shrink the step whenever no axis move improves.
    double step = 0.01;
    while (step > 1e-8) {
        bool moved = false;
        const double cand[4][2] = {{best_mu + step, best_sigma},
                                   {best_mu - step, best_sigma},
                                   {best_mu, best_sigma + step},
                                   {best_mu, best_sigma - step}};
        for (const auto& c : cand) {
            if (c[1] <= 0.0) continue;
            const double e = sse(c[0], c[1]);
            if (e < best) {
                best = e;
                best_mu = c[0];
                best_sigma = c[1];
                moved = true;
            }
        }
        if (!moved) step /= 2.0;
    }

    double mean = 0.0;
    for (double p : ps) mean += p;
    mean /= static_cast<double>(ps.size());
    double sst = 0.0;
    for (double p : ps) sst += (p - mean) * (p - mean);

    LogNormalFit fit;
    fit.mu = best_mu;
    fit.sigma = best_sigma;
    fit.r_squared = sst > 0.0 ? std::clamp(1.0 - best / sst, 0.0, 1.0) : (best == 0.0 ? 1.0 : 0.0);
    fit.support_min = lo;
    fit.support_max = hi;
    return fit;
}

}  // namespace tripchain
