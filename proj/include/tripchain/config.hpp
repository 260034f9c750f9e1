#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tripchain/dates.hpp"

namespace tripchain {

enum class ClusterScope { per_user, per_user_day };

/// Flat `key = value` file with optional `[section]` blocks of raw lines.
/// `#` starts a comment. Top-level keys keep file order.
struct KeyValueFile {
    std::vector<std::pair<std::string, std::string>> entries;
    std::map<std::string, std::vector<std::string>> sections;

    static KeyValueFile parse(std::istream& in);
    static KeyValueFile load(const std::string& path);
};

struct StudyConfig {
    std::optional<DateRange> study_window;  // unbounded when absent
    std::vector<DateRange> excluded_windows;
    double roaming_distance_m = 500.0;
    std::int64_t min_ap_stay_s = 0;
    double kde_radius_m = 1000.0;
    double kde_cell_m = 0.0;  // 0 selects kde_radius_m / 10
    double significance_share = 0.01;
    bool include_gap_day_users = false;
    ClusterScope cluster_scope = ClusterScope::per_user;
    bool kde_weighted = true;
    int overflow_at = 7;
    int max_n = 4;
    bool midnight_wrap = false;
    char delimiter = ',';

    double effective_kde_cell_m() const noexcept {
        return kde_cell_m > 0.0 ? kde_cell_m : kde_radius_m / 10.0;
    }

    /// Throws ConfigError describing the first violated invariant.
    void validate() const;

    /// Sets one field from its textual form. Throws ConfigError on unknown key or bad value.
    void set(const std::string& key, const std::string& value);

    /// Every field as key/value text, in a fixed order.
    std::vector<std::pair<std::string, std::string>> to_key_values() const;

    static StudyConfig from_file(const KeyValueFile& kv);
};

std::string format_fixed(double v, int decimals = 6);

}  // namespace tripchain
