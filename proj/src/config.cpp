#include "tripchain/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include <fmt/format.h>

#include "tripchain/errors.hpp"

namespace tripchain {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
    }
    return out;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "': not a boolean: '" + v + "'");
}

DateRange to_range(const std::string& key, const std::string& v) {
    auto r = parse_date_range(trim(v));
    if (!r) throw ConfigError("config key '" + key + "': bad date range '" + v + "'");
    return *r;
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in) {
    KeyValueFile out;
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            out.sections[section];
            continue;
        }
        if (!section.empty()) {
            out.sections[section].push_back(t);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        out.entries.emplace_back(trim(std::string_view(t).substr(0, eq)),
                                 trim(std::string_view(t).substr(eq + 1)));
    }
    return out;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in);
}

void StudyConfig::validate() const {
    if (!(roaming_distance_m > 0.0)) throw ConfigError("roaming_distance_m must be > 0");
    if (!(significance_share > 0.0 && significance_share < 1.0)) {
        throw ConfigError("significance_share must be in (0, 1)");
    }
    if (min_ap_stay_s < 0) throw ConfigError("min_ap_stay_s must be >= 0");
    if (!(kde_radius_m > 0.0)) throw ConfigError("kde_radius_m must be > 0");
    if (kde_cell_m < 0.0) throw ConfigError("kde_cell_m must be >= 0");
    if (!(effective_kde_cell_m() < kde_radius_m)) {
        throw ConfigError("kde_cell_m must be smaller than kde_radius_m");
    }
    if (overflow_at < 2) throw ConfigError("overflow_at must be >= 2");
    if (max_n < 1) throw ConfigError("max_n must be >= 1");
    if (study_window) {
        for (const auto& w : excluded_windows) {
            if (!study_window->contains(w.first) || !study_window->contains(w.last)) {
                throw ConfigError("excluded window " + format_date_range(w) +
                                  " is not inside study_window");
            }
        }
    }
}

void StudyConfig::set(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "study_window") {
        if (v.empty()) study_window.reset();
        else study_window = to_range(key, v);
    } else if (key == "excluded_windows") {
        excluded_windows.clear();
        std::stringstream ss(v);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (!trim(part).empty()) excluded_windows.push_back(to_range(key, part));
        }
    } else if (key == "roaming_distance_m") {
        roaming_distance_m = to_double(key, v);
    } else if (key == "min_ap_stay_s") {
        min_ap_stay_s = to_int(key, v);
    } else if (key == "kde_radius_m") {
        kde_radius_m = to_double(key, v);
    } else if (key == "kde_cell_m") {
        kde_cell_m = to_double(key, v);
    } else if (key == "significance_share") {
        significance_share = to_double(key, v);
    } else if (key == "include_gap_day_users") {
        include_gap_day_users = to_bool(key, v);
    } else if (key == "cluster_scope") {
        if (v == "user") cluster_scope = ClusterScope::per_user;
        else if (v == "user_day") cluster_scope = ClusterScope::per_user_day;
        else throw ConfigError("cluster_scope must be 'user' or 'user_day'");
    } else if (key == "kde_weighted") {
        kde_weighted = to_bool(key, v);
    } else if (key == "overflow_at") {
        overflow_at = static_cast<int>(to_int(key, v));
    } else if (key == "max_n") {
        max_n = static_cast<int>(to_int(key, v));
    } else if (key == "midnight_wrap") {
        midnight_wrap = to_bool(key, v);
    } else if (key == "delimiter") {
        if (v == "tab" || v == "\\t") delimiter = '\t';
        else if (v.size() == 1) delimiter = v[0];
        else throw ConfigError("delimiter must be a single character or 'tab'");
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

std::vector<std::pair<std::string, std::string>> StudyConfig::to_key_values() const {
    std::string excl;
    for (const auto& w : excluded_windows) {
        if (!excl.empty()) excl += ',';
        excl += format_date_range(w);
    }
    return {
        {"study_window", study_window ? format_date_range(*study_window) : ""},
        {"excluded_windows", excl},
        {"roaming_distance_m", format_fixed(roaming_distance_m)},
        {"min_ap_stay_s", std::to_string(min_ap_stay_s)},
        {"kde_radius_m", format_fixed(kde_radius_m)},
        {"kde_cell_m", format_fixed(kde_cell_m)},
        {"significance_share", format_fixed(significance_share)},
        {"include_gap_day_users", include_gap_day_users ? "true" : "false"},
        {"cluster_scope", cluster_scope == ClusterScope::per_user ? "user" : "user_day"},
        {"kde_weighted", kde_weighted ? "true" : "false"},
        {"overflow_at", std::to_string(overflow_at)},
        {"max_n", std::to_string(max_n)},
        {"midnight_wrap", midnight_wrap ? "true" : "false"},
        {"delimiter", delimiter == '\t' ? "tab" : std::string(1, delimiter)},
    };
}

StudyConfig StudyConfig::from_file(const KeyValueFile& kv) {
    StudyConfig cfg;
    for (const auto& [k, v] : kv.entries) cfg.set(k, v);
    return cfg;
}

std::string format_fixed(double v, int decimals) {
    if (v == 0.0) v = 0.0;  // no "-0.000000"
    std::string s = fmt::format("{:.{}f}", v, decimals);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

}  // namespace tripchain
