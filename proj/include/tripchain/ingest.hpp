#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tripchain/city.hpp"
#include "tripchain/config.hpp"
#include "tripchain/dates.hpp"
#include "tripchain/geo.hpp"

namespace tripchain {

/// One stay interval at one cell tower.
struct StayRecord {
    std::string user_id;
    Date date{};
    TimeOfDay start{};
    TimeOfDay end{};
    geo::GeoPoint location;
    std::string tower_id;  // "lon:lat" when the input has no tower_id column
    bool in_city = false;

    std::chrono::seconds dwell() const noexcept { return end - start; }

    friend bool operator==(const StayRecord&, const StayRecord&) = default;
};

struct FormatSpec {
    char delimiter = ',';
    /// Treat end < start as crossing midnight instead of rejecting the row.
    bool midnight_wrap = false;
};

/// Tower identity for inputs without a tower_id column.
std::string tower_id_from_location(const geo::GeoPoint& p);

/// Parses delimited stay records. The header must be
/// `user_id,date,start_time,end_time,lon,lat` with an optional trailing `tower_id`.
/// Records crossing midnight are split at 00:00:00 into two records.
/// Throws ParseError (malformed row, bad header) or ValidationError (empty input).
std::vector<StayRecord> parse_stay_records(std::istream& in, const FormatSpec& format = {},
                                           unsigned workers = 1);
std::vector<StayRecord> parse_stay_records(const std::string& path, const FormatSpec& format = {},
                                           unsigned workers = 1);

/// Writes records with a header that always includes tower_id. Coordinates
/// use the shortest round-trip representation.
void write_stay_records(std::ostream& out, std::span<const StayRecord> records,
                        char delimiter = ',');

void tag_city_membership(std::span<StayRecord> records, const CityDefinition& city);

/// Keeps records inside the study window and outside every excluded window.
std::vector<StayRecord> filter_study_period(std::span<const StayRecord> records,
                                            const StudyConfig& config);

/// True iff the in-city observation dates of one user are not a contiguous run.
bool detect_gap_days(std::span<const StayRecord> user_records);

struct UserDayTrace {
    std::string user_id;
    Date date{};
    std::vector<StayRecord> records;  // sorted by start time, non-overlapping

    bool any_out_of_city() const noexcept;
};

struct UserDaysResult {
    std::vector<UserDayTrace> traces;  // ordered by user_id, then date
    std::size_t duplicates_removed = 0;
    std::vector<std::string> warnings;
};

/// Groups by (user, date), sorts, drops exact duplicate rows, and rejects
/// overlapping intervals with a ValidationError naming the pair.
UserDaysResult build_user_days(std::vector<StayRecord> records, unsigned workers = 1);

}  // namespace tripchain
