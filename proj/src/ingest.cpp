#include "tripchain/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "tripchain/errors.hpp"
#include "tripchain/parallel.hpp"

namespace tripchain {
namespace {

constexpr std::string_view kColumns[] = {"user_id", "date", "start_time", "end_time",
                                         "lon",     "lat",  "tower_id"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

void split_fields(std::string_view line, char delim, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t pos = 0;
    for (;;) {
        const auto next = line.find(delim, pos);
        if (next == std::string_view::npos) {
            out.push_back(trim(line.substr(pos)));
            return;
        }
        out.push_back(trim(line.substr(pos, next - pos)));
        pos = next + 1;
    }
}

double parse_coord(std::string_view s, std::size_t row, const char* what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(row, fmt::format("{} is not a number: '{}'", what, s));
    }
    return v;
}

struct Line {
    std::size_t row;
    std::string_view text;
};

void parse_row(const Line& line, const FormatSpec& format, bool has_tower,
               std::vector<std::string_view>& fields, std::vector<StayRecord>& out) {
    const std::size_t row = line.row;
    split_fields(line.text, format.delimiter, fields);
    const std::size_t expected = has_tower ? 7 : 6;
    if (fields.size() != expected) {
        throw ParseError(row, fmt::format("expected {} fields, found {}", expected, fields.size()));
    }
    StayRecord r;
    if (fields[0].empty()) throw ParseError(row, "empty user_id");
    r.user_id = std::string(fields[0]);
    const auto date = parse_date(fields[1]);
    if (!date) throw ParseError(row, fmt::format("bad date '{}'", fields[1]));
    r.date = *date;
    const auto start = parse_time(fields[2]);
    const auto end = parse_time(fields[3]);
    if (!start || *start == kEndOfDay) {
        throw ParseError(row, fmt::format("bad start_time '{}'", fields[2]));
    }
    if (!end) throw ParseError(row, fmt::format("bad end_time '{}'", fields[3]));
    r.location = {parse_coord(fields[4], row, "lon"), parse_coord(fields[5], row, "lat")};
    if (!geo::is_valid(r.location)) throw ParseError(row, "coordinates out of WGS84 range");
    if (has_tower) {
        if (fields[6].empty()) throw ParseError(row, "empty tower_id");
        r.tower_id = std::string(fields[6]);
    } else {
        r.tower_id = tower_id_from_location(r.location);
    }
    if (*end >= *start) {
        r.start = *start;
        r.end = *end;
        out.push_back(std::move(r));
        return;
    }
    if (!format.midnight_wrap) {
        throw ParseError(row, fmt::format("end_time {} precedes start_time {}", fields[3], fields[2]));
    }
    StayRecord next_day = r;
    r.start = *start;
    r.end = kEndOfDay;
    next_day.date = r.date + std::chrono::days{1};
    next_day.start = TimeOfDay{0};
    next_day.end = *end;
    out.push_back(std::move(r));
    out.push_back(std::move(next_day));
}

}  // namespace

std::string tower_id_from_location(const geo::GeoPoint& p) {
    return fmt::format("{:.6f}:{:.6f}", p.lon, p.lat);
}

std::vector<StayRecord> parse_stay_records(std::istream& in, const FormatSpec& format,
                                           unsigned workers) {
    const std::string buffer{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

    std::vector<Line> lines;
    std::size_t pos = 0;
    std::size_t row = 0;
    while (pos < buffer.size()) {
        auto nl = buffer.find('\n', pos);
        if (nl == std::string::npos) nl = buffer.size();
        ++row;
        std::string_view text(buffer.data() + pos, nl - pos);
        if (!trim(text).empty()) lines.push_back({row, text});
        pos = nl + 1;
    }
    if (lines.empty()) throw ValidationError("input is empty");

    std::vector<std::string_view> header;
    split_fields(lines.front().text, format.delimiter, header);
    const bool has_tower = header.size() == 7;
    if (header.size() != 6 && header.size() != 7) {
        throw ParseError(lines.front().row, "header must have 6 or 7 columns");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] != kColumns[i]) {
            throw ParseError(lines.front().row,
                             fmt::format("header column {} is '{}', expected '{}'", i + 1,
                                         header[i], kColumns[i]));
        }
    }
    if (lines.size() == 1) throw ValidationError("input has a header but no records");

    const std::span<const Line> body(lines.begin() + 1, lines.end());
    const std::size_t shards = std::min<std::size_t>(body.size(), std::max(1u, workers) * 4);
    std::vector<std::vector<StayRecord>> parsed(shards);
    parallel_for(shards, workers, [&](std::size_t s) {
        const std::size_t begin = body.size() * s / shards;
        const std::size_t end = body.size() * (s + 1) / shards;
        std::vector<std::string_view> fields;
        auto& out = parsed[s];
        out.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) parse_row(body[i], format, has_tower, fields, out);
    });

    std::vector<StayRecord> records;
    std::size_t total = 0;
    for (const auto& p : parsed) total += p.size();
    records.reserve(total);
    for (auto& p : parsed) std::move(p.begin(), p.end(), std::back_inserter(records));
    return records;
}

std::vector<StayRecord> parse_stay_records(const std::string& path, const FormatSpec& format,
                                           unsigned workers) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open input '" + path + "'");
    return parse_stay_records(in, format, workers);
}

void write_stay_records(std::ostream& out, std::span<const StayRecord> records, char delimiter) {
    const char d = delimiter;
    out << "user_id" << d << "date" << d << "start_time" << d << "end_time" << d << "lon" << d
        << "lat" << d << "tower_id\n";
    for (const auto& r : records) {
        out << fmt::format("{}{}{}{}{}{}{}{}{}{}{}{}{}\n", r.user_id, d, format_date(r.date), d,
                           format_time(r.start), d, format_time(r.end), d, r.location.lon, d,
                           r.location.lat, d, r.tower_id);
    }
}

void tag_city_membership(std::span<StayRecord> records, const CityDefinition& city) {
    for (auto& r : records) r.in_city = city.contains(r.tower_id, r.location);
}

std::vector<StayRecord> filter_study_period(std::span<const StayRecord> records,
                                            const StudyConfig& config) {
    std::vector<StayRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (config.study_window && !config.study_window->contains(r.date)) continue;
        const bool excluded =
            std::any_of(config.excluded_windows.begin(), config.excluded_windows.end(),
                        [&](const DateRange& w) { return w.contains(r.date); });
        if (!excluded) out.push_back(r);
    }
    return out;
}

bool detect_gap_days(std::span<const StayRecord> user_records) {
    std::set<Date> dates;
    for (const auto& r : user_records) {
        if (r.in_city) dates.insert(r.date);
    }
    if (dates.size() < 2) return false;
    const auto span = (*dates.rbegin() - *dates.begin()).count();
    return static_cast<std::size_t>(span) + 1 != dates.size();
}

bool UserDayTrace::any_out_of_city() const noexcept {
    return std::any_of(records.begin(), records.end(), [](const StayRecord& r) { return !r.in_city; });
}

UserDaysResult build_user_days(std::vector<StayRecord> records, unsigned workers) {
    std::sort(records.begin(), records.end(), [](const StayRecord& a, const StayRecord& b) {
        if (a.user_id != b.user_id) return a.user_id < b.user_id;
        return a.date < b.date;
    });

    UserDaysResult result;
    for (std::size_t i = 0; i < records.size();) {
        std::size_t j = i;
        while (j < records.size() && records[j].user_id == records[i].user_id &&
               records[j].date == records[i].date) {
            ++j;
        }
        UserDayTrace t;
        t.user_id = records[i].user_id;
        t.date = records[i].date;
        t.records.assign(std::make_move_iterator(records.begin() + i),
                         std::make_move_iterator(records.begin() + j));
        result.traces.push_back(std::move(t));
        i = j;
    }

    std::vector<std::size_t> dups(result.traces.size(), 0);
    parallel_for(result.traces.size(), workers, [&](std::size_t k) {
        auto& recs = result.traces[k].records;
        std::sort(recs.begin(), recs.end(), [](const StayRecord& a, const StayRecord& b) {
            return std::tie(a.start, a.end, a.tower_id, a.location.lon, a.location.lat) <
                   std::tie(b.start, b.end, b.tower_id, b.location.lon, b.location.lat);
        });
        const auto last = std::unique(recs.begin(), recs.end());
        dups[k] = static_cast<std::size_t>(recs.end() - last);
        recs.erase(last, recs.end());
        for (std::size_t r = 1; r < recs.size(); ++r) {
            if (recs[r].start < recs[r - 1].end) {
                const auto& a = recs[r - 1];
                const auto& b = recs[r];
                throw ValidationError(fmt::format(
                    "overlapping records for user {} on {}: {}-{} at {} and {}-{} at {}", a.user_id,
                    format_date(a.date), format_time(a.start), format_time(a.end), a.tower_id,
                    format_time(b.start), format_time(b.end), b.tower_id));
            }
        }
    });
    for (std::size_t k = 0; k < dups.size(); ++k) {
        if (dups[k] == 0) continue;
        result.duplicates_removed += dups[k];
        result.warnings.push_back(fmt::format("removed {} duplicate record(s) for user {} on {}",
                                              dups[k], result.traces[k].user_id,
                                              format_date(result.traces[k].date)));
    }
    return result;
}

}  // namespace tripchain
