#include "tripchain/report.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "tripchain/config.hpp"
#include "tripchain/errors.hpp"

namespace tripchain {

void write_anchor_dump(std::ostream& out, std::span<const UserAnchors> scopes) {
    out << "user_id,ap_id,seed_tower,lon,lat,total_stay_s,member_count\n";
    for (const auto& s : scopes) {
        for (const auto& ap : s.aps) {
            out << fmt::format("{},{},{},{:.6f},{:.6f},{},{}\n", s.user_id, ap.ap_id, ap.seed_tower,
                               ap.location.lon, ap.location.lat, ap.total_stay_s,
                               ap.member_towers.size());
        }
    }
}

void write_chains(std::ostream& out, std::span<const DailyChain> chains) {
    out << "user_id,date,mode,label,category,n_aps,n_edges,degree,avg_distance_km\n";
    for (const auto& c : chains) {
        out << c.user_id << ',' << format_date(c.date) << ',' << to_string(c.mode) << ','
            << c.label.str() << ',' << (c.category ? to_string(*c.category) : "") << ','
            << c.n_aps << ',' << c.n_edges << ',' << (c.degree ? format_fixed(*c.degree) : "")
            << ',' << (c.avg_distance_km ? format_fixed(*c.avg_distance_km) : "") << '\n';
    }
}

void write_ranking(std::ostream& out, const ChainTypeRanking& ranking) {
    out << "rank,label,count,share\n";
    std::size_t rank = 0;
    for (const auto& t : ranking.types) {
        out << ++rank << ',' << t.label.str() << ',' << t.count << ',' << format_fixed(t.share) << '\n';
    }
}

void write_categories(std::ostream& out, std::span<const DailyChain> hybrid_chains) {
    std::size_t counts[4] = {0, 0, 0, 0};
    std::size_t pass_through = 0;
    for (const auto& c : hybrid_chains) {
        ++counts[static_cast<int>(classify_category(c))];
        if (c.is_pass_through()) ++pass_through;
    }
    const double total = hybrid_chains.empty() ? 1.0 : static_cast<double>(hybrid_chains.size());
    out << "category,count,share\n";
    for (int k = 0; k < 4; ++k) {
        out << to_string(static_cast<Category>(k)) << ',' << counts[k] << ','
            << format_fixed(static_cast<double>(counts[k]) / total) << '\n';
    }
    out << "pass_through," << pass_through << ','
        << format_fixed(static_cast<double>(pass_through) / total) << '\n';
}

void write_matrix(std::ostream& out, const TransitionMatrix& m, bool probabilities) {
    out << "original\\transferred";
    for (const auto& c : m.col_labels) out << ',' << c;
    out << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out << m.row_labels[r];
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out << ',';
            if (probabilities) out << format_fixed(m.probability(r, c));
            else out << m.frequency(r, c);
        }
        out << '\n';
    }
}

void write_group_summaries(std::ostream& out, std::span<const GroupSummary> groups) {
    out << "group,count,min,q1,median,q3,max\n";
    for (const auto& g : groups) {
        out << g.name() << ',' << g.count << ',' << format_fixed(g.min) << ',' << format_fixed(g.q1)
            << ',' << format_fixed(g.median) << ',' << format_fixed(g.q3) << ','
            << format_fixed(g.max) << '\n';
    }
}

void write_group_values(std::ostream& out, std::span<const GroupSummary> groups) {
    out << "group,value\n";
    for (const auto& g : groups) {
        for (double v : g.values) out << g.name() << ',' << format_fixed(v) << '\n';
    }
}

void write_pmf(std::ostream& out, const std::map<int, double>& pmf) {
    out << "n,probability\n";
    for (const auto& [n, p] : pmf) out << n << ',' << format_fixed(p, 9) << '\n';
}

std::map<int, double> read_pmf(std::istream& in) {
    std::map<int, double> pmf;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || (row == 1 && line.rfind("n,", 0) == 0)) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(row, "expected 'n,probability'");
        int n = 0;
        double p = 0.0;
        const char* b = line.data();
        auto r1 = std::from_chars(b, b + comma, n);
        auto r2 = std::from_chars(b + comma + 1, b + line.size(), p);
        if (r1.ec != std::errc{} || r1.ptr != b + comma || r2.ec != std::errc{} ||
            r2.ptr != b + line.size()) {
            throw ParseError(row, "malformed pmf row '" + line + "'");
        }
        if (n < 1 || p < 0.0) throw ParseError(row, "pmf rows need n >= 1 and probability >= 0");
        if (!pmf.emplace(n, p).second) throw ParseError(row, "duplicate n=" + std::to_string(n));
    }
    return pmf;
}

void write_fit(std::ostream& out, const LogNormalFit& fit) {
    out << "mu = " << format_fixed(fit.mu) << '\n'
        << "sigma = " << format_fixed(fit.sigma) << '\n'
        << "r_squared = " << format_fixed(fit.r_squared) << '\n'
        << "support_min = " << fit.support_min << '\n'
        << "support_max = " << fit.support_max << '\n';
}

}  // namespace tripchain
