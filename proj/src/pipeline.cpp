#include "tripchain/pipeline.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "tripchain/anchors.hpp"
#include "tripchain/parallel.hpp"

namespace tripchain {
namespace {

// Half-open [begin, end) index ranges of traces sharing a user_id.
std::vector<std::pair<std::size_t, std::size_t>> user_ranges(const std::vector<UserDayTrace>& traces) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < traces.size();) {
        std::size_t j = i;
        while (j < traces.size() && traces[j].user_id == traces[i].user_id) ++j;
        out.emplace_back(i, j);
        i = j;
    }
    return out;
}

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

}  // namespace

IngestStage run_ingest(const StudyConfig& config, const PipelineInputs& inputs, unsigned workers) {
    const CityDefinition city = CityDefinition::load(inputs.city_path);
    FormatSpec format;
    format.delimiter = config.delimiter;
    format.midnight_wrap = config.midnight_wrap;
    return run_ingest(config, parse_stay_records(inputs.records_path, format, workers), city, workers);
}

IngestStage run_ingest(const StudyConfig& config, std::vector<StayRecord> records,
                       const CityDefinition& city, unsigned workers) {
    config.validate();
    IngestStage out;
    out.records_parsed = records.size();
    tag_city_membership(records, city);
    records = filter_study_period(records, config);
    out.records_in_period = records.size();

    UserDaysResult days = build_user_days(std::move(records), workers);
    out.duplicates_removed = days.duplicates_removed;
    out.warnings = std::move(days.warnings);

    const auto ranges = user_ranges(days.traces);
    out.users_total = ranges.size();
    std::vector<char> gap(ranges.size(), 0);
    parallel_for(ranges.size(), workers, [&](std::size_t u) {
        std::vector<StayRecord> all;
        for (std::size_t t = ranges[u].first; t < ranges[u].second; ++t) {
            const auto& recs = days.traces[t].records;
            all.insert(all.end(), recs.begin(), recs.end());
        }
        gap[u] = detect_gap_days(all) ? 1 : 0;
    });
    for (std::size_t u = 0; u < ranges.size(); ++u) {
        if (gap[u] && !config.include_gap_day_users) {
            ++out.users_gap_excluded;
            continue;
        }
        ++out.users_kept;
        for (std::size_t t = ranges[u].first; t < ranges[u].second; ++t) {
            out.traces.push_back(std::move(days.traces[t]));
        }
    }
    return out;
}

AnchorStage run_anchor_stage(const IngestStage& ingest, const StudyConfig& config, unsigned workers) {
    const auto ranges = user_ranges(ingest.traces);
    struct UserOut {
        std::vector<UserAnchors> scopes;
        std::vector<DayVisits> days;
    };
    std::vector<UserOut> per_user(ranges.size());

    parallel_for(ranges.size(), workers, [&](std::size_t u) {
        const auto [first, last] = ranges[u];
        UserOut& out = per_user[u];
        auto day_visits = [&](const UserDayTrace& t, const AnchorIndex& index) {
            out.days.push_back({t.user_id, t.date,
                                ap_sequence(t.records, index, config.min_ap_stay_s),
                                t.any_out_of_city()});
        };
        if (config.cluster_scope == ClusterScope::per_user) {
            std::vector<StayRecord> all;
            for (std::size_t t = first; t < last; ++t) {
                all.insert(all.end(), ingest.traces[t].records.begin(), ingest.traces[t].records.end());
            }
            out.scopes.push_back({ingest.traces[first].user_id, std::nullopt,
                                  extract_anchor_points(all, config.roaming_distance_m)});
            const AnchorIndex index(out.scopes.back().aps);
            for (std::size_t t = first; t < last; ++t) day_visits(ingest.traces[t], index);
        } else {
            out.scopes.reserve(last - first);
            for (std::size_t t = first; t < last; ++t) {
                const auto& trace = ingest.traces[t];
                out.scopes.push_back({trace.user_id, trace.date,
                                      extract_anchor_points(trace.records, config.roaming_distance_m)});
                day_visits(trace, AnchorIndex(out.scopes.back().aps));
            }
        }
    });

    AnchorStage stage;
    for (auto& u : per_user) {
        std::move(u.scopes.begin(), u.scopes.end(), std::back_inserter(stage.scopes));
        std::move(u.days.begin(), u.days.end(), std::back_inserter(stage.days));
    }
    return stage;
}

ChainStage run_chain_stage(const AnchorStage& anchors, unsigned workers) {
    return {build_daily_chains(anchors.days, ChainMode::hybrid, workers),
            build_daily_chains(anchors.days, ChainMode::intra_city, workers)};
}

std::vector<WeightedPoint> hotspot_points(const AnchorStage& anchors, bool weighted) {
    // Scopes and days are both in user (then date) order; walk them together.
    std::vector<WeightedPoint> points;
    std::size_t d = 0;
    for (const auto& scope : anchors.scopes) {
        std::vector<double> visits(scope.aps.size(), 0.0);
        while (d < anchors.days.size() && anchors.days[d].user_id == scope.user_id &&
               (!scope.date || anchors.days[d].date == *scope.date)) {
            for (const auto& v : anchors.days[d].visits) {
                if (!v.is_star()) visits[static_cast<std::size_t>(v.ap_id - 1)] += 1.0;
            }
            ++d;
        }
        for (std::size_t i = 0; i < scope.aps.size(); ++i) {
            if (!scope.aps[i].in_city || visits[i] == 0.0) continue;
            points.push_back({scope.aps[i].location, weighted ? visits[i] : 1.0});
        }
    }
    return points;
}

std::uint64_t RunManifest::count(const std::string& key) const {
    for (const auto& [k, v] : counts) {
        if (k == key) return v;
    }
    throw Error("manifest has no count '" + key + "'");
}

void RunManifest::write(std::ostream& out) const {
    out << "tool_version = " << tool_version << '\n';
    for (const auto& [k, v] : config) out << "config." << k << " = " << v << '\n';
    for (const auto& [k, v] : inputs) out << "input." << k << " = " << v << '\n';
    for (const auto& [k, v] : input_digests) out << "input." << k << ".sha256 = " << v << '\n';
    for (const auto& [k, v] : counts) out << "count." << k << " = " << v << '\n';
    for (std::size_t i = 0; i < notes.size(); ++i) out << "note." << i + 1 << " = " << notes[i] << '\n';
    for (const auto& [k, v] : outputs) out << "output." << k << ".sha256 = " << v << '\n';
}

RunManifest run_pipeline(const StudyConfig& config, const PipelineInputs& inputs,
                         const std::string& out_dir, unsigned workers) {
    RunManifest m;
    stage("config", [&] { config.validate(); return 0; });
    m.config = config.to_key_values();
    m.inputs = {{"records", inputs.records_path}, {"city", inputs.city_path}};
    m.input_digests = stage("ingest", [&] {
        return std::vector<std::pair<std::string, std::string>>{
            {"records", sha256_file(inputs.records_path)}, {"city", sha256_file(inputs.city_path)}};
    });

    const IngestStage ingest = stage("ingest", [&] { return run_ingest(config, inputs, workers); });
    m.counts = {{"records_parsed", ingest.records_parsed},
                {"records_in_period", ingest.records_in_period},
                {"duplicates_removed", ingest.duplicates_removed},
                {"users_total", ingest.users_total},
                {"users_gap_excluded", ingest.users_gap_excluded},
                {"users_kept", ingest.users_kept},
                {"user_days", ingest.traces.size()}};
    m.notes = ingest.warnings;

    const AnchorStage anchors = stage("anchors", [&] { return run_anchor_stage(ingest, config, workers); });
    std::size_t n_aps = 0;
    for (const auto& s : anchors.scopes) n_aps += s.aps.size();
    m.counts.emplace_back("anchor_points", n_aps);
    m.outputs.emplace_back("anchors.csv", write_artifact(out_dir, "anchors.csv", [&](std::ostream& o) {
                               write_anchor_dump(o, anchors.scopes);
                           }));

    const ChainStage chains = stage("chains", [&] { return run_chain_stage(anchors, workers); });
    const auto pass_through = std::count_if(chains.hybrid.begin(), chains.hybrid.end(),
                                            [](const DailyChain& c) { return c.is_pass_through(); });
    m.counts.emplace_back("chains_hybrid", chains.hybrid.size());
    m.counts.emplace_back("chains_intra", chains.intra.size());
    m.counts.emplace_back("pass_through_days", static_cast<std::uint64_t>(pass_through));
    for (const auto& [name, set] : {std::pair{"hybrid", &chains.hybrid}, std::pair{"intra", &chains.intra}}) {
        const std::string file = fmt::format("chains_{}.csv", name);
        m.outputs.emplace_back(file, write_artifact(out_dir, file, [&](std::ostream& o) { write_chains(o, *set); }));
    }
    m.outputs.emplace_back("categories_hybrid.csv",
                           write_artifact(out_dir, "categories_hybrid.csv",
                                          [&](std::ostream& o) { write_categories(o, chains.hybrid); }));

    std::optional<ChainTypeRanking> intra_rank;
    stage("rank", [&] {
        for (const auto& [name, set] : {std::pair{"hybrid", &chains.hybrid}, std::pair{"intra", &chains.intra}}) {
            if (set->empty()) {
                m.notes.push_back(fmt::format("no {} chains; ranking skipped", name));
                continue;
            }
            const auto ranking = rank_chain_types(*set, config.significance_share);
            m.counts.emplace_back(fmt::format("types_{}", name), ranking.total_type_count);
            m.counts.emplace_back(fmt::format("significant_types_{}", name), ranking.significant_labels().size());
            const std::string file = fmt::format("ranking_{}.csv", name);
            m.outputs.emplace_back(file, write_artifact(out_dir, file, [&](std::ostream& o) {
                                       write_ranking(o, ranking);
                                   }));
            if (set == &chains.intra) intra_rank = ranking;
        }
        return 0;
    });

    stage("transitions", [&] {
        const auto pairs = consecutive_day_pairs(chains.intra);
        m.counts.emplace_back("transition_pairs", pairs.size());
        if (pairs.empty()) {
            m.notes.push_back("no consecutive intra-city day pairs; transitions skipped");
            return 0;
        }
        const auto labels = intra_rank->significant_labels();
        const auto tm = build_transition_matrix(pairs, labels);
        const auto nm = aggregate_by_ap_count(pairs, config.max_n);
        for (const auto& [file, mat, prob] :
             {std::tuple{"transitions_freq.csv", &tm, false}, std::tuple{"transitions_prob.csv", &tm, true},
              std::tuple{"transitions_n_freq.csv", &nm, false}, std::tuple{"transitions_n_prob.csv", &nm, true}}) {
            m.outputs.emplace_back(file, write_artifact(out_dir, file, [&](std::ostream& o) {
                                       write_matrix(o, *mat, prob);
                                   }));
        }
        return 0;
    });

    stage("metrics", [&] {
        const auto k = group_by_node_count(chains.intra, ChainMetric::degree, config.overflow_at);
        const auto d = group_by_node_count(chains.intra, ChainMetric::avg_distance, config.overflow_at);
        for (const auto& [stem, groups] : {std::pair{"degree", &k}, std::pair{"distance", &d}}) {
            const std::string summary = fmt::format("metrics_{}.csv", stem);
            const std::string values = fmt::format("metrics_{}_values.csv", stem);
            m.outputs.emplace_back(summary, write_artifact(out_dir, summary, [&](std::ostream& o) {
                                       write_group_summaries(o, *groups);
                                   }));
            m.outputs.emplace_back(values, write_artifact(out_dir, values, [&](std::ostream& o) {
                                       write_group_values(o, *groups);
                                   }));
        }
        return 0;
    });

    stage("fit", [&] {
        const auto pmf = ap_count_pmf(chains.intra);
        m.outputs.emplace_back("ap_count_pmf.csv", write_artifact(out_dir, "ap_count_pmf.csv",
                                                                  [&](std::ostream& o) { write_pmf(o, pmf); }));
        if (pmf.size() < 3) {
            m.notes.push_back("AP-count pmf has fewer than three support points; log-normal fit skipped");
            return 0;
        }
        const auto fit = fit_lognormal(pmf);
        m.outputs.emplace_back("fit.txt", write_artifact(out_dir, "fit.txt", [&](std::ostream& o) { write_fit(o, fit); }));
        return 0;
    });

    stage("hotspot", [&] {
        const auto points = hotspot_points(anchors, config.kde_weighted);
        if (points.empty()) {
            m.notes.push_back("no in-city anchor points; hotspot raster skipped");
            return 0;
        }
        const auto extent = padded_extent(points, config.kde_radius_m);
        const auto raster = kde_raster(points, config.kde_radius_m, config.effective_kde_cell_m(), extent, workers);
        m.outputs.emplace_back("hotspot.asc", write_artifact(out_dir, "hotspot.asc", [&](std::ostream& o) {
                                   write_esri_ascii(o, raster);
                               }));
        m.outputs.emplace_back("hotspot_georef.txt", write_artifact(out_dir, "hotspot_georef.txt", [&](std::ostream& o) {
                                   write_raster_sidecar(o, raster);
                               }));
        return 0;
    });

    write_artifact(out_dir, "manifest.txt", [&](std::ostream& o) { m.write(o); });
    return m;
}

}  // namespace tripchain
