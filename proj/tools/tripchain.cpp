// Command-line front end: one subcommand per pipeline stage plus `run`.
// Exit codes: 0 success, 1 data/validation error, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tripchain/pipeline.hpp"
#include "tripchain/synth.hpp"

namespace {

using namespace tripchain;

struct CommonOptions {
    std::string config_path;
    std::string input;
    std::string city;
    std::string out;
    std::string mode;
    std::optional<double> threshold;
    std::optional<double> roaming_distance;
    std::optional<long> min_ap_stay;
    std::optional<double> kde_radius;
    std::optional<double> kde_cell;
    std::vector<std::string> overrides;
    unsigned workers = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_city) {
    cmd->add_option("--config", o.config_path, "Key-value config file")->check(CLI::ExistingFile);
    cmd->add_option("--input", o.input, "Stay-record file")->required()->check(CLI::ExistingFile);
    auto* city = cmd->add_option("--city", o.city, "City definition (GeoJSON polygon or tower list)")
                     ->check(CLI::ExistingFile);
    if (needs_city) city->required();
    cmd->add_option("--out", o.out, "Output directory")->required();
    cmd->add_option("--threshold", o.threshold, "Significance share for chain ranking");
    cmd->add_option("--roaming-distance", o.roaming_distance, "Anchor clustering radius, meters");
    cmd->add_option("--min-ap-stay", o.min_ap_stay, "Minimum anchor-point total stay, seconds");
    cmd->add_option("--kde-radius", o.kde_radius, "Kernel search radius, meters");
    cmd->add_option("--kde-cell", o.kde_cell, "Raster cell size, meters");
    cmd->add_option("--set", o.overrides, "Override any config key: key=value")->take_all();
    cmd->add_option("--workers", o.workers, "Worker threads (does not affect output)")
        ->check(CLI::Range(1u, 1024u));
}

void add_mode(CLI::App* cmd, CommonOptions& o, const char* help) {
    cmd->add_option("--mode", o.mode, help)->check(CLI::IsMember({"hybrid", "intra"}));
}

StudyConfig load_config(const CommonOptions& o) {
    StudyConfig cfg;
    if (!o.config_path.empty()) cfg = StudyConfig::from_file(KeyValueFile::load(o.config_path));
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.threshold) cfg.significance_share = *o.threshold;
    if (o.roaming_distance) cfg.roaming_distance_m = *o.roaming_distance;
    if (o.min_ap_stay) cfg.min_ap_stay_s = *o.min_ap_stay;
    if (o.kde_radius) cfg.kde_radius_m = *o.kde_radius;
    if (o.kde_cell) cfg.kde_cell_m = *o.kde_cell;
    cfg.validate();
    return cfg;
}

IngestStage ingest_from(const CommonOptions& o, const StudyConfig& cfg) {
    return run_ingest(cfg, PipelineInputs{o.input, o.city}, o.workers);
}

std::vector<ChainMode> modes_of(const CommonOptions& o) {
    if (o.mode.empty()) return {ChainMode::hybrid, ChainMode::intra_city};
    return {*parse_chain_mode(o.mode)};
}

const std::vector<DailyChain>& pick(const ChainStage& c, ChainMode m) {
    return m == ChainMode::hybrid ? c.hybrid : c.intra;
}

void report(const std::string& dir, const std::string& name) {
    std::cout << "wrote " << (std::filesystem::path(dir) / name).string() << '\n';
}

template <typename Body>
void emit(const std::string& dir, const std::string& name, Body&& body) {
    write_artifact(dir, name, std::forward<Body>(body));
    report(dir, name);
}

int cmd_ingest(const CommonOptions& o) {
    const auto cfg = load_config(o);
    const auto ing = ingest_from(o, cfg);
    for (const auto& w : ing.warnings) std::cerr << "warning: " << w << '\n';
    emit(o.out, "ingest_summary.txt", [&](std::ostream& out) {
        out << "records_parsed = " << ing.records_parsed << '\n'
            << "records_in_period = " << ing.records_in_period << '\n'
            << "duplicates_removed = " << ing.duplicates_removed << '\n'
            << "users_total = " << ing.users_total << '\n'
            << "users_gap_excluded = " << ing.users_gap_excluded << '\n'
            << "users_kept = " << ing.users_kept << '\n'
            << "user_days = " << ing.traces.size() << '\n';
    });
    return 0;
}

int cmd_anchors(const CommonOptions& o) {
    const auto cfg = load_config(o);
    const auto anchors = run_anchor_stage(ingest_from(o, cfg), cfg, o.workers);
    emit(o.out, "anchors.csv", [&](std::ostream& out) { write_anchor_dump(out, anchors.scopes); });
    return 0;
}

ChainStage chains_from(const CommonOptions& o, const StudyConfig& cfg) {
    return run_chain_stage(run_anchor_stage(ingest_from(o, cfg), cfg, o.workers), o.workers);
}

int cmd_chains(const CommonOptions& o) {
    const auto cfg = load_config(o);
    const auto chains = chains_from(o, cfg);
    for (auto m : modes_of(o)) {
        emit(o.out, fmt::format("chains_{}.csv", to_string(m)),
             [&](std::ostream& out) { write_chains(out, pick(chains, m)); });
        if (m == ChainMode::hybrid) {
            emit(o.out, "categories_hybrid.csv",
                 [&](std::ostream& out) { write_categories(out, chains.hybrid); });
        }
    }
    return 0;
}

int cmd_rank(const CommonOptions& o) {
    const auto cfg = load_config(o);
    const auto chains = chains_from(o, cfg);
    for (auto m : modes_of(o)) {
        const auto ranking = rank_chain_types(pick(chains, m), cfg.significance_share);
        emit(o.out, fmt::format("ranking_{}.csv", to_string(m)),
             [&](std::ostream& out) { write_ranking(out, ranking); });
        std::cout << fmt::format("{}: {} types, {} significant, coverage {:.4f}\n", to_string(m),
                                 ranking.total_type_count, ranking.significant_labels().size(),
                                 ranking.coverage_share);
    }
    return 0;
}

int cmd_transitions(const CommonOptions& o) {
    const auto cfg = load_config(o);
    const auto chains = chains_from(o, cfg);
    const auto ranking = rank_chain_types(chains.intra, cfg.significance_share);
    const auto pairs = consecutive_day_pairs(chains.intra);
    const auto labels = ranking.significant_labels();
    const auto tm = build_transition_matrix(pairs, labels);
    const auto nm = aggregate_by_ap_count(pairs, cfg.max_n);
    emit(o.out, "transitions_freq.csv", [&](std::ostream& out) { write_matrix(out, tm, false); });
    emit(o.out, "transitions_prob.csv", [&](std::ostream& out) { write_matrix(out, tm, true); });
    emit(o.out, "transitions_n_freq.csv", [&](std::ostream& out) { write_matrix(out, nm, false); });
    emit(o.out, "transitions_n_prob.csv", [&](std::ostream& out) { write_matrix(out, nm, true); });
    return 0;
}

int cmd_metrics(const CommonOptions& o) {
    const auto cfg = load_config(o);
    const auto chains = chains_from(o, cfg);
    const auto& set = pick(chains, o.mode == "hybrid" ? ChainMode::hybrid : ChainMode::intra_city);
    const auto k = group_by_node_count(set, ChainMetric::degree, cfg.overflow_at);
    const auto d = group_by_node_count(set, ChainMetric::avg_distance, cfg.overflow_at);
    emit(o.out, "metrics_degree.csv", [&](std::ostream& out) { write_group_summaries(out, k); });
    emit(o.out, "metrics_degree_values.csv", [&](std::ostream& out) { write_group_values(out, k); });
    emit(o.out, "metrics_distance.csv", [&](std::ostream& out) { write_group_summaries(out, d); });
    emit(o.out, "metrics_distance_values.csv", [&](std::ostream& out) { write_group_values(out, d); });
    emit(o.out, "ap_count_pmf.csv", [&](std::ostream& out) { write_pmf(out, ap_count_pmf(set)); });
    return 0;
}

int cmd_hotspot(const CommonOptions& o, bool unweighted) {
    auto cfg = load_config(o);
    if (unweighted) cfg.kde_weighted = false;
    const auto anchors = run_anchor_stage(ingest_from(o, cfg), cfg, o.workers);
    const auto points = hotspot_points(anchors, cfg.kde_weighted);
    const auto raster = kde_raster(points, cfg.kde_radius_m, cfg.effective_kde_cell_m(),
                                   padded_extent(points, cfg.kde_radius_m), o.workers);
    emit(o.out, "hotspot.asc", [&](std::ostream& out) { write_esri_ascii(out, raster); });
    emit(o.out, "hotspot_georef.txt", [&](std::ostream& out) { write_raster_sidecar(out, raster); });
    return 0;
}

int cmd_fit(const std::string& input, const std::string& out_dir) {
    std::ifstream in(input);
    if (!in) throw Error("cannot open pmf file '" + input + "'");
    const auto fit = fit_lognormal(read_pmf(in));
    if (out_dir.empty()) {
        write_fit(std::cout, fit);
    } else {
        emit(out_dir, "fit.txt", [&](std::ostream& out) { write_fit(out, fit); });
    }
    return 0;
}

struct SynthOptions {
    std::string scenario;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> users;
    std::optional<double> ping_pong;
    unsigned workers = 1;
};

int cmd_synth(const SynthOptions& o) {
    auto spec = ScenarioSpec::load(o.scenario);
    if (o.seed) spec.seed = *o.seed;
    if (o.users) spec.n_users = *o.users;
    if (o.ping_pong) spec.ping_pong_rate = *o.ping_pong;
    const auto pop = generate_population(spec, o.workers);
    emit(o.out, "records.csv", [&](std::ostream& out) { write_stay_records(out, pop.records); });
    emit(o.out, "truth.csv", [&](std::ostream& out) { write_ground_truth(out, pop.truth); });
    emit(o.out, "city.geojson", [&](std::ostream& out) { write_city_geojson(out, pop.city_ring); });
    emit(o.out, "city_towers.txt", [&](std::ostream& out) { write_in_city_towers(out, pop); });
    std::cout << fmt::format("{} records, {} user-days\n", pop.records.size(), pop.truth.size());
    return 0;
}

int cmd_run(const CommonOptions& o) {
    const auto cfg = load_config(o);
    const auto m = run_pipeline(cfg, PipelineInputs{o.input, o.city}, o.out, o.workers);
    for (const auto& [k, v] : m.counts) std::cout << k << " = " << v << '\n';
    for (const auto& n : m.notes) std::cerr << "note: " << n << '\n';
    report(o.out, "manifest.txt");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Daily trip-chain analysis of cellphone stay records"};
    app.set_version_flag("--version", std::string(tripchain::kToolVersion));
    app.require_subcommand(1);

    CommonOptions opts;
    auto* ingest = app.add_subcommand("ingest", "Validate and filter stay records; write row counts");
    add_common(ingest, opts, true);
    auto* anchors = app.add_subcommand("anchors", "Extract anchor points; write the AP dump");
    add_common(anchors, opts, true);
    auto* chains = app.add_subcommand("chains", "Build daily trip chains");
    add_common(chains, opts, true);
    add_mode(chains, opts, "Chain mode (default: both)");
    auto* rank = app.add_subcommand("rank", "Rank chain types and mark significant ones");
    add_common(rank, opts, true);
    add_mode(rank, opts, "Chain mode (default: both)");
    auto* transitions = app.add_subcommand("transitions", "Day-to-day intra-city transition matrices");
    add_common(transitions, opts, true);
    auto* metrics = app.add_subcommand("metrics", "Degree and average distance by node count");
    add_common(metrics, opts, true);
    add_mode(metrics, opts, "Chain mode (default: intra)");
    auto* hotspot = app.add_subcommand("hotspot", "Kernel density raster of anchor points");
    add_common(hotspot, opts, true);
    bool unweighted = false;
    hotspot->add_flag("--unweighted", unweighted, "Weight every anchor point 1 instead of its visit count");
    auto* run = app.add_subcommand("run", "Full pipeline with manifest");
    add_common(run, opts, true);

    std::string fit_input, fit_out;
    auto* fit = app.add_subcommand("fit", "Least-squares log-normal fit of an AP-count pmf");
    fit->add_option("--input", fit_input, "pmf file with n,probability rows")->required()->check(CLI::ExistingFile);
    fit->add_option("--out", fit_out, "Output directory (default: print to stdout)");

    SynthOptions synth_opts;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic population with ground truth");
    synth->add_option("--scenario", synth_opts.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    synth->add_option("--out", synth_opts.out, "Output directory")->required();
    synth->add_option("--seed", synth_opts.seed, "Override the scenario seed");
    synth->add_option("--users", synth_opts.users, "Override the number of users");
    synth->add_option("--ping-pong", synth_opts.ping_pong, "Override the ping-pong rate");
    synth->add_option("--workers", synth_opts.workers, "Worker threads (does not affect output)")
        ->check(CLI::Range(1u, 1024u));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*ingest) return cmd_ingest(opts);
        if (*anchors) return cmd_anchors(opts);
        if (*chains) return cmd_chains(opts);
        if (*rank) return cmd_rank(opts);
        if (*transitions) return cmd_transitions(opts);
        if (*metrics) return cmd_metrics(opts);
        if (*hotspot) return cmd_hotspot(opts, unweighted);
        if (*run) return cmd_run(opts);
        if (*fit) return cmd_fit(fit_input, fit_out);
        if (*synth) return cmd_synth(synth_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
