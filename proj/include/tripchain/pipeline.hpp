#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tripchain/chains.hpp"
#include "tripchain/city.hpp"
#include "tripchain/config.hpp"
#include "tripchain/digest.hpp"
#include "tripchain/errors.hpp"
#include "tripchain/hotspot.hpp"
#include "tripchain/ingest.hpp"
#include "tripchain/report.hpp"
#include "tripchain/stats.hpp"
#include "tripchain/transitions.hpp"

namespace tripchain {

inline constexpr const char* kToolVersion = "1.0.0";

/// A stage failure; what() is prefixed with the stage name.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage " + stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct PipelineInputs {
    std::string records_path;
    std::string city_path;
};

struct IngestStage {
    std::vector<UserDayTrace> traces;  // users that passed the gap-day filter
    std::size_t records_parsed = 0;    // after midnight split
    std::size_t records_in_period = 0;
    std::size_t duplicates_removed = 0;
    std::size_t users_total = 0;
    std::size_t users_gap_excluded = 0;
    std::size_t users_kept = 0;
    std::vector<std::string> warnings;
};

struct AnchorStage {
    std::vector<UserAnchors> scopes;
    std::vector<DayVisits> days;  // user, date order
};

struct ChainStage {
    std::vector<DailyChain> hybrid;
    std::vector<DailyChain> intra;
};

IngestStage run_ingest(const StudyConfig& config, const PipelineInputs& inputs, unsigned workers);
IngestStage run_ingest(const StudyConfig& config, std::vector<StayRecord> records,
                       const CityDefinition& city, unsigned workers);
AnchorStage run_anchor_stage(const IngestStage& ingest, const StudyConfig& config, unsigned workers);
ChainStage run_chain_stage(const AnchorStage& anchors, unsigned workers);

/// In-city anchor points weighted by visit count (or 1 when unweighted).
std::vector<WeightedPoint> hotspot_points(const AnchorStage& anchors, bool weighted);

struct RunManifest {
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::pair<std::string, std::string>> inputs;  // label -> path
    std::vector<std::pair<std::string, std::string>> input_digests;
    std::string tool_version = kToolVersion;
    std::vector<std::pair<std::string, std::uint64_t>> counts;
    std::vector<std::pair<std::string, std::string>> outputs;  // file name -> sha256
    std::vector<std::string> notes;

    std::uint64_t count(const std::string& key) const;
    void write(std::ostream& out) const;
};

/// ingest -> anchors -> chains -> {ranking, transitions, metrics, fit, hotspot};
/// writes every artifact plus `manifest.txt` into `out_dir`.
/// Throws StageError naming the failing stage.
RunManifest run_pipeline(const StudyConfig& config, const PipelineInputs& inputs,
                         const std::string& out_dir, unsigned workers = 1);

/// Writes `body(stream)` to dir/name and returns the file's SHA-256.
template <typename Body>
std::string write_artifact(const std::string& dir, const std::string& name, Body&& body) {
    std::filesystem::create_directories(dir);
    const std::string path = (std::filesystem::path(dir) / name).string();
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + path + "'");
        body(out);
        if (!out) throw Error("write failed for '" + path + "'");
    }
    return sha256_file(path);
}

}  // namespace tripchain
