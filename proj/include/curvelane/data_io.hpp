// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "curvelane/kernels.hpp"
#include "curvelane/pareto.hpp"
#include "curvelane/search.hpp"

namespace curvelane::io {

using nlohmann::json;

/// Every document and JSONL record carries this in its "version" field.
inline constexpr int kSchemaVersion = 1;

json to_json(const FusionSpec& spec);
FusionSpec fusion_from_json(const json& j, const std::string& path = "fusion");

/// Infinite locality sigma is written as null.
json to_json(const BlendParamSet& params);
BlendParamSet blend_from_json(const json& j, const std::string& path = "blend");

/// {"backbone": "<encoding>", "fusion": {...}, "blend": {...}}
json to_json(const ArchEncoding& arch);
ArchEncoding arch_from_json(const json& j, const std::string& path = "arch");

json to_json(const Candidate& c);
Candidate candidate_from_json(const json& j, const std::string& path);

json to_json(const ParetoArchive& archive);
ParetoArchive archive_from_json(const json& j);

/// Write-temp-then-rename, so readers never see a partial snapshot.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
void snapshot_archive(const std::filesystem::path& path, const ParetoArchive& archive);
ParetoArchive load_archive(const std::filesystem::path& path);

/// One JSONL line per evaluation, in insertion order.
void write_history(std::ostream& out, const ParetoArchive& archive);

/// CSV: eval_id,encoding,flops,score for the members sorted by FLOPS.
void write_front_csv(std::ostream& out, const ParetoArchive& archive);

// --- lane proposals -------------------------------------------------------

struct ProposalScene {
    std::string image_id;
    LaneProposalSet proposals;
    std::optional<std::vector<Polyline>> gt_lanes;

    bool operator==(const ProposalScene&) const = default;
};

json to_json(const LaneProposalSet& proposals);
LaneProposalSet proposals_from_json(const json& j, const std::string& path = "");
json to_json(const ProposalScene& scene);
ProposalScene scene_from_json(const json& j);

/// Streams a JSONL proposal dump one scene at a time.
class ProposalReader {
public:
    explicit ProposalReader(std::istream& in) : in_(in) {}

    /// Next scene, or nullopt at end of input. Blank lines are skipped.
    /// Throws SchemaError (the message names the input line).
    std::optional<ProposalScene> next();
    std::size_t line() const { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

void write_scene(std::ostream& out, const ProposalScene& scene);
std::vector<ProposalScene> read_proposals(const std::filesystem::path& path);
void write_proposals(const std::filesystem::path& path, const std::vector<ProposalScene>& scenes);

kernels::BlendSample to_sample(const ProposalScene& scene);

// --- lanes ------------------------------------------------------------------

/// CULane `.lines.txt`: one lane per line, alternating x y values. Points with
/// negative x are dropped; points come back sorted by y. Throws FormatError.
std::vector<Polyline> parse_culane_lines(std::istream& in);
std::vector<Polyline> read_culane_lines(const std::filesystem::path& path);
void write_culane_lines(std::ostream& out, const std::vector<Polyline>& lanes);
void write_culane_lines(const std::filesystem::path& path, const std::vector<Polyline>& lanes);

json to_json(const LaneLine& line);
json lanes_to_json(const std::string& image_id, const std::vector<LaneLine>& lanes);

json to_json(const MetricsReport& report);

// --- evaluator wire protocol -------------------------------------------------

struct EvalRequest {
    std::uint64_t eval_id = 0;
    ArchEncoding arch;
    Resolution resolution;
};

struct EvalResponse {
    std::optional<std::uint64_t> eval_id;
    double score = 0.0;
    json diagnostics;
};

json to_json(const EvalRequest& request);
EvalRequest eval_request_from_json(const json& j);
json to_json(const EvalResponse& response);
/// Throws SchemaError on malformed JSON, a missing or out-of-range score, or an eval_id that does not echo `expected_id`.
EvalResponse parse_eval_response(std::string_view text, std::uint64_t expected_id);

// --- configuration -------------------------------------------------------------

/// Overlays the keys present in `j` on `base`.
SearchConfig search_config_from_json(const json& j, SearchConfig base = {});
json to_json(const SearchConfig& config);

} // namespace curvelane::io
