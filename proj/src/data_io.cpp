// SPDX-License-Identifier: Apache-2.0
#include "curvelane/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include "curvelane/errors.hpp"

namespace curvelane::io {

namespace {

std::string sub(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

std::string idx(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

const json& field(const json& j, const std::string& path, const char* key)
{
    if (!j.is_object()) {
        throw SchemaError(path.empty() ? "$" : path, "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        throw SchemaError(sub(path, key), "missing field");
    }
    return *it;
}

double number(const json& j, const std::string& path)
{
    if (!j.is_number()) {
        throw SchemaError(path, "expected a number");
    }
    return j.get<double>();
}

int integer(const json& j, const std::string& path)
{
    if (!j.is_number_integer()) {
        throw SchemaError(path, "expected an integer");
    }
    return j.get<int>();
}

std::uint64_t unsigned_integer(const json& j, const std::string& path)
{
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
        throw SchemaError(path, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

std::string string(const json& j, const std::string& path)
{
    if (!j.is_string()) {
        throw SchemaError(path, "expected a string");
    }
    return j.get<std::string>();
}

const json& array(const json& j, const std::string& path)
{
    if (!j.is_array()) {
        throw SchemaError(path, "expected an array");
    }
    return j;
}

std::vector<int> int_list(const json& j, const std::string& path)
{
    std::vector<int> out;
    const auto& a = array(j, path);
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.push_back(integer(a[i], idx(path, i)));
    }
    return out;
}

void check_version(const json& j, const std::string& path)
{
    const int v = integer(field(j, path, "version"), sub(path, "version"));
    if (v != kSchemaVersion) {
        throw VersionError("unsupported schema version " + std::to_string(v) + " (expected " +
                           std::to_string(kSchemaVersion) + ")");
    }
}

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

json polyline_json(const Polyline& line)
{
    json pts = json::array();
    for (const auto& p : line) {
        pts.push_back({p.x, p.y});
    }
    return pts;
}

Polyline polyline_from_json(const json& j, const std::string& path)
{
    Polyline out;
    const auto& a = array(j, path);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto p = idx(path, i);
        const auto& pt = array(a[i], p);
        if (pt.size() != 2) {
            throw SchemaError(p, "expected [x, y]");
        }
        out.push_back({number(pt[0], idx(p, 0)), number(pt[1], idx(p, 1))});
    }
    return out;
}

} // namespace

json to_json(const FusionSpec& spec)
{
    json layers = json::array();
    for (const auto& l : spec.layers) {
        layers.push_back({{"input_a", l.input_a}, {"input_b", l.input_b}, {"output_level", l.output_level}});
    }
    return {{"layers", layers}, {"channels", spec.channels}, {"heads_at", spec.heads_at}};
}

FusionSpec fusion_from_json(const json& j, const std::string& path)
{
    FusionSpec spec;
    const auto lp = sub(path, "layers");
    const auto& layers = array(field(j, path, "layers"), lp);
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto p = idx(lp, i);
        FusionLayer l;
        l.input_a = integer(field(layers[i], p, "input_a"), sub(p, "input_a"));
        l.input_b = integer(field(layers[i], p, "input_b"), sub(p, "input_b"));
        l.output_level = integer(field(layers[i], p, "output_level"), sub(p, "output_level"));
        spec.layers.push_back(l);
    }
    spec.channels = integer(field(j, path, "channels"), sub(path, "channels"));
    spec.heads_at = int_list(field(j, path, "heads_at"), sub(path, "heads_at"));
    return spec;
}

json to_json(const BlendParamSet& params)
{
    json levels = json::array();
    for (const auto& [level, p] : params.per_level) {
        levels.push_back({{"level", level},
                          {"alpha1", p.alpha1},
                          {"beta1", p.beta1},
                          {"alpha2", p.alpha2},
                          {"center_x", p.center_x},
                          {"center_y", p.center_y}});
    }
    json j = {{"per_level", levels},
              {"score_threshold", params.score_threshold},
              {"group_distance", params.group_distance}};
    j["locality_sigma"] = std::isinf(params.locality_sigma) ? json(nullptr) : json(params.locality_sigma);
    return j;
}

BlendParamSet blend_from_json(const json& j, const std::string& path)
{
    BlendParamSet out;
    const auto lp = sub(path, "per_level");
    const auto& levels = array(field(j, path, "per_level"), lp);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto p = idx(lp, i);
        const auto& e = levels[i];
        BlendParams b;
        b.alpha1 = number(field(e, p, "alpha1"), sub(p, "alpha1"));
        b.beta1 = number(field(e, p, "beta1"), sub(p, "beta1"));
        b.alpha2 = number(field(e, p, "alpha2"), sub(p, "alpha2"));
        b.center_x = number(field(e, p, "center_x"), sub(p, "center_x"));
        b.center_y = number(field(e, p, "center_y"), sub(p, "center_y"));
        out.per_level[integer(field(e, p, "level"), sub(p, "level"))] = b;
    }
    out.score_threshold = number(field(j, path, "score_threshold"), sub(path, "score_threshold"));
    out.group_distance = number(field(j, path, "group_distance"), sub(path, "group_distance"));
    const auto& sigma = field(j, path, "locality_sigma");
    out.locality_sigma =
        sigma.is_null() ? std::numeric_limits<double>::infinity() : number(sigma, sub(path, "locality_sigma"));
    return out;
}

json to_json(const ArchEncoding& arch)
{
    return {{"backbone", serialize_backbone(arch.backbone)}, {"fusion", to_json(arch.fusion)}, {"blend", to_json(arch.blend)}};
}

ArchEncoding arch_from_json(const json& j, const std::string& path)
{
    ArchEncoding arch;
    const auto bp = sub(path, "backbone");
    try {
        arch.backbone = parse_backbone(string(field(j, path, "backbone"), bp));
    } catch (const SyntaxError& e) {
        throw SchemaError(bp, e.what());
    } catch (const ConstraintError& e) {
        throw SchemaError(bp, e.what());
    }
    arch.fusion = fusion_from_json(field(j, path, "fusion"), sub(path, "fusion"));
    arch.blend = blend_from_json(field(j, path, "blend"), sub(path, "blend"));
    try {
        validate(arch);
    } catch (const ConstraintError& e) {
        throw SchemaError(path.empty() ? "$" : path, e.what());
    }
    return arch;
}

json to_json(const Candidate& c)
{
    json j = {{"eval_id", c.eval_id},
              {"arch", to_json(c.arch)},
              {"flops", c.flops},
              {"birth_step", c.birth_step},
              {"error", c.error}};
    j["score"] = c.score ? json(*c.score) : json(nullptr);
    j["parent"] = c.parent ? json(*c.parent) : json(nullptr);
    return j;
}

Candidate candidate_from_json(const json& j, const std::string& path)
{
    Candidate c;
    c.eval_id = unsigned_integer(field(j, path, "eval_id"), sub(path, "eval_id"));
    c.arch = arch_from_json(field(j, path, "arch"), sub(path, "arch"));
    c.flops = unsigned_integer(field(j, path, "flops"), sub(path, "flops"));
    c.birth_step = unsigned_integer(field(j, path, "birth_step"), sub(path, "birth_step"));
    c.error = string(field(j, path, "error"), sub(path, "error"));
    const auto& score = field(j, path, "score");
    if (!score.is_null()) {
        c.score = number(score, sub(path, "score"));
    }
    const auto& parent = field(j, path, "parent");
    if (!parent.is_null()) {
        c.parent = unsigned_integer(parent, sub(path, "parent"));
    }
    return c;
}

json to_json(const ParetoArchive& archive)
{
    json history = json::array();
    for (const auto& c : archive.history()) {
        history.push_back(to_json(c));
    }
    json members = json::array();
    for (const auto& c : archive.members()) {
        members.push_back(to_json(c));
    }
    return {{"version", kSchemaVersion},
            {"format", "curvelane.archive"},
            {"next_eval_id", archive.next_eval_id()},
            {"history", history},
            {"members", members}};
}

ParetoArchive archive_from_json(const json& j)
{
    check_version(j, "");
    const auto& history = array(field(j, "", "history"), "history");
    std::vector<Candidate> log;
    for (std::size_t i = 0; i < history.size(); ++i) {
        log.push_back(candidate_from_json(history[i], idx("history", i)));
    }
    ParetoArchive archive;
    try {
        archive = ParetoArchive::replay(log);
    } catch (const DuplicateError& e) {
        throw SchemaError("history", e.what());
    }

    const auto& members = array(field(j, "", "members"), "members");
    std::vector<Candidate> stored;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto p = idx("members", i);
        std::string id = "unknown";
        if (members[i].is_object() && members[i].contains("eval_id")) {
            id = members[i]["eval_id"].dump();
        }
        try {
            stored.push_back(candidate_from_json(members[i], p));
        } catch (const SchemaError& e) {
            throw SchemaError(e.path(), std::string("member with eval_id ") + id + ": " + e.what());
        }
    }
    auto by_id = [](const Candidate& a, const Candidate& b) { return a.eval_id < b.eval_id; };
    std::vector<Candidate> replayed = archive.members();
    std::sort(stored.begin(), stored.end(), by_id);
    std::sort(replayed.begin(), replayed.end(), by_id);
    for (std::size_t i = 0; i < std::max(stored.size(), replayed.size()); ++i) {
        if (i >= stored.size() || i >= replayed.size() || !(stored[i] == replayed[i])) {
            const auto& c = i < stored.size() ? stored[i] : replayed[i];
            throw SchemaError("members", "member with eval_id " + std::to_string(c.eval_id) +
                                             " disagrees with the front rebuilt from history");
        }
    }
    return archive;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw IoError("short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

void snapshot_archive(const std::filesystem::path& path, const ParetoArchive& archive)
{
    write_file_atomic(path, to_json(archive).dump(1) + "\n");
}

ParetoArchive load_archive(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", e.what());
    }
    return archive_from_json(j);
}

void write_history(std::ostream& out, const ParetoArchive& archive)
{
    for (const auto& c : archive.history()) {
        auto j = to_json(c);
        j["version"] = kSchemaVersion;
        out << j.dump() << '\n';
    }
}

void write_front_csv(std::ostream& out, const ParetoArchive& archive)
{
    auto members = archive.members();
    std::sort(members.begin(), members.end(), [](const Candidate& a, const Candidate& b) {
        return a.flops != b.flops ? a.flops < b.flops : a.eval_id < b.eval_id;
    });
    out << "eval_id,encoding,flops,score\n";
    for (const auto& c : members) {
        // Encodings contain commas, so they are quoted.
        out << c.eval_id << ",\"" << serialize_backbone(c.arch.backbone) << "\"," << c.flops << ','
            << format_double(c.score.value_or(0.0)) << '\n';
    }
}

json to_json(const LaneProposalSet& proposals)
{
    json heads = json::array();
    for (const auto& h : proposals.heads) {
        json cells = json::array();
        for (const auto& c : h.cells) {
            json offsets = json::array();
            for (const auto& o : c.offsets) {
                offsets.push_back(o ? json(*o) : json(nullptr));
            }
            cells.push_back(
                {{"cx", c.center_x}, {"cy", c.center_y}, {"score", c.score}, {"offsets", offsets}, {"end_y", c.end_y}});
        }
        heads.push_back({{"level", h.level}, {"grid_w", h.grid_w}, {"grid_h", h.grid_h}, {"cells", cells}});
    }
    const auto& l = proposals.layout;
    return {{"layout", {{"width", l.image_width}, {"height", l.image_height}, {"rows", l.rows}}}, {"heads", heads}};
}

LaneProposalSet proposals_from_json(const json& j, const std::string& path)
{
    LaneProposalSet out;
    const auto lp = sub(path, "layout");
    const auto& layout = field(j, path, "layout");
    out.layout.image_width = number(field(layout, lp, "width"), sub(lp, "width"));
    out.layout.image_height = number(field(layout, lp, "height"), sub(lp, "height"));
    const auto rp = sub(lp, "rows");
    const auto& rows = array(field(layout, lp, "rows"), rp);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.layout.rows.push_back(number(rows[i], idx(rp, i)));
    }

    const auto hp = sub(path, "heads");
    const auto& heads = array(field(j, path, "heads"), hp);
    for (std::size_t h = 0; h < heads.size(); ++h) {
        const auto p = idx(hp, h);
        HeadGrid grid;
        grid.level = integer(field(heads[h], p, "level"), sub(p, "level"));
        grid.grid_w = integer(field(heads[h], p, "grid_w"), sub(p, "grid_w"));
        grid.grid_h = integer(field(heads[h], p, "grid_h"), sub(p, "grid_h"));
        const auto cp = sub(p, "cells");
        const auto& cells = array(field(heads[h], p, "cells"), cp);
        if (cells.size() != static_cast<std::size_t>(grid.grid_w) * static_cast<std::size_t>(grid.grid_h)) {
            throw SchemaError(cp, "expected grid_w * grid_h cells");
        }
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const auto q = idx(cp, k);
            GridCell cell;
            cell.center_x = number(field(cells[k], q, "cx"), sub(q, "cx"));
            cell.center_y = number(field(cells[k], q, "cy"), sub(q, "cy"));
            cell.score = number(field(cells[k], q, "score"), sub(q, "score"));
            if (cell.score < 0.0 || cell.score > 1.0) {
                throw SchemaError(sub(q, "score"), "score outside [0, 1]");
            }
            cell.end_y = number(field(cells[k], q, "end_y"), sub(q, "end_y"));
            const auto op = sub(q, "offsets");
            const auto& offsets = array(field(cells[k], q, "offsets"), op);
            if (offsets.size() != out.layout.rows.size()) {
                throw SchemaError(op, "expected one offset per anchor row");
            }
            for (std::size_t z = 0; z < offsets.size(); ++z) {
                cell.offsets.push_back(offsets[z].is_null() ? std::nullopt
                                                            : std::optional<double>(number(offsets[z], idx(op, z))));
            }
            grid.cells.push_back(std::move(cell));
        }
        out.heads.push_back(std::move(grid));
    }
    return out;
}

json to_json(const ProposalScene& scene)
{
    json j = to_json(scene.proposals);
    j["version"] = kSchemaVersion;
    j["image_id"] = scene.image_id;
    if (scene.gt_lanes) {
        json lanes = json::array();
        for (const auto& l : *scene.gt_lanes) {
            lanes.push_back(polyline_json(l));
        }
        j["gt_lanes"] = lanes;
    }
    return j;
}

ProposalScene scene_from_json(const json& j)
{
    check_version(j, "");
    ProposalScene scene;
    scene.image_id = string(field(j, "", "image_id"), "image_id");
    scene.proposals = proposals_from_json(j, "");
    if (auto it = j.find("gt_lanes"); it != j.end()) {
        std::vector<Polyline> lanes;
        const auto& a = array(*it, "gt_lanes");
        for (std::size_t i = 0; i < a.size(); ++i) {
            lanes.push_back(polyline_from_json(a[i], idx("gt_lanes", i)));
        }
        scene.gt_lanes = std::move(lanes);
    }
    return scene;
}

std::optional<ProposalScene> ProposalReader::next()
{
    std::string text;
    while (std::getline(in_, text)) {
        ++line_;
        if (text.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw SchemaError("$", "line " + std::to_string(line_) + ": " + e.what());
        }
        try {
            return scene_from_json(j);
        } catch (const SchemaError& e) {
            throw SchemaError(e.path(), "line " + std::to_string(line_) + ": " + e.what());
        }
    }
    return std::nullopt;
}

void write_scene(std::ostream& out, const ProposalScene& scene)
{
    out << to_json(scene).dump() << '\n';
}

std::vector<ProposalScene> read_proposals(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    ProposalReader reader(in);
    std::vector<ProposalScene> out;
    while (auto s = reader.next()) {
        out.push_back(std::move(*s));
    }
    return out;
}

void write_proposals(const std::filesystem::path& path, const std::vector<ProposalScene>& scenes)
{
    std::ostringstream out;
    for (const auto& s : scenes) {
        write_scene(out, s);
    }
    write_file_atomic(path, out.str());
}

kernels::BlendSample to_sample(const ProposalScene& scene)
{
    return {scene.proposals, scene.gt_lanes.value_or(std::vector<Polyline>{})};
}

std::vector<Polyline> parse_culane_lines(std::istream& in)
{
    std::vector<Polyline> lanes;
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(in, text)) {
        ++line_no;
        std::istringstream tokens(text);
        std::vector<double> values;
        std::string token;
        while (tokens >> token) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
            if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(v)) {
                throw FormatError(line_no, token, "not a number");
            }
            values.push_back(v);
        }
        if (values.empty()) {
            continue;
        }
        if (values.size() % 2 != 0) {
            throw FormatError(line_no, token, "odd number of coordinates");
        }
        Polyline lane;
        for (std::size_t i = 0; i < values.size(); i += 2) {
            if (values[i] >= 0.0) {
                lane.push_back({values[i], values[i + 1]});
            }
        }
        std::stable_sort(lane.begin(), lane.end(), [](const Point2& a, const Point2& b) { return a.y < b.y; });
        if (lane.size() >= 2) {
            lanes.push_back(std::move(lane));
        }
    }
    return lanes;
}

std::vector<Polyline> read_culane_lines(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return parse_culane_lines(in);
}

void write_culane_lines(std::ostream& out, const std::vector<Polyline>& lanes)
{
    for (const auto& lane : lanes) {
        for (std::size_t i = 0; i < lane.size(); ++i) {
            out << (i ? " " : "") << format_double(lane[i].x) << ' ' << format_double(lane[i].y);
        }
        out << '\n';
    }
}

void write_culane_lines(const std::filesystem::path& path, const std::vector<Polyline>& lanes)
{
    std::ostringstream out;
    write_culane_lines(out, lanes);
    write_file_atomic(path, out.str());
}

json to_json(const LaneLine& line)
{
    json points = json::array();
    json sources = json::array();
    for (const auto& p : line.points) {
        points.push_back({p.x, p.y});
        sources.push_back({p.source.level, p.source.cell});
    }
    return {{"score", line.score}, {"points", points}, {"sources", sources}};
}

json lanes_to_json(const std::string& image_id, const std::vector<LaneLine>& lanes)
{
    json arr = json::array();
    for (const auto& l : lanes) {
        arr.push_back(to_json(l));
    }
    return {{"version", kSchemaVersion}, {"image_id", image_id}, {"lanes", arr}};
}

json to_json(const MetricsReport& r)
{
    json scenes = json::array();
    for (const auto& s : r.per_scene) {
        scenes.push_back({s.tp, s.fp, s.fn});
    }
    return {{"version", kSchemaVersion},
            {"tp", r.tp},
            {"fp", r.fp},
            {"fn", r.fn},
            {"precision", r.precision},
            {"recall", r.recall},
            {"f1", r.f1},
            {"per_scene", scenes}};
}

json to_json(const EvalRequest& r)
{
    return {{"version", kSchemaVersion},
            {"eval_id", r.eval_id},
            {"encoding", serialize_backbone(r.arch.backbone)},
            {"fusion", to_json(r.arch.fusion)},
            {"blend", to_json(r.arch.blend)},
            {"resolution", {r.resolution.width, r.resolution.height}}};
}

EvalRequest eval_request_from_json(const json& j)
{
    check_version(j, "");
    EvalRequest r;
    r.eval_id = unsigned_integer(field(j, "", "eval_id"), "eval_id");
    json arch = {{"backbone", field(j, "", "encoding")}, {"fusion", field(j, "", "fusion")}, {"blend", field(j, "", "blend")}};
    r.arch = arch_from_json(arch, "");
    const auto& res = array(field(j, "", "resolution"), "resolution");
    if (res.size() != 2) {
        throw SchemaError("resolution", "expected [width, height]");
    }
    r.resolution = {integer(res[0], "resolution[0]"), integer(res[1], "resolution[1]")};
    return r;
}

json to_json(const EvalResponse& r)
{
    json j = {{"score", r.score}};
    if (r.eval_id) {
        j["eval_id"] = *r.eval_id;
    }
    if (!r.diagnostics.is_null()) {
        j["diagnostics"] = r.diagnostics;
    }
    return j;
}

EvalResponse parse_eval_response(std::string_view text, std::uint64_t expected_id)
{
    std::string_view line;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto candidate = text.substr(0, nl);
        if (candidate.find_first_not_of(" \t\r") != std::string_view::npos) {
            line = candidate;
            break;
        }
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    }
    if (line.empty()) {
        throw SchemaError("$", "empty response");
    }
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", e.what());
    }
    EvalResponse r;
    r.score = number(field(j, "", "score"), "score");
    if (!(r.score >= 0.0 && r.score <= 1.0)) {
        throw SchemaError("score", "score outside [0, 1]");
    }
    if (auto it = j.find("eval_id"); it != j.end()) {
        r.eval_id = unsigned_integer(*it, "eval_id");
        if (*r.eval_id != expected_id) {
            throw SchemaError("eval_id", "response echoes " + std::to_string(*r.eval_id) + ", expected " +
                                             std::to_string(expected_id));
        }
    }
    if (auto it = j.find("diagnostics"); it != j.end()) {
        r.diagnostics = *it;
    }
    return r;
}

SearchConfig search_config_from_json(const json& j, SearchConfig c)
{
    if (!j.is_object()) {
        throw SchemaError("$", "expected an object");
    }
    auto opt_size = [&](const char* key, std::size_t& dst) {
        if (j.contains(key)) {
            dst = unsigned_integer(j[key], key);
        }
    };
    auto opt_double = [&](const json& src, const std::string& path, const char* key, double& dst) {
        if (src.contains(key)) {
            dst = number(src[key], sub(path, key));
        }
    };
    opt_size("budget", c.budget);
    opt_size("initial_population", c.initial_population);
    opt_size("workers", c.workers);
    opt_size("snapshot_every", c.snapshot_every);
    if (j.contains("seed")) {
        c.seed = unsigned_integer(j["seed"], "seed");
    }
    opt_double(j, "", "p_backbone", c.p_backbone);
    opt_double(j, "", "p_fusion", c.p_fusion);
    opt_double(j, "", "p_blend", c.p_blend);
    if (j.contains("resolution")) {
        const auto& r = array(j["resolution"], "resolution");
        if (r.size() != 2) {
            throw SchemaError("resolution", "expected [width, height]");
        }
        c.resolution = {integer(r[0], "resolution[0]"), integer(r[1], "resolution[1]")};
    }
    if (j.contains("anchor_rows")) {
        c.cost.anchor_rows = integer(j["anchor_rows"], "anchor_rows");
    }
    if (j.contains("mutation")) {
        const auto& m = j["mutation"];
        opt_double(m, "mutation", "position", c.backbone_rates.position);
        opt_double(m, "mutation", "depth", c.backbone_rates.depth);
        opt_double(m, "mutation", "width", c.backbone_rates.width);
        opt_double(m, "mutation", "kind", c.backbone_rates.kind);
    }
    if (j.contains("space")) {
        const auto& s = j["space"];
        if (s.contains("kinds")) {
            c.space.kinds.clear();
            const auto& kinds = array(s["kinds"], "space.kinds");
            for (std::size_t i = 0; i < kinds.size(); ++i) {
                const auto k = string(kinds[i], idx("space.kinds", i));
                if (k != "RB" && k != "BB") {
                    throw SchemaError(idx("space.kinds", i), "expected RB or BB");
                }
                c.space.kinds.push_back(k == "RB" ? BlockKind::Basic : BlockKind::Bottleneck);
            }
        }
        if (s.contains("base_channels")) {
            c.space.base_channels = int_list(s["base_channels"], "space.base_channels");
        }
        if (s.contains("stage_counts")) {
            c.space.stage_counts = int_list(s["stage_counts"], "space.stage_counts");
        }
        if (s.contains("min_blocks")) {
            c.space.min_blocks = integer(s["min_blocks"], "space.min_blocks");
        }
        if (s.contains("max_blocks")) {
            c.space.max_blocks = integer(s["max_blocks"], "space.max_blocks");
        }
        if (s.contains("fusion_layers")) {
            c.space.fusion_layers = integer(s["fusion_layers"], "space.fusion_layers");
        }
        if (s.contains("fusion_channels")) {
            c.space.fusion_channels = integer(s["fusion_channels"], "space.fusion_channels");
        }
    }
    return c;
}

json to_json(const SearchConfig& c)
{
    json kinds = json::array();
    for (auto k : c.space.kinds) {
        kinds.push_back(to_string(k));
    }
    return {{"budget", c.budget},
            {"initial_population", c.initial_population},
            {"workers", c.workers},
            {"seed", c.seed},
            {"snapshot_every", c.snapshot_every},
            {"p_backbone", c.p_backbone},
            {"p_fusion", c.p_fusion},
            {"p_blend", c.p_blend},
            {"resolution", {c.resolution.width, c.resolution.height}},
            {"anchor_rows", c.cost.anchor_rows},
            {"mutation",
             {{"position", c.backbone_rates.position},
              {"depth", c.backbone_rates.depth},
              {"width", c.backbone_rates.width},
              {"kind", c.backbone_rates.kind}}},
            {"space",
             {{"kinds", kinds},
              {"base_channels", c.space.base_channels},
              {"stage_counts", c.space.stage_counts},
              {"min_blocks", c.space.min_blocks},
              {"max_blocks", c.space.max_blocks},
              {"fusion_layers", c.space.fusion_layers},
              {"fusion_channels", c.space.fusion_channels}}}};
}

} // namespace curvelane::io
