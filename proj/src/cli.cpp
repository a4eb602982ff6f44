// SPDX-License-Identifier: Apache-2.0
#include "curvelane/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"

#include "curvelane/data_io.hpp"
#include "curvelane/errors.hpp"
#include "curvelane/evaluator.hpp"
#include "curvelane/point_blend.hpp"
#include "curvelane/search.hpp"
#include "curvelane/synth.hpp"

namespace curvelane::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

/// Failures caused by the user's input files rather than by this program.
class DataError : public Error {
public:
    using Error::Error;
};

json read_json_file(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string(), e.what());
    }
}

std::vector<int> parse_levels(const std::string& text)
{
    std::vector<int> out;
    std::stringstream s(text);
    std::string item;
    while (std::getline(s, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::logic_error&) {
            throw DataError("bad level list '" + text + "'");
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

json spec_json(const BackboneSpec& spec)
{
    json layout = json::array();
    for (const auto& b : stage_layout(spec)) {
        layout.push_back({{"block", b.block},
                          {"stage", b.stage},
                          {"stride", b.stride},
                          {"downsample_factor", b.downsample_factor},
                          {"width", b.width}});
    }
    return {{"version", io::kSchemaVersion},
            {"encoding", serialize_backbone(spec)},
            {"kind", to_string(spec.kind)},
            {"base_channels", spec.base_channels},
            {"num_blocks", spec.num_blocks},
            {"downsample_at", spec.downsample_at},
            {"double_channels_at", spec.double_channels_at},
            {"stage_count", spec.stage_count()},
            {"blocks", layout}};
}

/// Files named `*.lines.txt` under `root`, as sorted relative paths.
std::vector<fs::path> lines_files(const fs::path& root)
{
    if (!fs::is_directory(root)) {
        throw DataError("not a directory: " + root.string());
    }
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.size() > 10 && name.ends_with(".lines.txt")) {
            out.push_back(fs::relative(e.path(), root));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<SceneLanes> load_pairs(const fs::path& pred_dir, const fs::path& gt_dir)
{
    std::vector<SceneLanes> scenes;
    for (const auto& rel : lines_files(gt_dir)) {
        const auto pred = pred_dir / rel;
        if (!fs::exists(pred)) {
            throw DataError("missing prediction file " + pred.string());
        }
        SceneLanes s;
        try {
            s.pred = io::read_culane_lines(pred);
            s.gt = io::read_culane_lines(gt_dir / rel);
        } catch (const FormatError& e) {
            throw DataError(rel.string() + ": " + e.what());
        }
        scenes.push_back(std::move(s));
    }
    if (scenes.empty()) {
        throw DataError("no .lines.txt files under " + gt_dir.string());
    }
    return scenes;
}

Canvas parse_canvas(const std::string& text)
{
    int w = 0;
    int h = 0;
    char x = 0;
    std::istringstream s(text);
    if (!(s >> w >> x >> h) || x != 'x' || w <= 0 || h <= 0) {
        throw DataError("canvas must look like 1640x590, got '" + text + "'");
    }
    return {w, h};
}

std::string fmt(double v, int precision = 6)
{
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

std::unique_ptr<Evaluator> make_evaluator(const std::string& spec, double timeout_s)
{
    if (spec == "builtin:synthetic") {
        return std::make_unique<SyntheticEvaluator>();
    }
    if (spec.starts_with("exec:") && spec.size() > 5) {
        return std::make_unique<ExternalEvaluator>(
            spec.substr(5), std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000.0)));
    }
    if (spec.starts_with("replay:") && spec.size() > 7) {
        std::vector<kernels::BlendSample> samples;
        for (const auto& s : io::read_proposals(spec.substr(7))) {
            if (!s.gt_lanes) {
                throw DataError("replay scenes need ground truth; " + s.image_id + " has none");
            }
            samples.push_back(io::to_sample(s));
        }
        if (samples.empty()) {
            throw DataError("replay corpus is empty");
        }
        MatchOptions options;
        options.canvas = kernels::canvas_of(samples.front().proposals.layout);
        return std::make_unique<ReplayEvaluator>(std::move(samples), options);
    }
    throw CLI::ValidationError("--evaluator", "expected builtin:synthetic, exec:<command> or replay:<proposals.jsonl>");
}

// --- subcommands ---------------------------------------------------------------

struct Common {
    bool json = false;
    std::uint64_t seed = 0;
};

int cmd_parse_arch(const std::string& encoding, const Common& c, std::ostream& out)
{
    const auto spec = parse_backbone(encoding);
    if (c.json) {
        out << spec_json(spec).dump() << '\n';
        return kExitOk;
    }
    out << "encoding        " << serialize_backbone(spec) << '\n'
        << "kind            " << (spec.kind == BlockKind::Basic ? "basic residual" : "bottleneck") << '\n'
        << "base channels   " << spec.base_channels << '\n'
        << "blocks          " << spec.num_blocks << '\n'
        << "stages          " << spec.stage_count() << '\n';
    out << "downsample at   ";
    for (int d : spec.downsample_at) {
        out << d << ' ';
    }
    out << "\ndouble at       ";
    for (int d : spec.double_channels_at) {
        out << d << ' ';
    }
    out << '\n';
    return kExitOk;
}

struct CostArgs {
    std::string encoding;
    std::string arch_file;
    std::string heads = "1";
    int width = 512;
    int height = 288;
    int anchor_rows = 72;
    bool per_layer = false;
};

int cmd_cost(const CostArgs& a, const Common& c, std::ostream& out)
{
    ArchEncoding arch;
    if (!a.arch_file.empty()) {
        arch = io::arch_from_json(read_json_file(a.arch_file));
    } else {
        if (a.encoding.empty()) {
            throw CLI::ValidationError("cost", "give an encoding or --arch");
        }
        arch.backbone = parse_backbone(a.encoding);
        arch.fusion.heads_at = parse_levels(a.heads);
        validate(arch.fusion, arch.backbone.stage_count());
    }
    CostOptions options;
    options.anchor_rows = a.anchor_rows;
    const Resolution res{a.width, a.height};
    const auto report = candidate_cost(arch, res, options);
    const auto levels = feature_levels(arch.backbone, res, options);

    if (c.json) {
        json comps = json::array();
        for (const auto& p : report.per_component) {
            comps.push_back({{"label", p.label}, {"flops", p.flops}, {"params", p.params}});
        }
        json lv = json::array();
        for (const auto& l : levels) {
            lv.push_back({{"channels", l.channels}, {"width", l.width}, {"height", l.height}});
        }
        out << json{{"version", io::kSchemaVersion},
                    {"encoding", serialize_backbone(arch.backbone)},
                    {"heads_at", arch.fusion.heads_at},
                    {"resolution", {res.width, res.height}},
                    {"stem_factor", report.stem_factor},
                    {"total_flops", report.total_flops},
                    {"total_params", report.total_params},
                    {"feature_levels", lv},
                    {"per_component", comps}}
                   .dump()
            << '\n';
        return kExitOk;
    }
    out << serialize_backbone(arch.backbone) << " at " << res.width << "x" << res.height << '\n'
        << "FLOPS   " << report.total_flops << " (" << fmt(report.total_flops / 1e9, 4) << " G)\n"
        << "params  " << report.total_params << " (" << fmt(report.total_params / 1e6, 4) << " M)\n";
    if (a.per_layer) {
        for (const auto& p : report.per_component) {
            out << "  " << std::left << std::setw(20) << p.label << std::right << std::setw(14) << p.flops
                << std::setw(12) << p.params << '\n';
        }
    }
    return kExitOk;
}

int cmd_space_size(const std::string& config_file, const Common& c, std::ostream& out)
{
    SearchConfig config;
    if (!config_file.empty()) {
        config = io::search_config_from_json(read_json_file(config_file));
    }
    const auto report = space_cardinality(config.space);
    // Orders of magnitude away from the published figures.
    const double backbone_gap = std::log10(report.backbone.convert_to<double>() / 5e12);
    const double fusion_gap = std::log10(report.fusion.convert_to<double>() / 1e3);
    if (c.json) {
        out << json{{"version", io::kSchemaVersion},
                    {"backbone", report.backbone.str()},
                    {"fusion", report.fusion.str()},
                    {"backbone_log10_gap", backbone_gap},
                    {"fusion_log10_gap", fusion_gap},
                    {"backbone_within_two_orders", std::abs(backbone_gap) <= 2.0},
                    {"fusion_within_two_orders", std::abs(fusion_gap) <= 2.0},
                    {"assumptions", report.assumptions}}
                   .dump()
            << '\n';
        return kExitOk;
    }
    out << "backbone genomes  " << report.backbone.str() << "  (log10 gap to 5e12: " << fmt(backbone_gap, 3) << ")\n"
        << "fusion genomes    " << report.fusion.str() << "  (log10 gap to 1e3: " << fmt(fusion_gap, 3) << ")\n"
        << "assumptions:\n";
    for (const auto& a : report.assumptions) {
        out << "  - " << a << '\n';
    }
    return kExitOk;
}

struct SearchArgs {
    std::size_t budget = 200;
    std::size_t workers = 1;
    std::size_t initial = 16;
    std::size_t snapshot_every = 50;
    std::string evaluator = "builtin:synthetic";
    std::string out_dir = "search_out";
    std::string config_file;
    double timeout_s = 5400.0;
    bool resume = false;
};

int cmd_search(const SearchArgs& a, const Common& c, const CLI::App& sub, std::ostream& out, std::ostream& err)
{
    SearchConfig config;
    if (!a.config_file.empty()) {
        config = io::search_config_from_json(read_json_file(a.config_file));
    }
    // Explicit flags win over the config file.
    const bool from_file = !a.config_file.empty();
    auto given = [&](const char* name) { return !from_file || sub.count(name) > 0; };
    if (given("--budget")) {
        config.budget = a.budget;
    }
    if (given("--workers")) {
        config.workers = a.workers;
    }
    if (given("--initial")) {
        config.initial_population = a.initial;
    }
    if (given("--seed")) {
        config.seed = c.seed;
    }
    config.snapshot_every = a.snapshot_every;
    if (config.workers == 0) {
        throw CLI::ValidationError("--workers", "must be at least 1");
    }

    const fs::path dir = a.out_dir;
    fs::create_directories(dir);
    const auto archive_path = dir / "archive.json";
    config.on_snapshot = [&](const ParetoArchive& archive) { io::snapshot_archive(archive_path, archive); };

    const auto evaluator = make_evaluator(a.evaluator, a.timeout_s);
    ParetoArchive archive;
    if (a.resume) {
        if (!fs::exists(archive_path)) {
            throw DataError("nothing to resume: " + archive_path.string() + " does not exist");
        }
        archive = resume_search(io::load_archive(archive_path), config, *evaluator);
    } else {
        archive = run_search(config, *evaluator);
    }

    io::snapshot_archive(archive_path, archive);
    std::ostringstream history;
    io::write_history(history, archive);
    io::write_file_atomic(dir / "history.jsonl", history.str());
    std::ostringstream front;
    io::write_front_csv(front, archive);
    io::write_file_atomic(dir / "front.csv", front.str());

    std::size_t failed = 0;
    for (const auto& h : archive.history()) {
        failed += h.score ? 0 : 1;
    }
    if (failed > 0) {
        err << failed << " evaluation(s) failed; see history.jsonl\n";
    }
    if (c.json) {
        out << json{{"version", io::kSchemaVersion},
                    {"evaluations", archive.history().size()},
                    {"failed", failed},
                    {"front_size", archive.members().size()},
                    {"out", dir.string()}}
                   .dump()
            << '\n';
    } else {
        out << archive.history().size() << " evaluations, " << failed << " failed, " << archive.members().size()
            << " on the front; results in " << dir.string() << '\n';
    }
    return kExitOk;
}

struct BlendArgs {
    std::string proposals;
    std::string params_file;
    std::string out_file;
    std::string culane_out;
    std::string params_out;
    bool plain_nms = false;
    bool search = false;
    std::size_t iterations = 40;
    std::size_t children = 8;
    double score_threshold = -1.0;
    double group_distance = -1.0;
    double locality_sigma = -1.0;
};

int cmd_blend(const BlendArgs& a, const Common& c, std::ostream& out)
{
    const auto scenes = io::read_proposals(a.proposals);
    if (scenes.empty()) {
        throw EmptyDatasetError("no scenes in " + a.proposals);
    }
    const auto& layout = scenes.front().proposals.layout;
    const auto space = BlendParamSpace::for_image(layout.image_width, layout.image_height);
    std::vector<kernels::BlendSample> samples;
    bool have_gt = true;
    for (const auto& s : scenes) {
        samples.push_back(io::to_sample(s));
        have_gt = have_gt && s.gt_lanes.has_value();
    }
    const auto levels = head_levels(samples);

    BlendParamSet params = a.params_file.empty() ? space.defaults(levels)
                                                 : io::blend_from_json(read_json_file(a.params_file), "");
    if (a.plain_nms) {
        params = BlendParamSet::plain_nms(levels, params.score_threshold, params.group_distance);
    }
    if (a.score_threshold >= 0.0) {
        params.score_threshold = a.score_threshold;
    }
    if (a.group_distance > 0.0) {
        params.group_distance = a.group_distance;
    }
    if (a.locality_sigma > 0.0) {
        params.locality_sigma = a.locality_sigma;
    }

    json summary = {{"version", io::kSchemaVersion}, {"scenes", scenes.size()}};
    if (a.search) {
        if (!have_gt) {
            throw DataError("--search needs ground truth in every scene");
        }
        BlendSearchConfig bc;
        bc.seed = c.seed;
        bc.iterations = a.iterations;
        bc.children_per_iteration = a.children;
        bc.match.canvas = kernels::canvas_of(layout);
        const auto result = run_blend_inner_search(samples, space, bc);
        params = result.params;
        summary["default_f1"] = result.default_f1;
        summary["search_f1"] = result.f1;
        summary["evaluations"] = result.evaluations;
    }
    summary["params"] = io::to_json(params);

    std::ostringstream lanes_out;
    std::vector<SceneCounts> counts;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        const auto& s = scenes[i];
        const auto lanes = a.plain_nms ? plain_line_nms(s.proposals, params.score_threshold, params.group_distance)
                                       : postprocess(s.proposals, params);
        lanes_out << io::lanes_to_json(s.image_id, lanes).dump() << '\n';
        std::vector<Polyline> polys;
        for (const auto& l : lanes) {
            polys.push_back(to_polyline(l));
        }
        if (!a.culane_out.empty()) {
            const auto path = fs::path(a.culane_out) / (s.image_id + ".lines.txt");
            fs::create_directories(path.parent_path());
            io::write_culane_lines(path, polys);
        }
        if (have_gt) {
            MatchOptions mo;
            mo.canvas = kernels::canvas_of(s.proposals.layout);
            counts.push_back(match_scene(polys, *s.gt_lanes, mo));
        }
    }
    if (!a.out_file.empty()) {
        io::write_file_atomic(a.out_file, lanes_out.str());
    }
    if (!a.params_out.empty()) {
        io::write_file_atomic(a.params_out, io::to_json(params).dump(1) + "\n");
    }
    if (have_gt) {
        const auto report = make_report(counts);
        summary["f1"] = report.f1;
        summary["precision"] = report.precision;
        summary["recall"] = report.recall;
    }

    if (c.json) {
        out << summary.dump() << '\n';
        return kExitOk;
    }
    out << scenes.size() << " scenes post-processed" << (a.plain_nms ? " with plain Line-NMS" : "") << '\n';
    if (a.search) {
        out << "F1 with default parameters " << fmt(summary["default_f1"].get<double>()) << ", after search "
            << fmt(summary["search_f1"].get<double>()) << '\n';
    }
    if (have_gt) {
        out << "F1 " << fmt(summary["f1"].get<double>()) << "  precision " << fmt(summary["precision"].get<double>())
            << "  recall " << fmt(summary["recall"].get<double>()) << '\n';
    }
    return kExitOk;
}

struct EvalArgs {
    std::string pred_dir;
    std::string gt_dir;
    double iou = 0.5;
    double lane_width = 30.0;
    std::string canvas = "1640x590";
    double tolerance = 20.0;
};

int cmd_eval_f1(const EvalArgs& a, const Common& c, std::ostream& out)
{
    MatchOptions mo;
    mo.iou_threshold = a.iou;
    mo.lane_width = a.lane_width;
    mo.canvas = parse_canvas(a.canvas);
    const auto report = match_and_score(load_pairs(a.pred_dir, a.gt_dir), mo);
    if (c.json) {
        out << io::to_json(report).dump() << '\n';
        return kExitOk;
    }
    out << "scenes " << report.per_scene.size() << "  tp " << report.tp << "  fp " << report.fp << "  fn " << report.fn
        << '\n'
        << "precision " << fmt(report.precision) << "  recall " << fmt(report.recall) << "  F1 " << fmt(report.f1)
        << '\n';
    return kExitOk;
}

int cmd_eval_tusimple(const EvalArgs& a, const Common& c, std::ostream& out)
{
    const auto acc = tusimple_accuracy(load_pairs(a.pred_dir, a.gt_dir), a.tolerance);
    if (c.json) {
        out << json{{"version", io::kSchemaVersion},
                    {"correct", acc.correct},
                    {"total", acc.total},
                    {"accuracy", acc.accuracy}}
                   .dump()
            << '\n';
        return kExitOk;
    }
    out << "accuracy " << fmt(acc.accuracy) << " (" << acc.correct << " of " << acc.total << " points)\n";
    return kExitOk;
}

struct SynthArgs {
    SynthSceneConfig config;
    std::string out_file;
    std::string gt_dir;
};

int cmd_gen_synth(SynthArgs a, const Common& c, std::ostream& out)
{
    a.config.seed = c.seed;
    const auto scenes = generate_synthetic_scenes(a.config);
    io::write_proposals(a.out_file, scenes);
    if (!a.gt_dir.empty()) {
        fs::create_directories(a.gt_dir);
        for (const auto& s : scenes) {
            io::write_culane_lines(fs::path(a.gt_dir) / (s.image_id + ".lines.txt"), *s.gt_lanes);
        }
    }
    if (c.json) {
        out << json{{"version", io::kSchemaVersion}, {"scenes", scenes.size()}, {"out", a.out_file}}.dump() << '\n';
    } else {
        out << scenes.size() << " scenes written to " << a.out_file << '\n';
    }
    return kExitOk;
}

int cmd_pareto_export(const std::string& archive_arg, const std::string& format, const std::string& out_file,
                      std::ostream& out)
{
    fs::path path = archive_arg;
    if (fs::is_directory(path)) {
        path /= "archive.json";
    }
    const auto archive = io::load_archive(path);
    std::ostringstream text;
    if (format == "csv") {
        io::write_front_csv(text, archive);
    } else {
        auto members = archive.members();
        std::sort(members.begin(), members.end(), [](const Candidate& x, const Candidate& y) {
            return x.flops != y.flops ? x.flops < y.flops : x.eval_id < y.eval_id;
        });
        json points = json::array();
        for (const auto& m : members) {
            points.push_back({{"eval_id", m.eval_id},
                              {"encoding", serialize_backbone(m.arch.backbone)},
                              {"heads_at", m.arch.fusion.heads_at},
                              {"flops", m.flops},
                              {"score", m.score.value_or(0.0)}});
        }
        text << json{{"version", io::kSchemaVersion}, {"points", points}}.dump(1) << '\n';
    }
    if (out_file.empty()) {
        out << text.str();
    } else {
        io::write_file_atomic(out_file, text.str());
    }
    return kExitOk;
}

bool is_data_error(const std::exception& e)
{
    return dynamic_cast<const DataError*>(&e) || dynamic_cast<const SyntaxError*>(&e) ||
           dynamic_cast<const ConstraintError*>(&e) || dynamic_cast<const FormatError*>(&e) ||
           dynamic_cast<const SchemaError*>(&e) || dynamic_cast<const VersionError*>(&e) ||
           dynamic_cast<const DegenerateLineError*>(&e) || dynamic_cast<const EmptyDatasetError*>(&e) ||
           dynamic_cast<const OverflowError*>(&e) || dynamic_cast<const IoError*>(&e) ||
           dynamic_cast<const fs::filesystem_error*>(&e);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Lane-detection architecture search toolkit", "curvelane"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_flag("--json", common.json, "Machine-readable JSON on stdout");
        sub->add_option("--seed", common.seed, "Random seed");
    };

    std::string encoding;
    auto* parse_arch = app.add_subcommand("parse-arch", "Parse and explain a backbone encoding");
    parse_arch->add_option("encoding", encoding, "e.g. BB_64_13_[5,9]_[7,12]")->required();
    add_common(parse_arch);

    CostArgs cost_args;
    auto* cost = app.add_subcommand("cost", "FLOPS and parameter count of an architecture");
    cost->add_option("encoding", cost_args.encoding, "Backbone encoding");
    cost->add_option("--arch", cost_args.arch_file, "Full architecture JSON instead of an encoding");
    cost->add_option("--heads", cost_args.heads, "Comma-separated head levels")->capture_default_str();
    cost->add_option("--width", cost_args.width, "Input width")->capture_default_str();
    cost->add_option("--height", cost_args.height, "Input height")->capture_default_str();
    cost->add_option("--anchor-rows", cost_args.anchor_rows, "Anchor rows per head cell")->capture_default_str();
    cost->add_flag("--per-layer", cost_args.per_layer, "List every convolution");
    add_common(cost);

    std::string space_config;
    auto* space_size = app.add_subcommand("space-size", "Count the genomes in the search space");
    space_size->add_option("--config", space_config, "Search configuration JSON");
    add_common(space_size);

    SearchArgs search_args;
    auto* search = app.add_subcommand("search", "Evolutionary multi-objective architecture search");
    search->add_option("--budget", search_args.budget, "Evaluations after the initial population")
        ->capture_default_str();
    search->add_option("--workers", search_args.workers, "Concurrent evaluations")
        ->envname("CURVELANE_WORKERS")
        ->capture_default_str();
    search->add_option("--initial", search_args.initial, "Initial population size")->capture_default_str();
    search->add_option("--evaluator", search_args.evaluator, "builtin:synthetic | exec:<command> | replay:<file>")
        ->capture_default_str();
    search->add_option("--timeout", search_args.timeout_s, "Seconds per external evaluation")->capture_default_str();
    search->add_option("--out", search_args.out_dir, "Output directory")->capture_default_str();
    search->add_option("--snapshot-every", search_args.snapshot_every, "Archive snapshot period (0 = end only)")
        ->capture_default_str();
    search->add_option("--config", search_args.config_file, "Search configuration JSON");
    search->add_flag("--resume", search_args.resume, "Continue from <out>/archive.json");
    add_common(search);

    BlendArgs blend_args;
    auto* blend = app.add_subcommand("blend", "Post-process proposal dumps (Line-NMS with point blending)");
    blend->add_option("--proposals", blend_args.proposals, "Proposal JSONL")->required();
    blend->add_option("--params", blend_args.params_file, "Post-processing parameters JSON");
    blend->add_option("--out", blend_args.out_file, "Decoded lanes as JSONL");
    blend->add_option("--culane-out", blend_args.culane_out, "Directory for <image_id>.lines.txt predictions");
    blend->add_option("--params-out", blend_args.params_out, "Write the parameters used");
    blend->add_flag("--plain-nms", blend_args.plain_nms, "Reference Line-NMS without masking or blending");
    blend->add_flag("--search", blend_args.search, "Tune the parameters on the corpus first");
    blend->add_option("--iterations", blend_args.iterations, "Search iterations")->capture_default_str();
    blend->add_option("--children", blend_args.children, "Perturbations per iteration")->capture_default_str();
    blend->add_option("--score-threshold", blend_args.score_threshold, "Override the score threshold");
    blend->add_option("--group-distance", blend_args.group_distance, "Override the grouping distance (px)");
    blend->add_option("--sigma", blend_args.locality_sigma, "Override the locality sigma (px)");
    add_common(blend);

    EvalArgs eval_args;
    auto add_eval = [&](CLI::App* sub) {
        sub->add_option("--pred", eval_args.pred_dir, "Prediction directory")->required();
        sub->add_option("--gt", eval_args.gt_dir, "Ground-truth directory")->required();
        add_common(sub);
    };
    auto* eval_f1 = app.add_subcommand("eval-f1", "CULane-style IoU matching and F1");
    add_eval(eval_f1);
    eval_f1->add_option("--iou", eval_args.iou, "IoU threshold (strict)")->capture_default_str();
    eval_f1->add_option("--lane-width", eval_args.lane_width, "Rasterized lane width (px)")->capture_default_str();
    eval_f1->add_option("--canvas", eval_args.canvas, "Canvas WxH")->capture_default_str();
    auto* eval_tu = app.add_subcommand("eval-tusimple", "TuSimple-style point accuracy");
    add_eval(eval_tu);
    eval_tu->add_option("--tolerance", eval_args.tolerance, "Horizontal tolerance (px)")->capture_default_str();

    SynthArgs synth_args;
    auto* gen = app.add_subcommand("gen-synth", "Generate synthetic proposal scenes with ground truth");
    gen->add_option("--out", synth_args.out_file, "Proposal JSONL to write")->required();
    gen->add_option("--gt-dir", synth_args.gt_dir, "Also write <image_id>.lines.txt ground truth here");
    gen->add_option("--scenes", synth_args.config.num_scenes, "Number of scenes")->capture_default_str();
    gen->add_option("--lanes", synth_args.config.lanes_per_scene, "Lanes per scene")->capture_default_str();
    gen->add_option("--noise", synth_args.config.remote_noise_sigma, "Remote offset noise sigma (px)")
        ->capture_default_str();
    gen->add_option("--curvature-min", synth_args.config.curvature_min, "1/px")->capture_default_str();
    gen->add_option("--curvature-max", synth_args.config.curvature_max, "1/px")->capture_default_str();
    add_common(gen);

    std::string archive_arg;
    std::string format = "csv";
    std::string export_out;
    auto* pexport = app.add_subcommand("pareto-export", "Plot-ready export of a search front");
    pexport->add_option("--archive", archive_arg, "archive.json or a search output directory")->required();
    pexport->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    pexport->add_option("--out", export_out, "Output file (default stdout)");
    add_common(pexport);

    if (!args.empty() && !args.front().empty() && args.front().front() != '-' &&
        app.get_subcommand_no_throw(args.front()) == nullptr) {
        err << "error: unknown subcommand '" << args.front() << "'\n\n" << app.help();
        return kExitUsage;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (parse_arch->parsed()) {
            return cmd_parse_arch(encoding, common, out);
        }
        if (cost->parsed()) {
            return cmd_cost(cost_args, common, out);
        }
        if (space_size->parsed()) {
            return cmd_space_size(space_config, common, out);
        }
        if (search->parsed()) {
            return cmd_search(search_args, common, *search, out, err);
        }
        if (blend->parsed()) {
            return cmd_blend(blend_args, common, out);
        }
        if (eval_f1->parsed()) {
            return cmd_eval_f1(eval_args, common, out);
        }
        if (eval_tu->parsed()) {
            return cmd_eval_tusimple(eval_args, common, out);
        }
        if (gen->parsed()) {
            return cmd_gen_synth(synth_args, common, out);
        }
        if (pexport->parsed()) {
            return cmd_pareto_export(archive_arg, format, export_out, out);
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return is_data_error(e) ? kExitData : kExitInternal;
    }
    err << app.help();
    return kExitUsage;
}

} // namespace curvelane::cli
