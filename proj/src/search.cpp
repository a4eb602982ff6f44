// SPDX-License-Identifier: Apache-2.0
#include "curvelane/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "curvelane/errors.hpp"

namespace curvelane {

ArchEncoding mutate_arch(const ArchEncoding& parent, Rng& rng, const SearchConfig& config)
{
    std::discrete_distribution<int> which({config.p_backbone, config.p_fusion, config.p_blend});
    ArchEncoding child = parent;
    switch (which(rng)) {
    case 0:
        child.backbone = mutate_backbone(parent.backbone, rng, config.space, config.backbone_rates);
        break;
    case 1:
        child.fusion = mutate_fusion(parent.fusion, parent.backbone.stage_count(), rng);
        child.blend = config.blend_space.reconcile(parent.blend, child.fusion.heads_at);
        break;
    default:
        child.blend = config.blend_space.mutate(parent.blend, rng);
        break;
    }
    return child;
}

namespace {

Candidate make_candidate(ArchEncoding arch, std::uint64_t id, std::optional<std::uint64_t> parent,
                         std::uint64_t birth_step, const SearchConfig& config)
{
    Candidate c;
    c.flops = candidate_cost(arch, config.resolution, config.cost).total_flops;
    c.arch = std::move(arch);
    c.eval_id = id;
    c.parent = parent;
    c.birth_step = birth_step;
    return c;
}

void evaluate_into(Candidate& c, const Evaluator& evaluator, const SearchConfig& config)
{
    try {
        const double s = evaluator.evaluate(c.arch, {c.eval_id, config.resolution});
        if (!(s >= 0.0 && s <= 1.0)) {
            throw EvaluatorError(c.eval_id, "score " + std::to_string(s) + " outside [0, 1]");
        }
        c.score = s;
    } catch (const std::exception& e) {
        c.score.reset();
        c.error = e.what();
    }
}

/// Exact identity of a genome; doubles are written in hex so distinct values never collide.
std::string genome_key(const ArchEncoding& arch)
{
    std::ostringstream s;
    s << std::hexfloat << serialize_backbone(arch.backbone) << '|' << arch.fusion.channels;
    for (const auto& l : arch.fusion.layers) {
        s << ',' << l.input_a << ':' << l.input_b << '>' << l.output_level;
    }
    s << "|h";
    for (int h : arch.fusion.heads_at) {
        s << ',' << h;
    }
    const auto& b = arch.blend;
    s << '|' << b.score_threshold << ',' << b.group_distance << ',' << b.locality_sigma;
    for (const auto& [level, p] : b.per_level) {
        s << ';' << level << ':' << p.alpha1 << ',' << p.beta1 << ',' << p.alpha2 << ',' << p.center_x << ','
          << p.center_y;
    }
    return s.str();
}

/// Genomes already evaluated (or in flight). Children that repeat one are redrawn.
class SeenSet {
public:
    explicit SeenSet(const ParetoArchive& archive)
    {
        for (const auto& c : archive.history()) {
            keys_.insert(genome_key(c.arch));
        }
    }
    bool add(const ArchEncoding& arch) { return keys_.insert(genome_key(arch)).second; }

private:
    std::unordered_set<std::string> keys_;
};

constexpr int kRedraws = 64;

/// Child of a front member, or a fresh random genome while the front is empty.
/// Repeats of evaluated genomes are redrawn a bounded number of times, then
/// replaced by a fresh random genome.
Candidate spawn(const ParetoArchive& archive, SeenSet& seen, Rng& rng, std::uint64_t id, const SearchConfig& config)
{
    ArchEncoding child;
    std::optional<std::uint64_t> parent;
    for (int attempt = 0; attempt < kRedraws; ++attempt) {
        if (archive.empty()) {
            child = random_arch(rng, config.space, config.blend_space);
        } else {
            const Candidate& p = archive.select_parent(rng);
            parent = p.eval_id;
            child = mutate_arch(p.arch, rng, config);
        }
        if (seen.add(child)) {
            return make_candidate(std::move(child), id, parent, archive.history().size(), config);
        }
    }
    // The neighbourhood of the front is exhausted: explore from scratch instead.
    child = random_arch(rng, config.space, config.blend_space);
    parent.reset();
    seen.add(child);
    return make_candidate(std::move(child), id, parent, archive.history().size(), config);
}

void maybe_snapshot(const ParetoArchive& archive, const SearchConfig& config)
{
    if (config.snapshot_every > 0 && config.on_snapshot && archive.history().size() % config.snapshot_every == 0) {
        config.on_snapshot(archive);
    }
}

void evolve_serial(ParetoArchive& archive, Rng& rng, const SearchConfig& config, const Evaluator& evaluator)
{
    SeenSet seen(archive);
    for (std::size_t step = 0; step < config.budget; ++step) {
        Candidate c = spawn(archive, seen, rng, archive.next_eval_id(), config);
        evaluate_into(c, evaluator, config);
        archive.insert(std::move(c));
        maybe_snapshot(archive, config);
    }
}

void evolve_parallel(ParetoArchive& archive, std::uint64_t stream_base, const SearchConfig& config,
                     const Evaluator& evaluator)
{
    std::mutex archive_mutex;
    std::mutex queue_mutex;
    std::condition_variable ready;
    std::deque<Candidate> done;
    std::atomic<std::size_t> issued{0};
    const std::uint64_t first_id = archive.next_eval_id();
    SeenSet seen(archive); // guarded by archive_mutex

    auto worker = [&](std::size_t w) {
        Rng rng = derive_stream(config.seed, stream_base + w + 1);
        for (;;) {
            const std::size_t slot = issued.fetch_add(1);
            if (slot >= config.budget) {
                return;
            }
            Candidate c;
            {
                std::lock_guard lock(archive_mutex);
                c = spawn(archive, seen, rng, first_id + slot, config);
            }
            evaluate_into(c, evaluator, config);
            {
                std::lock_guard lock(queue_mutex);
                done.push_back(std::move(c));
            }
            ready.notify_one();
        }
    };

    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < config.workers; ++w) {
        pool.emplace_back(worker, w);
    }
    for (std::size_t consumed = 0; consumed < config.budget; ++consumed) {
        Candidate c;
        {
            std::unique_lock lock(queue_mutex);
            ready.wait(lock, [&] { return !done.empty(); });
            c = std::move(done.front());
            done.pop_front();
        }
        std::lock_guard lock(archive_mutex);
        archive.insert(std::move(c));
        maybe_snapshot(archive, config);
    }
}

void evaluate_initial(std::vector<Candidate>& initial, const SearchConfig& config, const Evaluator& evaluator)
{
    if (config.workers <= 1) {
        for (auto& c : initial) {
            evaluate_into(c, evaluator, config);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < config.workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < initial.size(); i = next.fetch_add(1)) {
                evaluate_into(initial[i], evaluator, config);
            }
        });
    }
}

} // namespace

ParetoArchive run_search(const SearchConfig& config, const Evaluator& evaluator)
{
    Rng rng = derive_stream(config.seed, 0);
    std::vector<Candidate> initial;
    for (std::size_t i = 0; i < config.initial_population; ++i) {
        initial.push_back(make_candidate(random_arch(rng, config.space, config.blend_space), i, std::nullopt, 0, config));
    }
    evaluate_initial(initial, config, evaluator);

    ParetoArchive archive;
    for (auto& c : initial) {
        archive.insert(std::move(c));
        maybe_snapshot(archive, config);
    }
    if (config.workers <= 1) {
        evolve_serial(archive, rng, config, evaluator);
    } else {
        evolve_parallel(archive, 0, config, evaluator);
    }
    return archive;
}

ParetoArchive resume_search(ParetoArchive archive, const SearchConfig& config, const Evaluator& evaluator)
{
    // Streams keyed by the history length so a resumed run never replays the original draws.
    const std::uint64_t stream_base = (std::uint64_t{1} << 32) + archive.history().size() * (config.workers + 1);
    if (config.workers <= 1) {
        Rng rng = derive_stream(config.seed, stream_base);
        evolve_serial(archive, rng, config, evaluator);
    } else {
        evolve_parallel(archive, stream_base, config, evaluator);
    }
    return archive;
}

std::vector<int> head_levels(const std::vector<kernels::BlendSample>& samples)
{
    std::set<int> levels;
    for (const auto& s : samples) {
        for (const auto& h : s.proposals.heads) {
            levels.insert(h.level);
        }
    }
    return {levels.begin(), levels.end()};
}

namespace {

double corpus_f1(const std::vector<kernels::BlendSample>& samples, const BlendParamSet& params,
                 const MatchOptions& match)
{
    SceneCounts total;
    for (const auto& c : kernels::score_corpus(samples, params, match)) {
        total += c;
    }
    return f1_score(total);
}

} // namespace

BlendSearchResult run_blend_inner_search(const std::vector<kernels::BlendSample>& samples, const BlendParamSpace& space,
                                         const BlendSearchConfig& config)
{
    if (samples.empty()) {
        throw EmptyDatasetError("the post-processing search needs at least one scene");
    }
    space.validate();
    Rng rng = derive_stream(config.seed, 0);

    BlendSearchResult result;
    result.params = space.defaults(head_levels(samples));
    result.default_f1 = corpus_f1(samples, result.params, config.match);
    result.f1 = result.default_f1;
    result.evaluations = 1;

    for (std::size_t it = 0; it < config.iterations; ++it) {
        std::vector<BlendParamSet> children;
        for (std::size_t k = 0; k < config.children_per_iteration; ++k) {
            children.push_back(space.mutate(result.params, rng, config.mutation_rate));
        }
        std::size_t best = children.size();
        double best_f1 = -1.0;
        for (std::size_t k = 0; k < children.size(); ++k) {
            const double f1 = corpus_f1(samples, children[k], config.match);
            ++result.evaluations;
            if (f1 > best_f1) {
                best_f1 = f1;
                best = k;
            }
        }
        // Equal scores are accepted so the climb can cross F1 plateaus.
        if (best < children.size() && best_f1 >= result.f1) {
            result.params = children[best];
            result.f1 = best_f1;
        }
    }
    return result;
}

} // namespace curvelane
