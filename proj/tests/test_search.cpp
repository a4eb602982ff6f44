// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "curvelane/errors.hpp"
#include "curvelane/search.hpp"
#include "curvelane/synth.hpp"
#include "oracles.hpp"

using namespace curvelane;

namespace {

Candidate point(std::uint64_t id, Count flops, double score)
{
    Candidate c;
    c.eval_id = id;
    c.flops = flops;
    c.score = score;
    return c;
}

std::set<std::uint64_t> ids(const std::vector<Candidate>& v)
{
    std::set<std::uint64_t> out;
    for (const auto& c : v) {
        out.insert(c.eval_id);
    }
    return out;
}

void check_archive(const ParetoArchive& a)
{
    const auto& m = a.members();
    for (const auto& x : m) {
        for (const auto& y : m) {
            CHECK_FALSE(dominates(x, y));
        }
    }
    const auto truth = oracle::front_ids(a.history());
    CHECK(ids(m) == std::set<std::uint64_t>(truth.begin(), truth.end()));
}

SearchConfig small_config(std::uint64_t seed, std::size_t budget)
{
    SearchConfig c;
    c.seed = seed;
    c.budget = budget;
    c.initial_population = 8;
    return c;
}

/// Fails every third evaluation.
class FlakyEvaluator final : public Evaluator {
public:
    double evaluate(const ArchEncoding& arch, const EvalContext& ctx) const override
    {
        if (ctx.eval_id % 3 == 0) {
            throw EvaluatorError(ctx.eval_id, "flaky");
        }
        return synthetic_score(arch, ctx.resolution);
    }
    CostClass cost_class() const override { return CostClass::Cheap; }
};

std::string stub(const std::string& mode) { return std::string(CURVELANE_STUB_EVALUATOR) + " " + mode; }

} // namespace

TEST_SUITE("pareto")
{
    TEST_CASE("domination")
    {
        CHECK(dominates(point(0, 1, 0.8), point(1, 2, 0.7)));
        CHECK_FALSE(dominates(point(0, 1, 0.8), point(1, 1, 0.8)));
        CHECK_FALSE(dominates(point(0, 1, 0.8), point(1, 3, 0.9)));
        Candidate unscored;
        unscored.flops = 0;
        CHECK_FALSE(dominates(unscored, point(1, 2, 0.1)));
        CHECK_FALSE(dominates(point(1, 2, 0.1), unscored));
    }

    TEST_CASE("domination is a strict partial order")
    {
        Rng rng(3);
        std::uniform_int_distribution<Count> f(0, 4);
        std::uniform_int_distribution<int> s(0, 4);
        for (int i = 0; i < 20000; ++i) {
            auto a = point(0, f(rng), s(rng) / 4.0);
            auto b = point(1, f(rng), s(rng) / 4.0);
            auto c = point(2, f(rng), s(rng) / 4.0);
            CHECK_FALSE(dominates(a, a));
            if (dominates(a, b)) {
                CHECK_FALSE(dominates(b, a));
                if (dominates(b, c)) {
                    CHECK(dominates(a, c));
                }
            }
        }
    }

    TEST_CASE("insert")
    {
        ParetoArchive a;
        a.insert(point(0, 2, 0.7));
        a.insert(point(1, 1, 0.8));
        REQUIRE(a.members().size() == 1);
        CHECK(a.members()[0].eval_id == 1);
        a.insert(point(2, 3, 0.9));
        CHECK(ids(a.members()) == std::set<std::uint64_t>{1, 2});
        CHECK(a.history().size() == 3);
        CHECK_THROWS_AS(a.insert(point(2, 5, 0.1)), DuplicateError);

        Candidate failed;
        failed.eval_id = 3;
        failed.error = "boom";
        a.insert(failed);
        CHECK(a.members().size() == 2);
        CHECK(a.history().size() == 4);
    }

    TEST_CASE("random insertions keep exactly the non-dominated set")
    {
        Rng rng(1);
        std::uniform_int_distribution<Count> f(0, 1000);
        std::uniform_real_distribution<double> s(0, 1);
        ParetoArchive a;
        for (std::uint64_t i = 0; i < 3000; ++i) {
            auto c = point(i, f(rng), std::round(s(rng) * 200) / 200);
            if (i % 97 == 0) {
                c.score.reset();
            }
            a.insert(c);
            if (i % 250 == 0) {
                check_archive(a);
            }
        }
        check_archive(a);
        auto replayed = ParetoArchive::replay(a.history());
        CHECK(replayed.members() == a.members());
        CHECK(replayed.history() == a.history());
    }

    TEST_CASE("parent selection")
    {
        ParetoArchive a;
        Rng rng(0);
        CHECK_THROWS_AS(a.select_parent(rng), EmptyArchiveError);
        a.insert(point(0, 10, 0.1));
        CHECK(a.select_parent(rng).eval_id == 0);
        for (std::uint64_t i = 1; i < 5; ++i) {
            a.insert(point(i, 10 + i, 0.1 + 0.1 * static_cast<double>(i)));
        }
        a.insert(point(9, 100, 0.05)); // dominated, history only
        std::map<std::uint64_t, int> counts;
        for (int i = 0; i < 10000; ++i) {
            counts[a.select_parent(rng).eval_id]++;
        }
        CHECK(counts.count(9) == 0);
        for (std::uint64_t i = 0; i < 5; ++i) {
            CHECK(std::abs(counts[i] - 2000) < 120);
        }
    }

    TEST_CASE("hypervolume")
    {
        CHECK(hypervolume({}, 10) == 0.0);
        CHECK(hypervolume({point(0, 0, 1.0)}, 10) == 10.0);
        CHECK(hypervolume({point(0, 5, 0.5), point(1, 8, 1.0)}, 10) == doctest::Approx(5 * 0.5 + 2 * 0.5));
    }
}

TEST_SUITE("search")
{
    TEST_CASE("synthetic score")
    {
        Rng rng(6);
        for (int i = 0; i < 2000; ++i) {
            auto a = random_arch(rng);
            const double s = synthetic_score(a);
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
            CHECK(synthetic_score(a) == s);
            if (a.backbone.num_blocks < kMaxBlocks) {
                auto deeper = a;
                deeper.backbone.num_blocks += 1;
                CHECK(synthetic_score(deeper) > s);
                CHECK(candidate_cost(deeper).total_flops > candidate_cost(a).total_flops);
            }
        }
    }

    TEST_CASE("budget zero keeps the initial front")
    {
        SyntheticEvaluator ev;
        auto a = run_search(small_config(2, 0), ev);
        CHECK(a.history().size() == 8);
        check_archive(a);
        for (const auto& c : a.history()) {
            CHECK(c.flops == candidate_cost(c.arch).total_flops);
            CHECK_FALSE(c.parent.has_value());
        }
    }

    TEST_CASE("single worker is reproducible")
    {
        SyntheticEvaluator ev;
        auto a = run_search(small_config(42, 150), ev);
        auto b = run_search(small_config(42, 150), ev);
        CHECK(a.history() == b.history());
        CHECK(a.history().size() == 158);
        auto c = run_search(small_config(43, 150), ev);
        CHECK(c.history() != a.history());
        check_archive(a);
    }

    TEST_CASE("several workers keep the archive invariants")
    {
        SyntheticEvaluator ev;
        auto cfg = small_config(7, 200);
        cfg.workers = 4;
        auto a = run_search(cfg, ev);
        CHECK(a.history().size() == 208);
        CHECK(ids(a.history()).size() == 208);
        check_archive(a);
    }

    TEST_CASE("hypervolume never shrinks")
    {
        SyntheticEvaluator ev;
        auto cfg = small_config(3, 120);
        cfg.snapshot_every = 1;
        std::vector<double> hv;
        cfg.on_snapshot = [&](const ParetoArchive& a) { hv.push_back(hypervolume(a.members(), Count{1} << 50)); };
        run_search(cfg, ev);
        REQUIRE(hv.size() >= 120);
        for (std::size_t i = 1; i < hv.size(); ++i) {
            CHECK(hv[i] >= hv[i - 1]);
        }
    }

    TEST_CASE("failed evaluations are logged and the search goes on")
    {
        FlakyEvaluator ev;
        auto a = run_search(small_config(1, 60), ev);
        CHECK(a.history().size() == 68);
        std::size_t failed = 0;
        for (const auto& c : a.history()) {
            if (!c.score) {
                ++failed;
                CHECK(c.error.find("flaky") != std::string::npos);
            }
        }
        CHECK(failed == 23);
        check_archive(a);
    }

    TEST_CASE("resume with no budget leaves the archive alone")
    {
        SyntheticEvaluator ev;
        auto a = run_search(small_config(5, 40), ev);
        auto cfg = small_config(5, 0);
        auto b = resume_search(a, cfg, ev);
        CHECK(b.history() == a.history());
        CHECK(b.members() == a.members());
        cfg.budget = 10;
        CHECK(resume_search(a, cfg, ev).history().size() == 58);
    }
}

TEST_SUITE("evaluator")
{
    TEST_CASE("stub process answers")
    {
        ArchEncoding arch;
        ExternalEvaluator ok(stub("score=0.5"), std::chrono::seconds(10));
        CHECK(ok.evaluate(arch, {3, {}}) == 0.5);
        CHECK(ok.cost_class() == CostClass::Expensive);
        ExternalEvaluator bare(stub("bare=0.25"), std::chrono::seconds(10));
        CHECK(bare.evaluate(arch, {4, {}}) == 0.25);
        ExternalEvaluator synth(stub("synthetic"), std::chrono::seconds(10));
        Rng rng(2);
        for (std::uint64_t i = 0; i < 5; ++i) {
            auto a = random_arch(rng);
            CHECK(synth.evaluate(a, {i, {}}) == synthetic_score(a));
        }
    }

    TEST_CASE("stub failures map to evaluator errors")
    {
        ArchEncoding arch;
        CHECK_THROWS_AS(ExternalEvaluator(stub("fail")).evaluate(arch, {1, {}}), EvaluatorError);
        CHECK_THROWS_AS(ExternalEvaluator(stub("garbage")).evaluate(arch, {1, {}}), ProtocolError);
        CHECK_THROWS_AS(ExternalEvaluator(stub("wrongid")).evaluate(arch, {1, {}}), ProtocolError);
        CHECK_THROWS_AS(ExternalEvaluator(stub("score=1.5")).evaluate(arch, {1, {}}), ProtocolError);
        CHECK_THROWS_AS(ExternalEvaluator(stub("silent")).evaluate(arch, {1, {}}), ProtocolError);

        const auto t0 = std::chrono::steady_clock::now();
        CHECK_THROWS_AS(ExternalEvaluator(stub("sleep=20"), std::chrono::milliseconds(300)).evaluate(arch, {1, {}}),
                        TimeoutError);
        CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(5));
    }

    TEST_CASE("search records stub failures in the history")
    {
        ExternalEvaluator ev(stub("fail"));
        auto cfg = small_config(1, 3);
        cfg.initial_population = 2;
        auto a = run_search(cfg, ev);
        CHECK(a.history().size() == 5);
        CHECK(a.empty());
        for (const auto& c : a.history()) {
            CHECK_FALSE(c.score.has_value());
            CHECK_FALSE(c.error.empty());
        }

        ExternalEvaluator slow(stub("sleep=20"), std::chrono::milliseconds(200));
        cfg.budget = 0;
        cfg.initial_population = 1;
        auto t = run_search(cfg, slow);
        REQUIRE(t.history().size() == 1);
        CHECK(t.history()[0].error.find("no response") != std::string::npos);
    }

    TEST_CASE("replay evaluator scores the blend parameters")
    {
        SynthSceneConfig sc;
        sc.num_scenes = 6;
        std::vector<kernels::BlendSample> samples;
        for (const auto& s : generate_synthetic_scenes(sc)) {
            samples.push_back(io::to_sample(s));
        }
        ArchEncoding arch;
        arch.blend = BlendParamSet::plain_nms({2, 3}, 0.5, 100);
        ReplayEvaluator ev(samples);
        const double f1 = make_report(kernels::score_corpus_serial(samples, arch.blend)).f1;
        CHECK(ev.evaluate(arch, {}) == f1);
        CHECK_THROWS_AS(ReplayEvaluator({}), EmptyDatasetError);
    }
}

TEST_SUITE("blend_search")
{
    std::vector<kernels::BlendSample> samples_of(SynthSceneConfig cfg)
    {
        std::vector<kernels::BlendSample> out;
        for (const auto& s : generate_synthetic_scenes(cfg)) {
            out.push_back(io::to_sample(s));
        }
        return out;
    }

    TEST_CASE("inner search")
    {
        const auto space = BlendParamSpace::for_image(1640, 590);
        BlendSearchConfig cfg;
        cfg.iterations = 4;
        cfg.children_per_iteration = 4;
        CHECK_THROWS_AS(run_blend_inner_search({}, space, cfg), EmptyDatasetError);

        SynthSceneConfig clean;
        clean.num_scenes = 1;
        clean.remote_noise_sigma = 0.0;
        auto perfect = run_blend_inner_search(samples_of(clean), space, cfg);
        CHECK(perfect.default_f1 == 1.0);
        CHECK(perfect.f1 == 1.0);

        SynthSceneConfig noisy;
        noisy.num_scenes = 8;
        auto a = run_blend_inner_search(samples_of(noisy), space, cfg);
        auto b = run_blend_inner_search(samples_of(noisy), space, cfg);
        CHECK(a.params == b.params);
        CHECK(a.f1 == b.f1);
        CHECK(a.f1 >= a.default_f1);
        CHECK(a.evaluations == 1 + 16);
    }

    TEST_CASE("blend parameter space")
    {
        const auto space = BlendParamSpace::for_image(1640, 590);
        CHECK_NOTHROW(space.validate());
        auto d = space.defaults({2, 3});
        CHECK(d.per_level.size() == 2);
        CHECK(std::isinf(d.locality_sigma) == false);
        Rng rng(4);
        for (int i = 0; i < 2000; ++i) {
            auto m = space.mutate(d, rng);
            CHECK(m != d);
            CHECK(m.locality_sigma >= space.locality_sigma.min);
            CHECK(m.locality_sigma <= space.locality_sigma.max);
            CHECK(m.score_threshold >= space.score_threshold.min);
            CHECK(m.score_threshold <= space.score_threshold.max);
            d = m;
        }
        auto r = space.reconcile(d, {1, 3});
        CHECK(r.per_level.count(1) == 1);
        CHECK(r.per_level.count(2) == 0);
        CHECK(r.per_level.at(3) == d.per_level.at(3));

        BlendParamSpace bad;
        bad.alpha1 = {1.0, 0.0, 0.1};
        CHECK_THROWS_AS(bad.validate(), ConstraintError);
        bad = {};
        bad.locality_sigma = {0.0, 10.0, 0.5, true};
        CHECK_THROWS_AS(bad.validate(), ConstraintError);
    }
}
