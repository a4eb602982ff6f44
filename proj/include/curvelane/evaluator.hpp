// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "curvelane/arch_space.hpp"
#include "curvelane/cost_model.hpp"
#include "curvelane/kernels.hpp"

namespace curvelane {

enum class CostClass { Cheap, Expensive };

struct EvalContext {
    std::uint64_t eval_id = 0;
    Resolution resolution;
};

/// Maps a genome to a task score in [0, 1]. Implementations must be callable
/// from several threads at once. Failures are reported as EvaluatorError.
class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual double evaluate(const ArchEncoding& arch, const EvalContext& ctx) const = 0;
    virtual bool is_deterministic() const { return true; }
    virtual CostClass cost_class() const = 0;
};

/// Closed-form stand-in for training: a weighted sum of receptive field
/// (blocks weighted by how many downsamples precede them), head resolution
/// (earliest head level) and capacity (saturating in the parameter count).
double synthetic_score(const ArchEncoding& arch, Resolution resolution = {});

class SyntheticEvaluator final : public Evaluator {
public:
    double evaluate(const ArchEncoding& arch, const EvalContext& ctx) const override;
    CostClass cost_class() const override { return CostClass::Cheap; }
};

/// Runs `/bin/sh -c command` per evaluation: one JSON request line on stdin,
/// one JSON response line expected on stdout before `timeout`.
class ExternalEvaluator final : public Evaluator {
public:
    explicit ExternalEvaluator(std::string command, std::chrono::milliseconds timeout = std::chrono::minutes(90),
                               bool deterministic = false);
    double evaluate(const ArchEncoding& arch, const EvalContext& ctx) const override;
    bool is_deterministic() const override { return deterministic_; }
    CostClass cost_class() const override { return CostClass::Expensive; }

private:
    std::string command_;
    std::chrono::milliseconds timeout_;
    bool deterministic_;
};

/// Scores a genome's post-processing parameters by aggregate F1 over frozen proposal dumps.
class ReplayEvaluator final : public Evaluator {
public:
    explicit ReplayEvaluator(std::vector<kernels::BlendSample> samples, MatchOptions options = {});
    double evaluate(const ArchEncoding& arch, const EvalContext& ctx) const override;
    CostClass cost_class() const override { return CostClass::Cheap; }

private:
    std::vector<kernels::BlendSample> samples_;
    MatchOptions options_;
};

} // namespace curvelane
