// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "curvelane/arch_space.hpp"
#include "curvelane/cost_model.hpp"
#include "curvelane/random.hpp"

namespace curvelane {

struct Candidate {
    ArchEncoding arch;
    Count flops = 0;
    std::optional<double> score; // absent until evaluated, and for failed evaluations
    std::uint64_t eval_id = 0;
    std::optional<std::uint64_t> parent;
    std::uint64_t birth_step = 0;
    std::string error;

    bool operator==(const Candidate&) const = default;
};

/// a dominates b: no more FLOPS, no lower score, strictly better in one. Unscored candidates never dominate.
bool dominates(const Candidate& a, const Candidate& b);

/// Mutually non-dominated members plus the append-only evaluation log.
class ParetoArchive {
public:
    /// Logs `c`; adds it to the members unless one dominates it, dropping
    /// members it dominates. Unscored candidates only enter the history.
    /// Throws DuplicateError on a repeated eval_id.
    void insert(Candidate c);

    /// Uniform draw over the members. Throws EmptyArchiveError.
    const Candidate& select_parent(Rng& rng) const;

    const std::vector<Candidate>& members() const { return members_; }
    const std::vector<Candidate>& history() const { return history_; }
    bool empty() const { return members_.empty(); }
    std::uint64_t next_eval_id() const { return next_id_; }

    /// Re-inserts `history` in order.
    static ParetoArchive replay(const std::vector<Candidate>& history);

private:
    std::vector<Candidate> members_;
    std::vector<Candidate> history_;
    std::unordered_set<std::uint64_t> ids_;
    std::uint64_t next_id_ = 0;
};

/// Area dominated by the front inside the box [0, ref_flops] x [0, 1]
/// (FLOPS minimized, score maximized).
double hypervolume(const std::vector<Candidate>& front, Count ref_flops);

} // namespace curvelane
