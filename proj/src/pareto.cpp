// SPDX-License-Identifier: Apache-2.0
#include "curvelane/pareto.hpp"

#include <algorithm>

#include "curvelane/errors.hpp"

namespace curvelane {

bool dominates(const Candidate& a, const Candidate& b)
{
    if (!a.score || !b.score) {
        return false;
    }
    const bool no_worse = a.flops <= b.flops && *a.score >= *b.score;
    const bool better = a.flops < b.flops || *a.score > *b.score;
    return no_worse && better;
}

void ParetoArchive::insert(Candidate c)
{
    if (!ids_.insert(c.eval_id).second) {
        throw DuplicateError("eval_id " + std::to_string(c.eval_id) + " is already in the archive");
    }
    next_id_ = std::max(next_id_, c.eval_id + 1);
    history_.push_back(c);
    if (!c.score) {
        return;
    }
    for (const auto& m : members_) {
        if (dominates(m, c)) {
            return;
        }
    }
    std::erase_if(members_, [&](const Candidate& m) { return dominates(c, m); });
    members_.push_back(std::move(c));
}

const Candidate& ParetoArchive::select_parent(Rng& rng) const
{
    if (members_.empty()) {
        throw EmptyArchiveError("cannot select a parent from an empty Pareto front");
    }
    return members_[std::uniform_int_distribution<std::size_t>(0, members_.size() - 1)(rng)];
}

ParetoArchive ParetoArchive::replay(const std::vector<Candidate>& history)
{
    ParetoArchive a;
    for (const auto& c : history) {
        a.insert(c);
    }
    return a;
}

double hypervolume(const std::vector<Candidate>& front, Count ref_flops)
{
    std::vector<std::pair<double, double>> pts;
    for (const auto& c : front) {
        if (c.score && c.flops <= ref_flops) {
            pts.emplace_back(static_cast<double>(c.flops), *c.score);
        }
    }
    // Sweep by increasing FLOPS; each point adds the slab above the best score so far.
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    double covered = 0.0;
    const double ref = static_cast<double>(ref_flops);
    for (const auto& [flops, score] : pts) {
        if (score > covered) {
            area += (ref - flops) * (score - covered);
            covered = score;
        }
    }
    return area;
}

} // namespace curvelane
