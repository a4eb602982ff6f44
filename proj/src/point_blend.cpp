// SPDX-License-Identifier: Apache-2.0
#include "curvelane/point_blend.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace curvelane {

double mask_logit(const BlendParams& p, double cx, double cy)
{
    const double dx = cx - p.center_x;
    const double dy = cy - p.center_y;
    return p.alpha1 * cy + p.beta1 + p.alpha2 * std::sqrt(dx * dx + dy * dy);
}

double apply_mask(double score, double logit)
{
    const double s = std::clamp(score, kScoreClampEps, 1.0 - kScoreClampEps);
    if (logit == 0.0) {
        return s;
    }
    const double z = std::log(s / (1.0 - s)) + logit;
    return 1.0 / (1.0 + std::exp(-z));
}

LaneProposalSet mask_scores(const LaneProposalSet& proposals, const BlendParamSet& params)
{
    LaneProposalSet out = proposals;
    for (auto& head : out.heads) {
        auto it = params.per_level.find(head.level);
        if (it == params.per_level.end()) {
            continue;
        }
        for (auto& cell : head.cells) {
            cell.score = apply_mask(cell.score, mask_logit(it->second, cell.center_x, cell.center_y));
        }
    }
    return out;
}

std::vector<std::vector<std::size_t>> group_lines(const std::vector<LaneLine>& lines, double group_distance)
{
    std::vector<std::size_t> order(lines.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return lines[a].score > lines[b].score; });

    std::vector<bool> assigned(lines.size(), false);
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t seed : order) {
        if (assigned[seed]) {
            continue;
        }
        assigned[seed] = true;
        std::vector<std::size_t> group{seed};
        for (std::size_t other : order) {
            if (!assigned[other] && line_distance(lines[seed], lines[other]) < group_distance) {
                assigned[other] = true;
                group.push_back(other);
            }
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

namespace {

const LanePoint* point_at(const LaneLine& line, double y)
{
    auto it = std::lower_bound(line.points.begin(), line.points.end(), y - 1e-9,
                               [](const LanePoint& p, double v) { return p.y < v; });
    if (it != line.points.end() && same_row(it->y, y)) {
        return &*it;
    }
    return nullptr;
}

double locality_weight(const LanePoint& p, double sigma)
{
    const double d = p.y - p.source.center_y;
    return p.source.score * std::exp(-(d * d) / (sigma * sigma));
}

} // namespace

LaneLine blend_group(const std::vector<LaneLine>& group, double locality_sigma)
{
    std::size_t rep = 0;
    for (std::size_t i = 1; i < group.size(); ++i) {
        if (group[i].score > group[rep].score) {
            rep = i;
        }
    }
    LaneLine out = group[rep];
    for (auto& point : out.points) {
        double best = locality_weight(point, locality_sigma);
        for (std::size_t i = 0; i < group.size(); ++i) {
            if (i == rep) {
                continue;
            }
            const LanePoint* candidate = point_at(group[i], point.y);
            if (candidate == nullptr) {
                continue;
            }
            const double w = locality_weight(*candidate, locality_sigma);
            if (w > best) {
                best = w;
                point = *candidate;
            }
        }
    }
    return out;
}

std::vector<LaneLine> postprocess(const LaneProposalSet& proposals, const BlendParamSet& params)
{
    const auto lines = decode_all(mask_scores(proposals, params), params.score_threshold);
    std::vector<LaneLine> out;
    for (const auto& indices : group_lines(lines, params.group_distance)) {
        std::vector<LaneLine> group;
        group.reserve(indices.size());
        for (std::size_t i : indices) {
            group.push_back(lines[i]);
        }
        out.push_back(blend_group(group, params.locality_sigma));
    }
    return out;
}

std::vector<LaneLine> plain_line_nms(const LaneProposalSet& proposals, double score_threshold, double group_distance)
{
    std::vector<LaneLine> candidates;
    for (const auto& head : proposals.heads) {
        for (std::size_t k = 0; k < head.cells.size(); ++k) {
            const auto& cell = head.cells[k];
            if (cell.score < score_threshold) {
                continue;
            }
            LaneLine line;
            line.score = cell.score;
            for (std::size_t z = 0; z < proposals.layout.rows.size() && z < cell.offsets.size(); ++z) {
                const double y = proposals.layout.rows[z];
                if (y >= cell.end_y && cell.offsets[z]) {
                    line.points.push_back(
                        {cell.center_x + *cell.offsets[z], y, {head.level, static_cast<int>(k), cell.score, cell.center_y}});
                }
            }
            if (line.points.size() >= 2) {
                candidates.push_back(std::move(line));
            }
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const LaneLine& a, const LaneLine& b) { return a.score > b.score; });
    std::vector<LaneLine> kept;
    for (auto& line : candidates) {
        bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const LaneLine& k) {
            return line_distance(k, line) < group_distance;
        });
        if (!suppressed) {
            kept.push_back(std::move(line));
        }
    }
    return kept;
}

} // namespace curvelane
