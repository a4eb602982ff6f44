// SPDX-License-Identifier: Apache-2.0
#include "curvelane/blend_params.hpp"

#include <array>
#include <cmath>
#include <string>

#include "curvelane/errors.hpp"

namespace curvelane {

BlendParamSet BlendParamSet::plain_nms(const std::vector<int>& levels, double score_threshold, double group_distance)
{
    BlendParamSet set;
    for (int level : levels) {
        set.per_level[level] = BlendParams{};
    }
    set.score_threshold = score_threshold;
    set.group_distance = group_distance;
    set.locality_sigma = std::numeric_limits<double>::infinity();
    return set;
}

BlendParamSpace BlendParamSpace::for_image(double width, double height)
{
    BlendParamSpace s;
    const double diag = std::hypot(width, height);
    s.alpha1 = {-6.0 / height, 6.0 / height, 0.6 / height};
    s.alpha2 = {-6.0 / diag, 6.0 / diag, 0.6 / diag};
    s.center_x = {0.0, width, width / 20.0};
    s.center_y = {0.0, height, height / 20.0};
    s.group_distance = {5.0, width / 4.0, width / 80.0};
    s.locality_sigma = {5.0, 4.0 * height, 0.5, true};
    s.default_group_distance = width / 16.0;
    return s;
}

void BlendParamSpace::validate() const
{
    const std::array<std::pair<const char*, const ParamRange*>, 8> all{{
        {"alpha1", &alpha1},
        {"beta1", &beta1},
        {"alpha2", &alpha2},
        {"center_x", &center_x},
        {"center_y", &center_y},
        {"score_threshold", &score_threshold},
        {"group_distance", &group_distance},
        {"locality_sigma", &locality_sigma},
    }};
    for (const auto& [name, r] : all) {
        if (!(r->min < r->max) || !(r->sigma >= 0.0)) {
            throw ConstraintError(std::string("blend_space.") + name, "requires min < max and sigma >= 0");
        }
        if (r->log_scale && !(r->min > 0.0)) {
            throw ConstraintError(std::string("blend_space.") + name, "log-scale ranges need min > 0");
        }
    }
    if (score_threshold.min < 0.0 || score_threshold.max > 1.0) {
        throw ConstraintError("blend_space.score_threshold", "must stay within [0, 1]");
    }
    if (group_distance.min <= 0.0 || locality_sigma.min <= 0.0) {
        throw ConstraintError("blend_space", "distances must be positive");
    }
}

BlendParamSet BlendParamSpace::defaults(const std::vector<int>& levels) const
{
    BlendParamSet set;
    for (int level : levels) {
        BlendParams p;
        p.center_x = 0.5 * (center_x.min + center_x.max);
        p.center_y = 0.5 * (center_y.min + center_y.max);
        set.per_level[level] = p;
    }
    set.score_threshold = default_score_threshold;
    set.group_distance = default_group_distance;
    set.locality_sigma = locality_sigma.max;
    return set;
}

BlendParamSet BlendParamSpace::mutate(const BlendParamSet& base, Rng& rng, double rate) const
{
    BlendParamSet out = base;
    std::vector<std::pair<double*, const ParamRange*>> slots;
    for (auto& [level, p] : out.per_level) {
        slots.emplace_back(&p.alpha1, &alpha1);
        slots.emplace_back(&p.beta1, &beta1);
        slots.emplace_back(&p.alpha2, &alpha2);
        slots.emplace_back(&p.center_x, &center_x);
        slots.emplace_back(&p.center_y, &center_y);
    }
    slots.emplace_back(&out.score_threshold, &score_threshold);
    slots.emplace_back(&out.group_distance, &group_distance);
    slots.emplace_back(&out.locality_sigma, &locality_sigma);

    std::bernoulli_distribution pick(rate);
    std::normal_distribution<double> noise(0.0, 1.0);
    bool touched = false;
    for (auto& [value, range] : slots) {
        if (pick(rng)) {
            *value = range->step(*value, noise(rng));
            touched = true;
        }
    }
    if (!touched) {
        auto i = std::uniform_int_distribution<std::size_t>(0, slots.size() - 1)(rng);
        *slots[i].first = slots[i].second->step(*slots[i].first, noise(rng));
    }
    return out;
}

BlendParamSet BlendParamSpace::reconcile(const BlendParamSet& base, const std::vector<int>& levels) const
{
    BlendParamSet out = base;
    out.per_level.clear();
    const auto fresh = defaults(levels);
    for (int level : levels) {
        auto it = base.per_level.find(level);
        out.per_level[level] = it != base.per_level.end() ? it->second : fresh.per_level.at(level);
    }
    return out;
}

} // namespace curvelane
