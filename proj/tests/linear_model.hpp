#pragma once

#include <algorithm>
#include <memory>

#include "quantcert/nn.hpp"

namespace quantcert::testing {

// Two-class model on [0,1]^2 with logits (0, x1 - boundary): label 1 iff
// x1 > boundary.
inline std::shared_ptr<const nn::Model> threshold_model(double boundary) {
    return std::make_shared<const nn::Model>(
        nn::Model::create(2, {nn::Layer::dense(2, 2, {0.0, 0.0, 0.0, 1.0}, {0.0, -boundary})}));
}

// Fraction of the L-infinity ball of radius eps around (c, c) clipped to the
// unit box where x1 > boundary.
inline double linf_region_fraction(double center, double eps, double boundary) {
    const double lo = std::max(0.0, center - eps);
    const double hi = std::min(1.0, center + eps);
    return std::clamp((hi - std::max(lo, boundary)) / (hi - lo), 0.0, 1.0);
}

}  // namespace quantcert::testing
