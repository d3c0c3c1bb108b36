#include "quantcert/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "quantcert/rng.hpp"

namespace quantcert {

std::string_view to_string(Norm norm) {
    return norm == Norm::linf ? "linf" : "l2";
}

Norm parse_norm(std::string_view text) {
    if (text == "linf" || text == "Linf" || text == "inf") return Norm::linf;
    if (text == "l2" || text == "L2") return Norm::l2;
    throw Error(ErrorCode::out_of_range, "unknown norm '" + std::string(text) + "' (expected linf or l2)");
}

std::vector<double> Sampler::sample(std::uint64_t call_index, std::uint64_t trial_index,
                                    const SeedSpec& seed) const {
    std::vector<double> out(dimension());
    sample(call_index, trial_index, seed, out);
    return out;
}

namespace {

void check_ball(const std::vector<double>& center, double epsilon) {
    if (center.empty()) {
        throw Error(ErrorCode::dimension_mismatch, "ball center must have at least one coordinate");
    }
    for (double c : center) {
        if (!(c >= 0.0 && c <= 1.0)) {
            throw Error(ErrorCode::out_of_range, "ball center coordinates must lie in [0, 1]");
        }
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw Error(ErrorCode::out_of_range, "perturbation radius must be positive and finite");
    }
}

std::string describe(std::string_view norm, const std::vector<double>& center, double epsilon) {
    std::ostringstream s;
    s << norm << " ball, radius " << epsilon << ", dimension " << center.size();
    return s.str();
}

}  // namespace

LinfSampler::LinfSampler(std::vector<double> center, double epsilon)
    : center_(std::move(center)), epsilon_(epsilon) {
    check_ball(center_, epsilon_);
    lo_.reserve(center_.size());
    hi_.reserve(center_.size());
    for (double c : center_) {
        lo_.push_back(std::max(0.0, c - epsilon_));
        hi_.push_back(std::min(1.0, c + epsilon_));
    }
}

void LinfSampler::sample(std::uint64_t call_index, std::uint64_t trial_index, const SeedSpec& seed,
                         std::span<double> out) const {
    TrialRng rng(seed.trial_key(call_index, trial_index));
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        const double v = lo_[i] + rng.uniform() * (hi_[i] - lo_[i]);
        out[i] = std::min(v, hi_[i]);
    }
}

bool LinfSampler::contains(std::span<const double> x) const {
    if (x.size() != lo_.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lo_[i] && x[i] <= hi_[i])) return false;
    }
    return true;
}

std::string LinfSampler::description() const {
    return describe("linf", center_, epsilon_) + ", exactly uniform on ball intersected with the unit box";
}

L2Sampler::L2Sampler(std::vector<double> center, double epsilon)
    : center_(std::move(center)), epsilon_(epsilon) {
    check_ball(center_, epsilon_);
}

void L2Sampler::offset(std::uint64_t call_index, std::uint64_t trial_index, const SeedSpec& seed,
                       std::span<double> out) const {
    TrialRng rng(seed.trial_key(call_index, trial_index));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t d = center_.size();
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            out[i] = gauss(rng);
            norm2 += out[i] * out[i];
        }
    } while (norm2 == 0.0);
    const double radius = epsilon_ * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
    const double scale = radius / std::sqrt(norm2);
    for (std::size_t i = 0; i < d; ++i) out[i] *= scale;
}

void L2Sampler::sample(std::uint64_t call_index, std::uint64_t trial_index, const SeedSpec& seed,
                       std::span<double> out) const {
    offset(call_index, trial_index, seed, out);
    for (std::size_t i = 0; i < center_.size(); ++i) {
        out[i] = std::clamp(center_[i] + out[i], 0.0, 1.0);
    }
}

bool L2Sampler::contains(std::span<const double> x) const {
    if (x.size() != center_.size()) return false;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= 0.0 && x[i] <= 1.0)) return false;
        const double diff = x[i] - center_[i];
        norm2 += diff * diff;
    }
    // Clamping only moves points toward the center along each axis.
    return std::sqrt(norm2) <= epsilon_ * (1.0 + 1e-12);
}

bool L2Sampler::clamps() const noexcept {
    for (double c : center_) {
        if (c - epsilon_ < 0.0 || c + epsilon_ > 1.0) return true;
    }
    return false;
}

std::string L2Sampler::description() const {
    return describe("l2", center_, epsilon_) + ", uniform in the ball then clamped to the unit box";
}

std::unique_ptr<Sampler> linf_sampler(std::vector<double> center, double epsilon) {
    return std::make_unique<LinfSampler>(std::move(center), epsilon);
}

std::unique_ptr<Sampler> l2_sampler(std::vector<double> center, double epsilon) {
    return std::make_unique<L2Sampler>(std::move(center), epsilon);
}

std::unique_ptr<Sampler> ball_sampler(Norm norm, std::vector<double> center, double epsilon) {
    if (norm == Norm::linf) return linf_sampler(std::move(center), epsilon);
    return l2_sampler(std::move(center), epsilon);
}

}  // namespace quantcert
