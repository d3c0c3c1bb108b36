#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "quantcert/core.hpp"

namespace quantcert {

enum class Norm { linf, l2 };

std::string_view to_string(Norm norm);
Norm parse_norm(std::string_view text);

/// Input distribution over the unit box. sample() is a pure function of
/// (call_index, trial_index, seed), so concurrent use is safe.
class Sampler {
public:
    virtual ~Sampler() = default;

    virtual std::size_t dimension() const noexcept = 0;
    virtual void sample(std::uint64_t call_index, std::uint64_t trial_index, const SeedSpec& seed,
                        std::span<double> out) const = 0;
    /// True when x lies in the declared support.
    virtual bool contains(std::span<const double> x) const = 0;
    virtual std::string description() const = 0;

    std::vector<double> sample(std::uint64_t call_index, std::uint64_t trial_index, const SeedSpec& seed) const;
};

/// Uniform on the L-infinity ball around center intersected with [0,1]^d.
class LinfSampler final : public Sampler {
public:
    LinfSampler(std::vector<double> center, double epsilon);

    using Sampler::sample;

    std::size_t dimension() const noexcept override { return lo_.size(); }
    void sample(std::uint64_t call_index, std::uint64_t trial_index, const SeedSpec& seed,
                std::span<double> out) const override;
    bool contains(std::span<const double> x) const override;
    std::string description() const override;

    const std::vector<double>& lower() const noexcept { return lo_; }
    const std::vector<double>& upper() const noexcept { return hi_; }

private:
    std::vector<double> center_;
    double epsilon_;
    std::vector<double> lo_;
    std::vector<double> hi_;
};

/// Uniform on the L2 ball around center, then clamped coordinate-wise to
/// [0,1]. The clamp piles mass onto the box faces when the ball pokes out.
class L2Sampler final : public Sampler {
public:
    L2Sampler(std::vector<double> center, double epsilon);

    using Sampler::sample;

    std::size_t dimension() const noexcept override { return center_.size(); }
    void sample(std::uint64_t call_index, std::uint64_t trial_index, const SeedSpec& seed,
                std::span<double> out) const override;
    bool contains(std::span<const double> x) const override;
    std::string description() const override;

    /// Displacement from the center before clamping; its norm is <= epsilon.
    void offset(std::uint64_t call_index, std::uint64_t trial_index, const SeedSpec& seed,
                std::span<double> out) const;
    bool clamps() const noexcept;

private:
    std::vector<double> center_;
    double epsilon_;
};

std::unique_ptr<Sampler> linf_sampler(std::vector<double> center, double epsilon);
std::unique_ptr<Sampler> l2_sampler(std::vector<double> center, double epsilon);
std::unique_ptr<Sampler> ball_sampler(Norm norm, std::vector<double> center, double epsilon);

}  // namespace quantcert
