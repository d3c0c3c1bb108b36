#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "quantcert/core.hpp"
#include "quantcert/nn.hpp"
#include "quantcert/sampler.hpp"

namespace quantcert {

/// Trials [first_trial, first_trial + count) of Tester call call_index.
struct TrialBatch {
    std::uint64_t call_index = 0;
    std::uint64_t first_trial = 0;
    std::uint64_t count = 0;
};

/// Raised when an oracle cannot finish a batch. partial() holds whatever was
/// observed before the failure.
class OracleError : public Error {
public:
    OracleError(ErrorCode code, const std::string& what, SampleTally partial)
        : Error(code, what), partial_(partial) {}

    const SampleTally& partial() const noexcept { return partial_; }

private:
    SampleTally partial_;
};

/// Source of independent 0-1 trials. draw() reports the aggregate tally of a
/// batch; the returned tally has exactly batch.count trials unless it throws.
class Oracle {
public:
    virtual ~Oracle() = default;

    virtual SampleTally draw(const TrialBatch& batch, const SeedSpec& seed) = 0;

    /// Whether draw() may be called from several threads at once.
    virtual bool concurrent_draws() const noexcept { return true; }

    virtual std::string description() const = 0;
};

class BernoulliOracle final : public Oracle {
public:
    explicit BernoulliOracle(double p);

    SampleTally draw(const TrialBatch& batch, const SeedSpec& seed) override;
    std::string description() const override;

    double p() const noexcept { return p_; }

private:
    double p_;
};

std::unique_ptr<Oracle> bernoulli(double p);

/// Predicate over one input and the model's logits for it.
using Property = std::function<bool(std::span<const double> input, std::span<const double> logits)>;

/// One trial = one fresh sample, one forward pass, one predicate evaluation.
class PropertyOracle final : public Oracle {
public:
    PropertyOracle(std::shared_ptr<const Sampler> sampler, std::shared_ptr<const nn::Model> model,
                   Property property);

    SampleTally draw(const TrialBatch& batch, const SeedSpec& seed) override;
    std::string description() const override;

private:
    std::shared_ptr<const Sampler> sampler_;
    std::shared_ptr<const nn::Model> model_;
    Property property_;
};

/// Throws Error{dimension_mismatch} when the sampler and model disagree.
std::unique_ptr<Oracle> compose(std::shared_ptr<const Sampler> sampler, std::shared_ptr<const nn::Model> model,
                                Property property);

/// Pass-through wrapper that tallies everything drawn through it.
class CountingOracle final : public Oracle {
public:
    explicit CountingOracle(Oracle& inner) : inner_(inner) {}

    SampleTally draw(const TrialBatch& batch, const SeedSpec& seed) override;
    bool concurrent_draws() const noexcept override { return inner_.concurrent_draws(); }
    std::string description() const override { return "counting(" + inner_.description() + ")"; }

    std::uint64_t trials() const noexcept { return trials_.load(); }
    std::uint64_t successes() const noexcept { return successes_.load(); }
    std::uint64_t draw_calls() const noexcept { return calls_.load(); }

private:
    Oracle& inner_;
    std::atomic<std::uint64_t> trials_{0};
    std::atomic<std::uint64_t> successes_{0};
    std::atomic<std::uint64_t> calls_{0};
};

/// Debug wrapper recording every individual trial outcome. Draws the inner
/// oracle one trial at a time, so it is slow.
class TracingOracle final : public Oracle {
public:
    struct Record {
        std::uint64_t call_index;
        std::uint64_t trial_index;
        bool success;
    };

    explicit TracingOracle(Oracle& inner) : inner_(inner) {}

    SampleTally draw(const TrialBatch& batch, const SeedSpec& seed) override;
    bool concurrent_draws() const noexcept override { return inner_.concurrent_draws(); }
    std::string description() const override { return "tracing(" + inner_.description() + ")"; }

    std::vector<Record> records() const;

private:
    Oracle& inner_;
    mutable std::mutex mu_;
    std::vector<Record> records_;
};

}  // namespace quantcert
