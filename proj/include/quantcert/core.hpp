#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "quantcert/error.hpp"

namespace quantcert {

/// A validated threshold query: is Pr[property] <= theta, with additive
/// error eta and failure probability delta?
///
/// Instances only come out of validate_query(), so every ThresholdQuery in
/// flight satisfies 0 <= theta <= 1, 0 < eta < 1, 0 < delta <= 1 and
/// theta + eta <= 1.
class ThresholdQuery {
public:
    double theta() const noexcept { return theta_; }
    double eta() const noexcept { return eta_; }
    double delta() const noexcept { return delta_; }

    bool operator==(const ThresholdQuery&) const = default;

private:
    friend ThresholdQuery validate_query(double theta, double eta, double delta);
    ThresholdQuery(double theta, double eta, double delta)
        : theta_(theta), eta_(eta), delta_(delta) {}

    double theta_;
    double eta_;
    double delta_;
};

/// Throws Error{out_of_range} or Error{degenerate}.
ThresholdQuery validate_query(double theta, double eta, double delta);

/// Idempotent re-validation of an existing query.
inline ThresholdQuery validate_query(const ThresholdQuery& q) {
    return validate_query(q.theta(), q.eta(), q.delta());
}

enum class InconclusiveReason { budget_exhausted, timeout };

class Verdict {
public:
    enum class Kind { yes, no, inconclusive };

    static Verdict yes() { return Verdict(Kind::yes, std::nullopt); }
    static Verdict no() { return Verdict(Kind::no, std::nullopt); }
    static Verdict inconclusive(InconclusiveReason why) { return Verdict(Kind::inconclusive, why); }

    Kind kind() const noexcept { return kind_; }
    bool is_yes() const noexcept { return kind_ == Kind::yes; }
    bool is_no() const noexcept { return kind_ == Kind::no; }
    bool is_inconclusive() const noexcept { return kind_ == Kind::inconclusive; }
    std::optional<InconclusiveReason> reason() const noexcept { return reason_; }

    bool operator==(const Verdict&) const = default;

private:
    Verdict(Kind k, std::optional<InconclusiveReason> r) : kind_(k), reason_(r) {}

    Kind kind_;
    std::optional<InconclusiveReason> reason_;
};

std::string_view to_string(Verdict::Kind kind);
std::string_view to_string(InconclusiveReason reason);

/// Successes out of trials. p_hat is always derived, never stored.
class SampleTally {
public:
    SampleTally() = default;
    SampleTally(std::uint64_t trials, std::uint64_t successes);

    std::uint64_t trials() const noexcept { return trials_; }
    std::uint64_t successes() const noexcept { return successes_; }
    double p_hat() const noexcept {
        return trials_ == 0 ? 0.0 : static_cast<double>(successes_) / static_cast<double>(trials_);
    }

    SampleTally& operator+=(const SampleTally& other);
    bool operator==(const SampleTally&) const = default;

private:
    std::uint64_t trials_ = 0;
    std::uint64_t successes_ = 0;
};

/// Root of all randomness for a run. Trial i of Tester call c draws its
/// randomness from trial_key(c, i) only, so results do not depend on batch
/// size, thread count or the order in which batches are scheduled.
struct SeedSpec {
    std::uint64_t root_seed = 0;

    std::uint64_t trial_key(std::uint64_t call_index, std::uint64_t trial_index) const noexcept;

    /// Independent child seed, e.g. for the k-th repetition of an experiment.
    SeedSpec derive(std::uint64_t stream) const noexcept;

    bool operator==(const SeedSpec&) const = default;
};

enum class TailSide { upper, lower };

/// Multiplicative Chernoff tail for the mean of n independent 0-1 trials with
/// expectation mu, deviating by eta: exp(-n eta^2 / (3 mu)) on the upper side,
/// exp(-n eta^2 / (2 mu)) on the lower side.
double chernoff_tail(double mu, double eta, std::uint64_t n, TailSide side);

/// Largest double d such that d * parts <= total holds exactly. Used when a
/// failure budget is split by a union bound so that the split never rounds
/// above the budget it came from.
double split_budget(double total, double parts);

}  // namespace quantcert
