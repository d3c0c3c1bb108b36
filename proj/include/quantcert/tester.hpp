#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string_view>

#include "quantcert/core.hpp"
#include "quantcert/oracle.hpp"

namespace quantcert {

/// A single two-hypothesis test: decide p <= theta1 against p > theta2 from
/// one batch of n_samples trials, with failure probability delta_call on
/// either side.
///
/// The error split eta1 + eta2 = theta2 - theta1 equalises the two Chernoff
/// sample requirements 3 theta1 / eta1^2 and 2 theta2 / eta2^2, which makes
/// the common decision boundary t = theta1 + eta1 = theta2 - eta2 the one
/// needing the fewest samples.
struct TesterPlan {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double delta_call = 0.0;
    std::uint64_t n_samples = 0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    double t = 0.0;

    bool operator==(const TesterPlan&) const = default;
};

/// Throws Error{invalid_interval} unless 0 <= theta1 < theta2 <= 1, and
/// Error{invalid_confidence} unless 0 < delta_call < 1.
TesterPlan plan_tester(double theta1, double theta2, double delta_call);

/// max(3 theta1 / eta1^2, 2 theta2 / eta2^2) * ln(1/delta) for a given split
/// eta1 of the interval; the real-valued sample requirement that
/// plan_tester minimises.
double tester_requirement(double theta1, double theta2, double delta_call, double eta1);

enum class TesterOutcome { yes, no };

std::string_view to_string(TesterOutcome outcome);

/// Yes iff p_hat <= t; ties go to Yes.
TesterOutcome decide(const TesterPlan& plan, const SampleTally& tally);

struct TesterResult {
    TesterOutcome outcome;
    SampleTally tally;
    TesterPlan plan;
};

struct ExecutionOptions {
    std::size_t batch_size = 128;
    unsigned threads = 1;
    /// Checked between batches; a run past it stops early and reports a
    /// partial tally.
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct DrawResult {
    SampleTally tally;
    bool completed = true;
};

/// Draws n trials for call `call_index` in batches of options.batch_size.
/// The tally depends only on (n, seed, call_index), never on batch size,
/// threads or scheduling. On oracle failure rethrows an OracleError whose
/// partial tally includes every batch that finished.
DrawResult draw_trials(std::uint64_t n, Oracle& oracle, const SeedSpec& seed, std::uint64_t call_index,
                       const ExecutionOptions& options = {});

/// Draws exactly plan.n_samples trials and applies the decision boundary.
TesterResult run_tester(const TesterPlan& plan, Oracle& oracle, const SeedSpec& seed, std::uint64_t call_index = 0,
                        const ExecutionOptions& options = {});

}  // namespace quantcert
