#include "quantcert/tester.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "quantcert/parallel.hpp"

namespace quantcert {

TesterPlan plan_tester(double theta1, double theta2, double delta_call) {
    if (!(theta1 >= 0.0 && theta2 <= 1.0 && theta1 < theta2)) {
        std::ostringstream msg;
        msg << "tester interval (" << theta1 << ", " << theta2 << ") must satisfy 0 <= theta1 < theta2 <= 1";
        throw Error(ErrorCode::invalid_interval, msg.str());
    }
    if (!(delta_call > 0.0 && delta_call < 1.0)) {
        std::ostringstream msg;
        msg << "tester confidence " << delta_call << " must lie in (0, 1)";
        throw Error(ErrorCode::invalid_confidence, msg.str());
    }
    const double width = theta2 - theta1;
    const double r1 = std::sqrt(3.0 * theta1);
    const double r2 = std::sqrt(2.0 * theta2);
    const double sum = r1 + r2;

    TesterPlan plan;
    plan.theta1 = theta1;
    plan.theta2 = theta2;
    plan.delta_call = delta_call;
    plan.eta1 = width * r1 / sum;
    plan.eta2 = width - plan.eta1;
    plan.t = theta1 + plan.eta1;
    const double required = (sum * sum) / (width * width) * std::log(1.0 / delta_call);
    plan.n_samples = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(required)));
    return plan;
}

double tester_requirement(double theta1, double theta2, double delta_call, double eta1) {
    const double eta2 = theta2 - theta1 - eta1;
    const double lower = theta1 == 0.0 ? 0.0 : 3.0 * theta1 / (eta1 * eta1);
    const double upper = 2.0 * theta2 / (eta2 * eta2);
    return std::max(lower, upper) * std::log(1.0 / delta_call);
}

std::string_view to_string(TesterOutcome outcome) {
    return outcome == TesterOutcome::yes ? "Yes" : "No";
}

TesterOutcome decide(const TesterPlan& plan, const SampleTally& tally) {
    return tally.p_hat() <= plan.t ? TesterOutcome::yes : TesterOutcome::no;
}

DrawResult draw_trials(std::uint64_t n, Oracle& oracle, const SeedSpec& seed, std::uint64_t call_index,
                       const ExecutionOptions& options) {
    const std::uint64_t batch = std::max<std::size_t>(1, options.batch_size);
    const std::uint64_t batches = (n + batch - 1) / batch;
    const unsigned threads = oracle.concurrent_draws() ? std::max(1u, options.threads) : 1u;

    std::atomic<std::uint64_t> trials{0};
    std::atomic<std::uint64_t> successes{0};
    std::atomic<bool> timed_out{false};

    try {
        parallel_for(batches, threads, [&](std::size_t b) {
            if (options.deadline && std::chrono::steady_clock::now() >= *options.deadline) {
                timed_out.store(true);
                return false;
            }
            const std::uint64_t first = b * batch;
            const TrialBatch tb{call_index, first, std::min(batch, n - first)};
            const SampleTally t = oracle.draw(tb, seed);
            if (t.trials() != tb.count) {
                throw OracleError(ErrorCode::protocol_violation, "oracle returned a short batch", t);
            }
            trials.fetch_add(t.trials());
            successes.fetch_add(t.successes());
            return true;
        });
    } catch (const OracleError& e) {
        const SampleTally done(trials.load() + e.partial().trials(), successes.load() + e.partial().successes());
        throw OracleError(e.code(), e.what(), done);
    }

    DrawResult out;
    out.tally = SampleTally(trials.load(), successes.load());
    out.completed = !timed_out.load() && out.tally.trials() == n;
    return out;
}

TesterResult run_tester(const TesterPlan& plan, Oracle& oracle, const SeedSpec& seed, std::uint64_t call_index,
                        const ExecutionOptions& options) {
    ExecutionOptions no_deadline = options;
    no_deadline.deadline.reset();
    const DrawResult drawn = draw_trials(plan.n_samples, oracle, seed, call_index, no_deadline);
    return TesterResult{decide(plan, drawn.tally), drawn.tally, plan};
}

}  // namespace quantcert
