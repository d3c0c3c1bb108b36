#include "quantcert/strategy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace quantcert {

std::string_view to_string(IntervalSide side) {
    switch (side) {
        case IntervalSide::proving: return "proving";
        case IntervalSide::refuting: return "refuting";
        case IntervalSide::final_check: return "final";
        case IntervalSide::estimate: return "estimate";
    }
    return "unknown";
}

std::string_view to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::bincert: return "bincert";
        case StrategyKind::fixedcert: return "fixedcert";
        case StrategyKind::estimate: return "estimate";
    }
    return "unknown";
}

StrategyKind parse_strategy(std::string_view text) {
    if (text == "bincert") return StrategyKind::bincert;
    if (text == "fixedcert") return StrategyKind::fixedcert;
    if (text == "estimate" || text == "baseline") return StrategyKind::estimate;
    throw Error(ErrorCode::out_of_range,
                "unknown strategy '" + std::string(text) + "' (expected bincert, fixedcert or estimate)");
}

std::pair<double, double> create_interval(double theta, double prev_theta1, double prev_theta2, double eta,
                                          bool left) {
    if (theta == 0.0 && left) return {theta, theta + eta};
    if (prev_theta1 == 0.0 && prev_theta2 == 0.0) {
        if (left) return {0.0, theta};
        return {theta + eta, 1.0};
    }
    const double alpha = prev_theta2 - prev_theta1;
    const double step = std::max(eta, alpha / 2.0);
    if (left) return {prev_theta2 - step, prev_theta2};
    return {prev_theta1, prev_theta1 + step};
}

HalvingInterval next_proving_interval(const ThresholdQuery& q, const std::optional<HalvingInterval>& prev) {
    const double theta = q.theta();
    const double eta = q.eta();
    if (theta == 0.0) return {0.0, eta, eta};
    if (!prev) return {0.0, theta, theta};
    const double width = std::max(eta, prev->width / 2.0);
    return {theta - width, theta, width};
}

HalvingInterval next_refuting_interval(const ThresholdQuery& q, const std::optional<HalvingInterval>& prev) {
    const double base = q.theta() + q.eta();
    if (!prev) return {base, 1.0, 1.0 - base};
    const double width = std::max(q.eta(), prev->width / 2.0);
    return {base, base + width, width};
}

BinCertParams bincert_params(const ThresholdQuery& q) {
    const double theta = q.theta();
    const double eta = q.eta();
    const double right = 1.0 - theta - eta;
    double n = 3.0;
    if (theta > 0.0) n += std::max(0.0, std::log2(theta / eta));
    if (right > 0.0) n += std::max(0.0, std::log2(right / eta));
    return BinCertParams{n, split_budget(q.delta(), n)};
}

namespace {

// floor(x), forgiving a relative rounding error so that e.g. 0.3 / sqrt(0.01)
// counts as 3 whole intervals.
std::uint64_t tolerant_floor(double x) {
    return static_cast<std::uint64_t>(std::floor(x * (1.0 + 1e-12)));
}

}  // namespace

FixedCertParams fixedcert_params(const ThresholdQuery& q) {
    const double theta = q.theta();
    const double right = 1.0 - theta - q.eta();
    const double size = std::sqrt(q.eta());

    FixedCertParams p{};
    p.n_l = tolerant_floor(theta / size);
    p.n_r = tolerant_floor(right / size);
    p.alpha_l = p.n_l > 0 ? theta / static_cast<double>(p.n_l) : 0.0;
    p.alpha_r = p.n_r > 0 ? right / static_cast<double>(p.n_r) : 0.0;
    const double third = split_budget(q.delta(), 3.0);
    p.delta_l = p.n_l > 0 ? split_budget(third, static_cast<double>(p.n_l)) : 0.0;
    p.delta_r = p.n_r > 0 ? split_budget(third, static_cast<double>(p.n_r)) : 0.0;
    p.delta_final = third;
    return p;
}

std::vector<IntervalSchedule> bincert_schedule(const ThresholdQuery& q) {
    const BinCertParams params = bincert_params(q);
    const double eta = q.eta();
    std::vector<IntervalSchedule> out;
    std::optional<HalvingInterval> left;
    std::optional<HalvingInterval> right;
    while (true) {
        left = next_proving_interval(q, left);
        if (left->width > eta) {
            out.push_back({IntervalSide::proving, left->lo, left->hi, params.delta_min});
        }
        right = next_refuting_interval(q, right);
        if (right->width > eta) {
            out.push_back({IntervalSide::refuting, right->lo, right->hi, params.delta_min});
        }
        if (left->width <= eta && right->width <= eta) {
            out.push_back({IntervalSide::final_check, q.theta(), q.theta() + eta, params.delta_min});
            return out;
        }
    }
}

std::vector<IntervalSchedule> fixedcert_schedule(const ThresholdQuery& q) {
    const FixedCertParams p = fixedcert_params(q);
    const double theta = q.theta();
    const double base = theta + q.eta();

    auto proving = [&](std::uint64_t i) {  // i = 1 is the leftmost
        const double lo = static_cast<double>(i - 1) * p.alpha_l;
        const double hi = i == p.n_l ? theta : std::min(theta, static_cast<double>(i) * p.alpha_l);
        return IntervalSchedule{IntervalSide::proving, lo, hi, p.delta_l};
    };
    auto refuting = [&](std::uint64_t j) {  // j = 1 is the rightmost
        const double lo = base + static_cast<double>(p.n_r - j) * p.alpha_r;
        const double hi = j == 1 ? 1.0 : std::min(1.0, base + static_cast<double>(p.n_r - j + 1) * p.alpha_r);
        return IntervalSchedule{IntervalSide::refuting, lo, hi, p.delta_r};
    };

    std::vector<IntervalSchedule> out;
    const std::uint64_t rounds = std::max(p.n_l, p.n_r);
    for (std::uint64_t k = 1; k <= rounds; ++k) {
        if (k <= p.n_l) out.push_back(proving(k));
        if (k <= p.n_r) out.push_back(refuting(k));
    }
    out.push_back({IntervalSide::final_check, theta, base, p.delta_final});
    return out;
}

std::uint64_t baseline_samples(double eta, double delta) {
    const double bound = 12.0 * std::log(1.0 / delta) / (eta * eta);
    return static_cast<std::uint64_t>(std::floor(bound)) + 1;
}

TesterPlan baseline_plan(const ThresholdQuery& q) {
    TesterPlan plan;
    plan.theta1 = q.theta();
    plan.theta2 = q.theta() + q.eta();
    plan.delta_call = q.delta();
    plan.n_samples = baseline_samples(q.eta(), q.delta());
    plan.eta1 = q.eta() / 2.0;
    plan.eta2 = q.eta() / 2.0;
    plan.t = q.theta() + q.eta() / 2.0;
    return plan;
}

namespace {

using Clock = std::chrono::steady_clock;

struct ScheduledCall {
    IntervalSchedule schedule;
    TesterPlan plan;
};

TesterPlan plan_for(const IntervalSchedule& s, const ThresholdQuery& q) {
    if (s.side == IntervalSide::estimate) return baseline_plan(q);
    return plan_tester(s.theta1, s.theta2, s.delta_call);
}

// Walks the schedule in order: a Yes on a proving interval or a No on a
// refuting one ends the run, the final and estimate calls always do.
CertificationReport run_schedule(StrategyKind kind, const ThresholdQuery& q, const std::vector<IntervalSchedule>& schedule,
                                 Oracle& oracle, const SeedSpec& seed, const CertifyOptions& options) {
    const auto start = Clock::now();
    ExecutionOptions exec = options.execution;
    if (options.limits.max_wall_ms) {
        exec.deadline = start + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double, std::milli>(*options.limits.max_wall_ms));
    }

    CertificationReport report{q, kind, Verdict::inconclusive(InconclusiveReason::budget_exhausted), 0, {}, seed, 0.0,
                               {}};
    auto finish = [&](Verdict v) {
        report.verdict = v;
        if (options.record_timing) {
            report.wall_time_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        }
        return report;
    };

    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const IntervalSchedule& s = schedule[i];
        const TesterPlan plan = plan_for(s, q);
        if (options.limits.max_samples && report.total_samples + plan.n_samples > *options.limits.max_samples) {
            return finish(Verdict::inconclusive(InconclusiveReason::budget_exhausted));
        }
        if (exec.deadline && Clock::now() >= *exec.deadline) {
            return finish(Verdict::inconclusive(InconclusiveReason::timeout));
        }

        DrawResult drawn;
        try {
            drawn = draw_trials(plan.n_samples, oracle, seed, i, exec);
        } catch (const OracleError& e) {
            report.calls.push_back({s, plan, e.partial(), std::nullopt});
            report.total_samples += e.partial().trials();
            throw;
        }
        report.total_samples += drawn.tally.trials();
        if (!drawn.completed) {
            report.calls.push_back({s, plan, drawn.tally, std::nullopt});
            return finish(Verdict::inconclusive(InconclusiveReason::timeout));
        }

        const TesterOutcome outcome = decide(plan, drawn.tally);
        report.calls.push_back({s, plan, drawn.tally, outcome});
        const bool conclusive = s.side == IntervalSide::final_check || s.side == IntervalSide::estimate ||
                                (s.side == IntervalSide::proving && outcome == TesterOutcome::yes) ||
                                (s.side == IntervalSide::refuting && outcome == TesterOutcome::no);
        if (conclusive) {
            return finish(outcome == TesterOutcome::yes ? Verdict::yes() : Verdict::no());
        }
    }
    // Every schedule ends with a final or estimate call.
    return finish(Verdict::inconclusive(InconclusiveReason::budget_exhausted));
}

}  // namespace

CertificationReport bincert(const ThresholdQuery& q, Oracle& oracle, const SeedSpec& seed,
                            const CertifyOptions& options) {
    CertificationReport r = run_schedule(StrategyKind::bincert, q, bincert_schedule(q), oracle, seed, options);
    r.notes.push_back("interval halving count n uses log base 2; delta_min = delta / n with real-valued n");
    return r;
}

CertificationReport fixedcert(const ThresholdQuery& q, Oracle& oracle, const SeedSpec& seed,
                              const CertifyOptions& options) {
    CertificationReport r = run_schedule(StrategyKind::fixedcert, q, fixedcert_schedule(q), oracle, seed, options);
    r.notes.push_back("fixed intervals of size about sqrt(eta), tested alternately from the outside in");
    return r;
}

CertificationReport estimate_baseline(const ThresholdQuery& q, Oracle& oracle, const SeedSpec& seed,
                                      const CertifyOptions& options) {
    const std::vector<IntervalSchedule> schedule{
        {IntervalSide::estimate, q.theta(), q.theta() + q.eta(), q.delta()}};
    CertificationReport r = run_schedule(StrategyKind::estimate, q, schedule, oracle, seed, options);
    r.notes.push_back("estimation baseline: smallest N above 12 ln(1/delta) / eta^2, Yes iff p_hat <= theta + eta/2");
    return r;
}

CertificationReport certify(StrategyKind kind, const ThresholdQuery& q, Oracle& oracle, const SeedSpec& seed,
                            const CertifyOptions& options) {
    switch (kind) {
        case StrategyKind::bincert: return bincert(q, oracle, seed, options);
        case StrategyKind::fixedcert: return fixedcert(q, oracle, seed, options);
        case StrategyKind::estimate: return estimate_baseline(q, oracle, seed, options);
    }
    throw Error(ErrorCode::out_of_range, "unknown strategy");
}

DeltaAudit audit_delta(const CertificationReport& report) {
    DeltaAudit audit;
    for (const CallRecord& c : report.calls) audit.spent += c.schedule.delta_call;

    switch (report.strategy) {
        case StrategyKind::bincert:
            for (const IntervalSchedule& s : bincert_schedule(report.query)) audit.declared += s.delta_call;
            break;
        case StrategyKind::fixedcert: {
            const FixedCertParams p = fixedcert_params(report.query);
            audit.declared = static_cast<long double>(p.n_l) * p.delta_l +
                             static_cast<long double>(p.n_r) * p.delta_r + p.delta_final;
            break;
        }
        case StrategyKind::estimate:
            audit.declared = report.query.delta();
            break;
    }
    const long double delta = report.query.delta();
    audit.within_budget = audit.spent <= delta && audit.declared <= delta && audit.spent <= audit.declared;
    return audit;
}

std::vector<std::string> check_report(const CertificationReport& report) {
    std::vector<std::string> problems;
    auto complain = [&](std::size_t i, const std::string& what) {
        std::ostringstream s;
        s << "call " << i << ": " << what;
        problems.push_back(s.str());
    };

    const double theta = report.query.theta();
    const double upper = theta + report.query.eta();
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < report.calls.size(); ++i) {
        const CallRecord& c = report.calls[i];
        total += c.tally.trials();
        switch (c.schedule.side) {
            case IntervalSide::proving:
                if (!(c.schedule.theta2 <= theta)) complain(i, "proving interval reaches above theta");
                break;
            case IntervalSide::refuting:
                if (!(c.schedule.theta1 >= upper)) complain(i, "refuting interval starts below theta + eta");
                break;
            case IntervalSide::final_check:
            case IntervalSide::estimate:
                if (c.schedule.theta1 != theta || c.schedule.theta2 != upper) {
                    complain(i, "final interval is not (theta, theta + eta)");
                }
                break;
        }
        if (c.plan.theta1 != c.schedule.theta1 || c.plan.theta2 != c.schedule.theta2) {
            complain(i, "plan does not match its interval");
        }
        if (c.outcome) {
            if (c.tally.trials() != c.plan.n_samples) complain(i, "tally does not have exactly n trials");
            if (*c.outcome != decide(c.plan, c.tally)) complain(i, "outcome disagrees with p_hat and t");
        } else if (i + 1 != report.calls.size()) {
            complain(i, "only the last call may be unfinished");
        }
        if (i + 1 < report.calls.size() && c.outcome) {
            const bool stop = (c.schedule.side == IntervalSide::proving && *c.outcome == TesterOutcome::yes) ||
                              (c.schedule.side == IntervalSide::refuting && *c.outcome == TesterOutcome::no) ||
                              c.schedule.side == IntervalSide::final_check ||
                              c.schedule.side == IntervalSide::estimate;
            if (stop) complain(i, "run continued after a conclusive answer");
        }
    }
    if (total != report.total_samples) problems.push_back("total_samples is not the sum of per-call trials");

    if (!report.verdict.is_inconclusive()) {
        if (report.calls.empty() || !report.calls.back().outcome) {
            problems.push_back("conclusive verdict without a completed Tester call");
        } else {
            const CallRecord& last = report.calls.back();
            const bool yes = report.verdict.is_yes();
            const bool outcome_ok = *last.outcome == (yes ? TesterOutcome::yes : TesterOutcome::no);
            const bool side_ok = last.schedule.side == IntervalSide::final_check ||
                                 last.schedule.side == IntervalSide::estimate ||
                                 last.schedule.side == (yes ? IntervalSide::proving : IntervalSide::refuting);
            if (!outcome_ok || !side_ok) problems.push_back("verdict does not follow from the last call");
        }
    }
    if (!audit_delta(report).within_budget) problems.push_back("per-call failure budgets exceed delta");
    return problems;
}

BudgetBound worst_case_budget(const ThresholdQuery& q) {
    const double theta = q.theta();
    const double eta = q.eta();
    const double right = 1.0 - theta - eta;
    const BinCertParams params = bincert_params(q);
    const double log_term = std::log(1.0 / params.delta_min);
    const double c = std::pow(std::sqrt(3.0) + std::sqrt(2.0), 2.0);

    BudgetBound b{};
    b.n_calls_bound = params.n_calls_bound;
    b.delta_min = params.delta_min;
    b.left_degenerate = theta < eta;
    b.right_degenerate = right < eta;
    b.k1 = b.left_degenerate ? 0.0 : 4.0 / 3.0 * c * (1.0 / (eta * eta) - 1.0 / (theta * theta)) * log_term;
    b.k2 = b.right_degenerate ? 0.0
                              : 4.0 / 3.0 * c * (1.0 / (eta * eta) - 1.0 / (4.0 * right * right)) * log_term;
    const double r = std::sqrt(3.0 * theta) + std::sqrt(2.0 * (theta + eta));
    b.k3 = r * r / (eta * eta) * log_term;
    for (const IntervalSchedule& s : bincert_schedule(q)) {
        b.exact_schedule_total += plan_tester(s.theta1, s.theta2, s.delta_call).n_samples;
    }
    return b;
}

}  // namespace quantcert
