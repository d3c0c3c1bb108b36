#include <cmath>

#include <gtest/gtest.h>

#include "quantcert/oracle.hpp"
#include "quantcert/strategy.hpp"

namespace quantcert {
namespace {

// Trial i succeeds iff i is even: exactly ceil(n/2) successes out of n.
class EvenTrialOracle final : public Oracle {
public:
    SampleTally draw(const TrialBatch& b, const SeedSpec&) override {
        const std::uint64_t end = b.first_trial + b.count;
        const std::uint64_t evens = (end + 1) / 2 - (b.first_trial + 1) / 2;
        return SampleTally(b.count, evens);
    }
    std::string description() const override { return "even"; }
};

TEST(CreateInterval, FirstLeftCallCoversZeroToTheta) {
    EXPECT_EQ(create_interval(0.1, 0.0, 0.0, 0.001, true), std::make_pair(0.0, 0.1));
}

TEST(CreateInterval, SecondLeftCallHalvesTowardTheta) {
    EXPECT_EQ(create_interval(0.1, 0.0, 0.1, 0.001, true), std::make_pair(0.05, 0.1));
}

TEST(CreateInterval, ZeroThetaLeftCall) {
    EXPECT_EQ(create_interval(0.0, 0.0, 0.0, 0.01, true), std::make_pair(0.0, 0.01));
}

TEST(CreateInterval, RightCalls) {
    const auto first = create_interval(0.1, 0.0, 0.0, 0.1, false);
    EXPECT_DOUBLE_EQ(first.first, 0.2);
    EXPECT_EQ(first.second, 1.0);
    const auto second = create_interval(0.1, first.first, first.second, 0.1, false);
    EXPECT_DOUBLE_EQ(second.first, 0.2);
    EXPECT_DOUBLE_EQ(second.second, 0.6);
    const auto floor = create_interval(0.1, 0.2, 0.25, 0.1, false);
    EXPECT_DOUBLE_EQ(floor.second, 0.3);
}

TEST(BinCertParams, ReferenceExample) {
    const BinCertParams p = bincert_params(validate_query(0.1, 0.001, 0.01));
    EXPECT_NEAR(p.n_calls_bound, 3.0 + std::log2(100.0) + std::log2(899.0), 1e-12);
    EXPECT_NEAR(p.n_calls_bound, 19.456033495, 1e-8);
    EXPECT_NEAR(p.delta_min, 5.1397937829e-4, 1e-13);
    EXPECT_LE(static_cast<long double>(p.delta_min) * p.n_calls_bound, 0.01L);
}

TEST(BinCertSchedule, ShapeInvariants) {
    for (double theta : {0.0, 0.01, 0.1, 0.3, 0.5, 0.85}) {
        for (double eta : {0.001, 0.01, 0.1}) {
            if (theta + eta > 1.0) continue;
            const ThresholdQuery q = validate_query(theta, eta, 0.05);
            const auto sched = bincert_schedule(q);
            const BinCertParams params = bincert_params(q);
            ASSERT_FALSE(sched.empty());
            EXPECT_LE(static_cast<double>(sched.size()), std::ceil(params.n_calls_bound));
            EXPECT_EQ(sched.back().side, IntervalSide::final_check);
            EXPECT_EQ(sched.back().theta1, theta);
            EXPECT_EQ(sched.back().theta2, theta + eta);
            double prev_left = 2.0;
            double prev_right = 2.0;
            for (const IntervalSchedule& s : sched) {
                EXPECT_EQ(s.delta_call, params.delta_min);
                const double width = s.theta2 - s.theta1;
                if (s.side == IntervalSide::proving) {
                    EXPECT_EQ(s.theta2, theta);
                    EXPECT_GT(width, eta * (1 - 1e-12));
                    EXPECT_LT(width, prev_left);
                    if (prev_left < 2.0) EXPECT_NEAR(width, std::max(eta, prev_left / 2), 1e-12);
                    prev_left = width;
                } else if (s.side == IntervalSide::refuting) {
                    EXPECT_EQ(s.theta1, theta + eta);
                    EXPECT_GT(width, eta * (1 - 1e-12));
                    EXPECT_LT(width, prev_right);
                    if (prev_right < 2.0) EXPECT_NEAR(width, std::max(eta, prev_right / 2), 1e-12);
                    prev_right = width;
                }
            }
        }
    }
}

TEST(BinCertSchedule, ThetaEqualsEtaHasNoProvingCalls) {
    const ThresholdQuery q = validate_query(0.01, 0.01, 0.01);
    const auto sched = bincert_schedule(q);
    std::vector<std::uint64_t> ns;
    for (const IntervalSchedule& s : sched) {
        EXPECT_NE(s.side, IntervalSide::proving);
        ns.push_back(plan_tester(s.theta1, s.theta2, s.delta_call).n_samples);
    }
    const std::vector<std::uint64_t> expected{20, 46, 109, 278, 769, 2323, 7641, 9567};
    EXPECT_EQ(ns, expected);
    EXPECT_EQ(worst_case_budget(q).exact_schedule_total, 20753u);
}

TEST(BinCert, AlwaysFalseOracleStopsOnFirstProvingCall) {
    const ThresholdQuery q = validate_query(0.5, 0.01, 0.01);
    BernoulliOracle zero(0.0);
    const CertificationReport r = bincert(q, zero, SeedSpec{1});
    EXPECT_TRUE(r.verdict.is_yes());
    ASSERT_EQ(r.calls.size(), 1u);
    EXPECT_EQ(r.calls[0].schedule.side, IntervalSide::proving);
    EXPECT_EQ(r.calls[0].schedule.theta1, 0.0);
    EXPECT_EQ(r.calls[0].schedule.theta2, 0.5);
    const double n = std::ceil(4.0 * std::log(1.0 / bincert_params(q).delta_min));
    EXPECT_EQ(static_cast<double>(r.total_samples), n);
    EXPECT_EQ(r.total_samples, 30u);
}

TEST(BinCert, HighProbabilityIsRefuted) {
    const ThresholdQuery q = validate_query(0.1, 0.001, 0.01);
    BernoulliOracle b(0.3);
    CountingOracle counter(b);
    const CertificationReport r = bincert(q, counter, SeedSpec{11});
    EXPECT_TRUE(r.verdict.is_no());
    EXPECT_EQ(counter.trials(), r.total_samples);
    EXPECT_TRUE(check_report(r).empty());
    EXPECT_TRUE(audit_delta(r).within_budget);
}

TEST(FixedCertParams, LayoutExample) {
    const FixedCertParams p = fixedcert_params(validate_query(0.3, 0.01, 0.01));
    EXPECT_EQ(p.n_l, 3u);
    EXPECT_EQ(p.n_r, 6u);
    EXPECT_NEAR(p.alpha_l, 0.1, 1e-15);
    EXPECT_NEAR(p.alpha_r, 0.115, 1e-15);
    EXPECT_NEAR(p.delta_l, 0.01 / 9, 1e-18);
    EXPECT_NEAR(p.delta_r, 0.01 / 18, 1e-18);
    EXPECT_NEAR(p.delta_final, 0.01 / 3, 1e-18);
    const long double sum = 3.0L * p.delta_l + 6.0L * p.delta_r + p.delta_final;
    EXPECT_LE(sum, 0.01L);
}

TEST(FixedCertParams, NoProvingSideWhenThetaBelowSqrtEta) {
    const ThresholdQuery q = validate_query(0.04, 0.01, 0.01);
    const FixedCertParams p = fixedcert_params(q);
    EXPECT_EQ(p.n_l, 0u);
    EXPECT_EQ(p.n_r, 9u);
    for (const IntervalSchedule& s : fixedcert_schedule(q)) EXPECT_NE(s.side, IntervalSide::proving);
}

TEST(FixedCertSchedule, AlternatesOutsideIn) {
    const ThresholdQuery q = validate_query(0.3, 0.01, 0.01);
    const auto s = fixedcert_schedule(q);
    ASSERT_EQ(s.size(), 3u + 6u + 1u);
    const std::vector<IntervalSide> sides{IntervalSide::proving,  IntervalSide::refuting, IntervalSide::proving,
                                          IntervalSide::refuting, IntervalSide::proving,  IntervalSide::refuting,
                                          IntervalSide::refuting, IntervalSide::refuting, IntervalSide::refuting,
                                          IntervalSide::final_check};
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i].side, sides[i]) << i;
    EXPECT_EQ(s[0].theta1, 0.0);
    EXPECT_NEAR(s[0].theta2, 0.1, 1e-15);
    EXPECT_NEAR(s[2].theta1, 0.1, 1e-15);
    EXPECT_EQ(s[4].theta2, 0.3);
    EXPECT_NEAR(s[1].theta1, 1.0 - 0.115, 1e-12);
    EXPECT_EQ(s[1].theta2, 1.0);
    EXPECT_NEAR(s[8].theta1, 0.31, 1e-15);
    EXPECT_EQ(s[9].theta1, 0.3);
    EXPECT_EQ(s[9].theta2, 0.3 + 0.01);
}

TEST(FixedCert, AlwaysFalseOracleStopsOnFirstProvingCall) {
    const ThresholdQuery q = validate_query(0.3, 0.01, 0.01);
    BernoulliOracle zero(0.0);
    const CertificationReport r = fixedcert(q, zero, SeedSpec{2});
    EXPECT_TRUE(r.verdict.is_yes());
    ASSERT_EQ(r.calls.size(), 1u);
    EXPECT_EQ(r.total_samples, static_cast<std::uint64_t>(std::ceil(20.0 * std::log(900.0))));
    EXPECT_EQ(r.total_samples, 137u);
}

TEST(FixedCert, CallCountBounded) {
    for (double p : {0.0, 0.2, 0.3, 0.305, 0.31, 0.5, 1.0}) {
        const ThresholdQuery q = validate_query(0.3, 0.01, 0.05);
        BernoulliOracle b(p);
        const CertificationReport r = fixedcert(q, b, SeedSpec{9});
        const FixedCertParams fp = fixedcert_params(q);
        EXPECT_LE(r.calls.size(), fp.n_l + fp.n_r + 1);
        EXPECT_TRUE(check_report(r).empty());
        EXPECT_TRUE(audit_delta(r).within_budget);
    }
}

TEST(Baseline, ReferenceSampleCounts) {
    EXPECT_EQ(baseline_samples(1e-3, 0.01), 55262043u);
    EXPECT_GT(baseline_samples(1e-3, 0.01), 55000000u);
    EXPECT_EQ(baseline_samples(0.1, 0.5), 832u);
    EXPECT_GT(static_cast<double>(baseline_samples(0.1, 0.5)), 12.0 * std::log(2.0) / 0.01);
}

TEST(Baseline, BoundaryTieIsYes) {
    const ThresholdQuery q = validate_query(0.45, 0.1, 0.5);
    ASSERT_EQ(q.theta() + q.eta() / 2.0, 0.5);
    EvenTrialOracle even;
    const CertificationReport r = estimate_baseline(q, even, SeedSpec{0});
    ASSERT_EQ(r.calls.size(), 1u);
    EXPECT_EQ(r.total_samples, 832u);
    EXPECT_EQ(r.calls[0].tally.successes(), 416u);
    EXPECT_TRUE(r.verdict.is_yes());
}

TEST(Limits, SampleCapYieldsInconclusive) {
    const ThresholdQuery q = validate_query(0.1, 0.001, 0.01);
    BernoulliOracle b(0.1005);
    CertifyOptions opts;
    opts.limits.max_samples = 1000;
    const CertificationReport r = bincert(q, b, SeedSpec{3}, opts);
    EXPECT_TRUE(r.verdict.is_inconclusive());
    EXPECT_EQ(r.verdict.reason(), InconclusiveReason::budget_exhausted);
    EXPECT_LE(r.total_samples, 1000u);
    EXPECT_TRUE(check_report(r).empty());
}

TEST(Limits, ZeroWallTimeYieldsTimeout) {
    const ThresholdQuery q = validate_query(0.1, 0.001, 0.01);
    BernoulliOracle b(0.1);
    CertifyOptions opts;
    opts.limits.max_wall_ms = 0.0;
    const CertificationReport r = bincert(q, b, SeedSpec{3}, opts);
    EXPECT_EQ(r.verdict.reason(), InconclusiveReason::timeout);
    EXPECT_EQ(r.total_samples, 0u);
}

TEST(Report, TotalsMatchCallsAndReplayIsExact) {
    const ThresholdQuery q = validate_query(0.2, 0.02, 0.05);
    for (double p : {0.0, 0.1, 0.2, 0.21, 0.22, 0.6}) {
        for (StrategyKind k : {StrategyKind::bincert, StrategyKind::fixedcert, StrategyKind::estimate}) {
            BernoulliOracle b(p);
            CountingOracle counter(b);
            CertifyOptions opts;
            opts.record_timing = false;
            const CertificationReport a = certify(k, q, counter, SeedSpec{21}, opts);
            EXPECT_EQ(counter.trials(), a.total_samples);
            EXPECT_TRUE(check_report(a).empty());
            EXPECT_TRUE(audit_delta(a).within_budget);
            opts.execution.threads = 4;
            opts.execution.batch_size = 17;
            const CertificationReport c = certify(k, q, b, SeedSpec{21}, opts);
            ASSERT_EQ(a.calls.size(), c.calls.size());
            for (std::size_t i = 0; i < a.calls.size(); ++i) EXPECT_EQ(a.calls[i].tally, c.calls[i].tally);
            EXPECT_EQ(a.verdict, c.verdict);
        }
    }
}

TEST(DeltaAudit, BinCertWorstCaseSpendStaysWithinDelta) {
    for (double theta : {0.0, 0.01, 0.1, 0.5, 0.9}) {
        for (double eta : {0.001, 0.01, 0.05}) {
            if (theta + eta > 1.0) continue;
            for (double delta : {0.1, 0.01, 0.001}) {
                const ThresholdQuery q = validate_query(theta, eta, delta);
                long double sum = 0.0L;
                for (const IntervalSchedule& s : bincert_schedule(q)) sum += s.delta_call;
                EXPECT_LE(sum, static_cast<long double>(delta));
                const FixedCertParams f = fixedcert_params(q);
                const long double fsum = static_cast<long double>(f.n_l) * f.delta_l +
                                         static_cast<long double>(f.n_r) * f.delta_r + f.delta_final;
                EXPECT_LE(fsum, static_cast<long double>(delta));
            }
        }
    }
}

TEST(WorstCaseBudget, ReferenceExample) {
    const ThresholdQuery q = validate_query(0.1, 0.001, 0.01);
    const BudgetBound b = worst_case_budget(q);
    const double log_term = std::log(1.0 / b.delta_min);
    const double c = 4.0 / 3.0 * std::pow(std::sqrt(3.0) + std::sqrt(2.0), 2);
    EXPECT_NEAR(b.k3, std::pow(std::sqrt(0.3) + std::sqrt(0.202), 2) / 1e-6 * log_term, 1e-3);
    EXPECT_NEAR(b.k3, 7530472.566, 0.01);
    EXPECT_NEAR(b.k1, c * (1e6 - 100.0) * log_term, 1.0);
    EXPECT_NEAR(b.k1, 99947621.17, 0.1);
    EXPECT_NEAR(b.k2, 99957586.02, 0.1);
    EXPECT_FALSE(b.left_degenerate);
    EXPECT_FALSE(b.right_degenerate);
    EXPECT_EQ(b.exact_schedule_total, 14884190u);
}

TEST(WorstCaseBudget, DegenerateSidesContributeZero) {
    const BudgetBound left = worst_case_budget(validate_query(0.005, 0.01, 0.01));
    EXPECT_TRUE(left.left_degenerate);
    EXPECT_EQ(left.k1, 0.0);
    EXPECT_GT(left.k2, 0.0);
    const BudgetBound right = worst_case_budget(validate_query(0.985, 0.01, 0.01));
    EXPECT_TRUE(right.right_degenerate);
    EXPECT_EQ(right.k2, 0.0);
    EXPECT_GT(right.k1, 0.0);
}

TEST(WorstCaseBudget, DominatesObservedRuns) {
    const ThresholdQuery q = validate_query(0.2, 0.01, 0.05);
    const std::uint64_t bound = worst_case_budget(q).exact_schedule_total;
    for (int k = 0; k <= 20; ++k) {
        BernoulliOracle b(k * 0.05);
        for (std::uint64_t r = 0; r < 5; ++r) {
            EXPECT_LE(bincert(q, b, SeedSpec{static_cast<std::uint64_t>(k)}.derive(r)).total_samples, bound);
        }
    }
}

TEST(ParseStrategy, Names) {
    EXPECT_EQ(parse_strategy("bincert"), StrategyKind::bincert);
    EXPECT_EQ(parse_strategy("fixedcert"), StrategyKind::fixedcert);
    EXPECT_EQ(parse_strategy("estimate"), StrategyKind::estimate);
    EXPECT_EQ(parse_strategy("baseline"), StrategyKind::estimate);
    EXPECT_THROW(parse_strategy("magic"), Error);
}

}  // namespace
}  // namespace quantcert
