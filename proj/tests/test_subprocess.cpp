#include <gtest/gtest.h>

#include "quantcert/strategy.hpp"
#include "quantcert/subprocess_oracle.hpp"

namespace quantcert {
namespace {

std::shared_ptr<const Sampler> box() { return linf_sampler({0.5, 0.5}, 0.1); }

TEST(FormatSampleLine, ShortestRoundTrip) {
    EXPECT_EQ(format_sample_line(std::vector<double>{0.1, 0.5, 1.0, 0.0}), "0.1,0.5,1,0\n");
    const double third = 1.0 / 3.0;
    const std::string line = format_sample_line(std::vector<double>{third});
    EXPECT_EQ(std::stod(line), third);
}

TEST(Subprocess, ConstantChildGivesZeroDensity) {
    SubprocessOracle o("while read l; do echo 0; done", box(), 0);
    EXPECT_FALSE(o.concurrent_draws());
    EXPECT_EQ(o.draw({0, 0, 1000}, SeedSpec{1}), SampleTally(1000, 0));
    EXPECT_EQ(o.draw({1, 0, 10}, SeedSpec{1}), SampleTally(10, 0));
}

TEST(Subprocess, AlternatingChildGivesHalf) {
    SubprocessOracle o("i=0; while read l; do echo $i; i=$((1-i)); done", box(), 0);
    EXPECT_EQ(o.draw({0, 0, 1000}, SeedSpec{1}), SampleTally(1000, 500));
    EXPECT_EQ(o.draw({0, 1000, 7}, SeedSpec{1}), SampleTally(7, 3));
}

TEST(Subprocess, ReferenceFromCenter) {
    SubprocessOracle o("while read l; do echo 3; done", box());
    EXPECT_FALSE(o.reference_label());
    o.set_reference_from(std::vector<double>{0.5, 0.5});
    EXPECT_EQ(o.reference_label(), 3u);
    EXPECT_EQ(o.draw({0, 0, 50}, SeedSpec{1}), SampleTally(50, 0));
}

TEST(Subprocess, ChildSeesProtocolLines) {
    // The child answers 9 on any line without two comma-separated fields.
    SubprocessOracle o(
        "while IFS=, read a b; do if [ -n \"$a\" ] && [ -n \"$b\" ]; then echo 0; else echo 9; fi; done", box(), 0);
    EXPECT_EQ(o.draw({0, 0, 300}, SeedSpec{4}), SampleTally(300, 0));
}

TEST(Subprocess, ChildExitMidBatchCarriesPartialTally) {
    SubprocessOracle o("i=0; while read l; do i=$((i+1)); if [ $i -gt 300 ]; then exit 0; fi; echo 1; done", box(),
                       0);
    try {
        o.draw({0, 0, 1000}, SeedSpec{1});
        FAIL();
    } catch (const OracleError& e) {
        EXPECT_EQ(e.code(), ErrorCode::child_exit);
        EXPECT_EQ(e.partial().trials(), 300u);
        EXPECT_EQ(e.partial().successes(), 300u);
    }
    EXPECT_THROW(o.draw({0, 0, 10}, SeedSpec{1}), OracleError);
}

TEST(Subprocess, MalformedLabelIsProtocolViolation) {
    SubprocessOracle o("while read l; do echo cat; done", box(), 0);
    try {
        o.draw({0, 0, 10}, SeedSpec{1});
        FAIL();
    } catch (const OracleError& e) {
        EXPECT_EQ(e.code(), ErrorCode::protocol_violation);
        EXPECT_EQ(e.partial().trials(), 0u);
    }
}

TEST(Subprocess, MissingCommandIsChildExit) {
    SubprocessOracle o("exec /nonexistent/classifier 2>/dev/null", box(), 0);
    try {
        o.draw({0, 0, 10}, SeedSpec{1});
        FAIL();
    } catch (const OracleError& e) {
        EXPECT_EQ(e.code(), ErrorCode::child_exit);
    }
}

TEST(Subprocess, StrategyRunReportsPartialTallyOnFailure) {
    const ThresholdQuery q = validate_query(0.1, 0.05, 0.1);
    SubprocessOracle o("i=0; while read l; do i=$((i+1)); if [ $i -gt 20 ]; then exit 0; fi; echo 1; done", box(),
                       0);
    EXPECT_THROW(bincert(q, o, SeedSpec{1}), OracleError);
}

TEST(Subprocess, BinCertOverConstantChild) {
    const ThresholdQuery q = validate_query(0.1, 0.05, 0.1);
    SubprocessOracle o("while read l; do echo 0; done", box(), 0);
    CertifyOptions opts;
    opts.execution.threads = 8;
    const CertificationReport r = bincert(q, o, SeedSpec{1}, opts);
    EXPECT_TRUE(r.verdict.is_yes());
}

}  // namespace
}  // namespace quantcert
