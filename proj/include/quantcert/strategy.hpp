#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quantcert/core.hpp"
#include "quantcert/oracle.hpp"
#include "quantcert/tester.hpp"

namespace quantcert {

// ---------------------------------------------------------------------------
// Interval bookkeeping
// ---------------------------------------------------------------------------

/// proving: theta2 <= theta, a Yes proves p <= theta.
/// refuting: theta1 >= theta + eta, a No proves p > theta + eta.
/// final: exactly (theta, theta + eta); its answer is returned as is.
/// estimate: the single call of the estimation baseline.
enum class IntervalSide { proving, refuting, final_check, estimate };

std::string_view to_string(IntervalSide side);

struct IntervalSchedule {
    IntervalSide side;
    double theta1;
    double theta2;
    double delta_call;

    bool operator==(const IntervalSchedule&) const = default;
};

/// One step of the halving interval construction, with its endpoints as
/// given by the recurrence on (previous endpoints). Pure.
std::pair<double, double> create_interval(double theta, double prev_theta1, double prev_theta2, double eta,
                                          bool left);

/// Same recurrence, but carrying the interval width explicitly so that the
/// "width > eta" tests compare the halved width itself rather than a
/// difference of rounded endpoints.
struct HalvingInterval {
    double lo;
    double hi;
    double width;
};

HalvingInterval next_proving_interval(const ThresholdQuery& q, const std::optional<HalvingInterval>& prev);
HalvingInterval next_refuting_interval(const ThresholdQuery& q, const std::optional<HalvingInterval>& prev);

// ---------------------------------------------------------------------------
// Strategy parameters
// ---------------------------------------------------------------------------

struct BinCertParams {
    /// 3 + max(0, log2(theta/eta)) + max(0, log2((1-theta-eta)/eta)).
    double n_calls_bound;
    /// delta / n_calls_bound, rounded down so that delta_min * n_calls_bound <= delta exactly.
    double delta_min;
};

BinCertParams bincert_params(const ThresholdQuery& q);

struct FixedCertParams {
    std::uint64_t n_l;
    std::uint64_t n_r;
    double alpha_l;
    double alpha_r;
    double delta_l;
    double delta_r;
    double delta_final;
};

FixedCertParams fixedcert_params(const ThresholdQuery& q);

/// Every interval each strategy may test, in the order it tests them. The
/// strategies walk these lists and stop at the first conclusive answer.
std::vector<IntervalSchedule> bincert_schedule(const ThresholdQuery& q);
std::vector<IntervalSchedule> fixedcert_schedule(const ThresholdQuery& q);

/// Smallest integer N with N > 12 ln(1/delta) / eta^2.
std::uint64_t baseline_samples(double eta, double delta);

/// The estimation baseline expressed as a single plan with boundary
/// t = theta + eta/2.
TesterPlan baseline_plan(const ThresholdQuery& q);

// ---------------------------------------------------------------------------
// Runs and reports
// ---------------------------------------------------------------------------

enum class StrategyKind { bincert, fixedcert, estimate };

std::string_view to_string(StrategyKind kind);
StrategyKind parse_strategy(std::string_view text);

struct RunLimits {
    std::optional<std::uint64_t> max_samples;
    std::optional<double> max_wall_ms;
};

struct CertifyOptions {
    RunLimits limits;
    ExecutionOptions execution;
    bool record_timing = true;
};

struct CallRecord {
    IntervalSchedule schedule;
    TesterPlan plan;
    SampleTally tally;
    /// Empty when the call was cut short by the wall-clock limit.
    std::optional<TesterOutcome> outcome;
};

struct CertificationReport {
    ThresholdQuery query;
    StrategyKind strategy;
    Verdict verdict;
    std::uint64_t total_samples = 0;
    std::vector<CallRecord> calls;
    SeedSpec seed;
    double wall_time_ms = 0.0;
    std::vector<std::string> notes;
};

CertificationReport bincert(const ThresholdQuery& q, Oracle& oracle, const SeedSpec& seed,
                            const CertifyOptions& options = {});
CertificationReport fixedcert(const ThresholdQuery& q, Oracle& oracle, const SeedSpec& seed,
                              const CertifyOptions& options = {});
CertificationReport estimate_baseline(const ThresholdQuery& q, Oracle& oracle, const SeedSpec& seed,
                                      const CertifyOptions& options = {});
CertificationReport certify(StrategyKind kind, const ThresholdQuery& q, Oracle& oracle, const SeedSpec& seed,
                            const CertifyOptions& options = {});

/// Union-bound accounting of a report. spent sums delta_call over the calls
/// actually made; declared sums it over every call the strategy could make
/// for this query. Both must stay within the query's delta.
struct DeltaAudit {
    long double spent = 0.0L;
    long double declared = 0.0L;
    bool within_budget = false;
};

DeltaAudit audit_delta(const CertificationReport& report);

/// Structural invariants of a report (interval placement, totals, verdict
/// origin). Returns a description of every violation found.
std::vector<std::string> check_report(const CertificationReport& report);

// ---------------------------------------------------------------------------
// Worst-case budget
// ---------------------------------------------------------------------------

struct BudgetBound {
    double n_calls_bound;
    double delta_min;
    /// Halving proving intervals: 4/3 (sqrt3+sqrt2)^2 (1/eta^2 - 1/theta^2) ln(1/delta_min).
    double k1;
    /// Halving refuting intervals: 4/3 (sqrt3+sqrt2)^2 (1/eta^2 - 1/(4(1-theta-eta)^2)) ln(1/delta_min).
    double k2;
    /// Final interval: (sqrt(3 theta) + sqrt(2(theta+eta)))^2 / eta^2 ln(1/delta_min).
    double k3;
    /// theta < eta: no proving halving possible, k1 reported as 0.
    bool left_degenerate;
    /// 1 - theta - eta < eta: no refuting halving possible, k2 reported as 0.
    bool right_degenerate;
    /// Sum of n_samples over the whole bincert schedule.
    std::uint64_t exact_schedule_total;
};

BudgetBound worst_case_budget(const ThresholdQuery& q);

}  // namespace quantcert
