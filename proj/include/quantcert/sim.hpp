#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quantcert/strategy.hpp"

namespace quantcert {

/// Outcome counts of repeated runs of one strategy against bernoulli(p).
struct SoundnessStats {
    double p = 0.0;
    StrategyKind strategy = StrategyKind::bincert;
    std::uint64_t trials = 0;
    std::uint64_t yes_count = 0;
    std::uint64_t no_count = 0;
    std::uint64_t inconclusive_count = 0;
    /// Fraction of wrong verdicts: non-Yes when p <= theta, non-No when
    /// p > theta + eta. Empty in the no-guarantee zone (theta, theta + eta].
    std::optional<double> failure_rate;
    double mean_samples = 0.0;
    double median_samples = 0.0;
    /// Population standard deviation; 0 for a single trial.
    double stddev_samples = 0.0;
};

struct SimOptions {
    unsigned threads = 1;
    CertifyOptions certify;
};

/// Run r uses seed.derive(r), so results are reproducible and independent of
/// the thread count.
SoundnessStats soundness_trial(StrategyKind strategy, const ThresholdQuery& query, double p, std::uint64_t trials,
                               const SeedSpec& seed, const SimOptions& options = {});

struct SweepRow {
    double p;
    double theta;
    double eta;
    double delta;
    StrategyKind strategy;
    double mean_samples;
    std::uint64_t baseline_samples;
    /// baseline_samples / mean_samples.
    double ratio;
};

struct SweepTable {
    std::vector<SweepRow> rows;

    /// Mean of mean_samples over the rows of one strategy.
    double grid_mean_samples(StrategyKind strategy) const;
    /// baseline / grid_mean_samples.
    double grid_ratio(StrategyKind strategy) const;
};

/// Grid cell (strategy s, p_k) uses seed.derive(k) for every strategy, so
/// strategies see the same coin flips.
SweepTable complexity_sweep(const std::vector<StrategyKind>& strategies, const ThresholdQuery& query,
                            const std::vector<double>& p_grid, std::uint64_t trials, const SeedSpec& seed,
                            const SimOptions& options = {});

/// "lo:hi:step" (inclusive of hi up to rounding) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

std::string sweep_to_csv(const SweepTable& table);

}  // namespace quantcert
