#include "quantcert/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "quantcert/parallel.hpp"

namespace quantcert {

namespace {

struct RunSummary {
    Verdict verdict = Verdict::inconclusive(InconclusiveReason::budget_exhausted);
    std::uint64_t samples = 0;
};

std::vector<RunSummary> repeat_runs(StrategyKind strategy, const ThresholdQuery& query, double p,
                                    std::uint64_t trials, const SeedSpec& seed, const SimOptions& options) {
    std::vector<RunSummary> runs(trials);
    BernoulliOracle oracle(p);
    CertifyOptions inner = options.certify;
    inner.execution.threads = 1;
    inner.record_timing = false;
    parallel_for(trials, options.threads, [&](std::size_t r) {
        const CertificationReport rep = certify(strategy, query, oracle, seed.derive(r), inner);
        runs[r] = RunSummary{rep.verdict, rep.total_samples};
        return true;
    });
    return runs;
}

}  // namespace

SoundnessStats soundness_trial(StrategyKind strategy, const ThresholdQuery& query, double p, std::uint64_t trials,
                               const SeedSpec& seed, const SimOptions& options) {
    if (trials == 0) throw Error(ErrorCode::out_of_range, "soundness_trial needs at least one trial");
    const std::vector<RunSummary> runs = repeat_runs(strategy, query, p, trials, seed, options);

    SoundnessStats s;
    s.p = p;
    s.strategy = strategy;
    s.trials = trials;
    std::vector<double> samples;
    samples.reserve(runs.size());
    for (const RunSummary& r : runs) {
        switch (r.verdict.kind()) {
            case Verdict::Kind::yes: ++s.yes_count; break;
            case Verdict::Kind::no: ++s.no_count; break;
            case Verdict::Kind::inconclusive: ++s.inconclusive_count; break;
        }
        samples.push_back(static_cast<double>(r.samples));
    }

    if (p <= query.theta()) {
        s.failure_rate = static_cast<double>(trials - s.yes_count) / static_cast<double>(trials);
    } else if (p > query.theta() + query.eta()) {
        s.failure_rate = static_cast<double>(trials - s.no_count) / static_cast<double>(trials);
    }

    const double n = static_cast<double>(samples.size());
    s.mean_samples = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double sq = 0.0;
    for (double v : samples) sq += (v - s.mean_samples) * (v - s.mean_samples);
    s.stddev_samples = samples.size() > 1 ? std::sqrt(sq / n) : 0.0;
    std::sort(samples.begin(), samples.end());
    const std::size_t mid = samples.size() / 2;
    s.median_samples = samples.size() % 2 == 1 ? samples[mid] : (samples[mid - 1] + samples[mid]) / 2.0;
    return s;
}

double SweepTable::grid_mean_samples(StrategyKind strategy) const {
    double sum = 0.0;
    std::size_t count = 0;
    for (const SweepRow& r : rows) {
        if (r.strategy != strategy) continue;
        sum += r.mean_samples;
        ++count;
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double SweepTable::grid_ratio(StrategyKind strategy) const {
    for (const SweepRow& r : rows) {
        if (r.strategy == strategy) return static_cast<double>(r.baseline_samples) / grid_mean_samples(strategy);
    }
    return 0.0;
}

SweepTable complexity_sweep(const std::vector<StrategyKind>& strategies, const ThresholdQuery& query,
                            const std::vector<double>& p_grid, std::uint64_t trials, const SeedSpec& seed,
                            const SimOptions& options) {
    if (strategies.empty() || p_grid.empty() || trials == 0) {
        throw Error(ErrorCode::out_of_range, "complexity_sweep needs strategies, a p grid and trials >= 1");
    }
    const std::uint64_t baseline = baseline_samples(query.eta(), query.delta());
    SweepTable table;
    for (StrategyKind s : strategies) {
        for (std::size_t k = 0; k < p_grid.size(); ++k) {
            const SoundnessStats st = soundness_trial(s, query, p_grid[k], trials, seed.derive(k), options);
            table.rows.push_back(SweepRow{p_grid[k], query.theta(), query.eta(), query.delta(), s, st.mean_samples,
                                          baseline, static_cast<double>(baseline) / st.mean_samples});
        }
    }
    return table;
}

namespace {

double parse_double(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error(ErrorCode::parse_error, "cannot parse '" + std::string(s) + "' as a number");
    }
    return v;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        const std::size_t a = text.find(':');
        const std::size_t b = text.find(':', a + 1);
        if (b == std::string::npos) throw Error(ErrorCode::parse_error, "range grid must be lo:hi:step");
        const double lo = parse_double(std::string_view(text).substr(0, a));
        const double hi = parse_double(std::string_view(text).substr(a + 1, b - a - 1));
        const double step = parse_double(std::string_view(text).substr(b + 1));
        if (!(step > 0.0) || hi < lo) throw Error(ErrorCode::out_of_range, "range grid needs lo <= hi, step > 0");
        const auto count = static_cast<std::uint64_t>(std::floor((hi - lo) / step + 1e-9));
        for (std::uint64_t k = 0; k <= count; ++k) {
            out.push_back(std::min(hi, lo + static_cast<double>(k) * step));
        }
        return out;
    }
    std::string_view rest(text);
    while (true) {
        const std::size_t comma = rest.find(',');
        out.push_back(parse_double(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

std::string sweep_to_csv(const SweepTable& table) {
    std::ostringstream out;
    out.precision(17);
    out << "p,theta,eta,delta,strategy,mean_samples,baseline_samples,ratio\n";
    for (const SweepRow& r : table.rows) {
        out << r.p << ',' << r.theta << ',' << r.eta << ',' << r.delta << ',' << to_string(r.strategy) << ','
            << r.mean_samples << ',' << r.baseline_samples << ',' << r.ratio << '\n';
    }
    return out.str();
}

}  // namespace quantcert
