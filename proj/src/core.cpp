#include "quantcert/core.hpp"

#include <cmath>
#include <sstream>

#include "quantcert/rng.hpp"

namespace quantcert {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::out_of_range: return "OutOfRange";
        case ErrorCode::degenerate: return "Degenerate";
        case ErrorCode::domain_error: return "DomainError";
        case ErrorCode::invalid_interval: return "InvalidInterval";
        case ErrorCode::invalid_confidence: return "InvalidConfidence";
        case ErrorCode::oracle_failure: return "OracleFailure";
        case ErrorCode::dimension_mismatch: return "DimensionMismatch";
        case ErrorCode::spawn_failure: return "SpawnFailure";
        case ErrorCode::protocol_violation: return "ProtocolViolation";
        case ErrorCode::child_exit: return "ChildExit";
        case ErrorCode::parse_error: return "ParseError";
        case ErrorCode::shape_error: return "ShapeError";
        case ErrorCode::non_finite_weight: return "NonFiniteWeight";
        case ErrorCode::no_yes_found: return "NoYesFound";
    }
    return "Unknown";
}

namespace {

void require_in(const char* name, double v, double lo, bool lo_open, double hi, bool hi_open) {
    const bool ok = std::isfinite(v) && (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
    if (!ok) {
        std::ostringstream msg;
        msg << name << " = " << v << " outside " << (lo_open ? '(' : '[') << lo << ", " << hi
            << (hi_open ? ')' : ']');
        throw Error(ErrorCode::out_of_range, msg.str());
    }
}

}  // namespace

ThresholdQuery validate_query(double theta, double eta, double delta) {
    require_in("theta", theta, 0.0, false, 1.0, false);
    require_in("eta", eta, 0.0, true, 1.0, true);
    require_in("delta", delta, 0.0, true, 1.0, false);
    if (theta + eta > 1.0) {
        std::ostringstream msg;
        msg << "theta + eta = " << theta + eta << " > 1 leaves no room for a refuting interval";
        throw Error(ErrorCode::degenerate, msg.str());
    }
    return ThresholdQuery(theta, eta, delta);
}

std::string_view to_string(Verdict::Kind kind) {
    switch (kind) {
        case Verdict::Kind::yes: return "Yes";
        case Verdict::Kind::no: return "No";
        case Verdict::Kind::inconclusive: return "Inconclusive";
    }
    return "Unknown";
}

std::string_view to_string(InconclusiveReason reason) {
    switch (reason) {
        case InconclusiveReason::budget_exhausted: return "budget-exhausted";
        case InconclusiveReason::timeout: return "timeout";
    }
    return "unknown";
}

SampleTally::SampleTally(std::uint64_t trials, std::uint64_t successes)
    : trials_(trials), successes_(successes) {
    if (successes > trials) {
        throw Error(ErrorCode::out_of_range, "tally has more successes than trials");
    }
}

SampleTally& SampleTally::operator+=(const SampleTally& other) {
    trials_ += other.trials_;
    successes_ += other.successes_;
    return *this;
}

std::uint64_t SeedSpec::trial_key(std::uint64_t call_index, std::uint64_t trial_index) const noexcept {
    std::uint64_t h = mix64(root_seed ^ 0x51ed270b2c8f6a3bULL);
    h = mix64(h ^ (call_index * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
    return mix64(h ^ trial_index);
}

SeedSpec SeedSpec::derive(std::uint64_t stream) const noexcept {
    return SeedSpec{mix64(mix64(root_seed + 0xd1b54a32d192ed03ULL) ^ mix64(stream + 1))};
}

double chernoff_tail(double mu, double eta, std::uint64_t n, TailSide side) {
    if (!(mu > 0.0) || mu > 1.0) {
        throw Error(ErrorCode::domain_error, "chernoff_tail needs 0 < mu <= 1");
    }
    if (!(eta > 0.0)) {
        throw Error(ErrorCode::domain_error, "chernoff_tail needs eta > 0");
    }
    if (n == 0) {
        throw Error(ErrorCode::domain_error, "chernoff_tail needs n >= 1");
    }
    const double denom = side == TailSide::upper ? 3.0 * mu : 2.0 * mu;
    return std::exp(-static_cast<double>(n) * eta * eta / denom);
}

double split_budget(double total, double parts) {
    double share = total / parts;
    // fma rounds once, so its sign is the exact sign of share*parts - total.
    while (share > 0.0 && std::fma(share, parts, -total) > 0.0) {
        share = std::nextafter(share, 0.0);
    }
    return share;
}

}  // namespace quantcert
