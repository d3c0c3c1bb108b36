#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "quantcert/core.hpp"
#include "quantcert/nn.hpp"
#include "quantcert/oracle.hpp"
#include "quantcert/sampler.hpp"
#include "quantcert/strategy.hpp"

namespace quantcert {

/// Adversarial-density request: what fraction of the norm ball of radius
/// epsilon around center does the model label differently from center?
struct RobustnessQuery {
    std::vector<double> center;
    double epsilon;
    Norm norm;
    ThresholdQuery query;
};

/// Throws Error{out_of_range} on a non-positive radius or a center outside
/// the unit box.
void validate_robustness_query(const RobustnessQuery& rq);

/// psi(x) = 1 iff predict(model, x) != predict(model, x0). The reference
/// label is computed once here.
Property misclassification_property(const nn::Model& model, std::span<const double> x0);

/// Report notes describing how the ball is sampled for this norm.
std::vector<std::string> sampling_notes(Norm norm);

CertificationReport certify_density(const RobustnessQuery& rq, std::shared_ptr<const nn::Model> model,
                                    StrategyKind strategy, const SeedSpec& seed, const CertifyOptions& options = {});

struct BisectRange {
    double lo;
    double hi;
    double resolution;
};

/// Either an ascending grid of radii to sweep, or a bisection range.
using EpsilonSearch = std::variant<std::vector<double>, BisectRange>;

enum class HardnessMethod { sweep, bisect };

std::string_view to_string(HardnessMethod method);

struct HardnessProbe {
    double epsilon;
    Verdict verdict;
    std::uint64_t total_samples;
};

struct HardnessResult {
    double hardness;
    std::vector<HardnessProbe> probe_log;
    HardnessMethod method;
};

/// Raised when even the smallest probed radius is not certified; the probes
/// made so far travel with it.
class NoYesFound : public Error {
public:
    NoYesFound(const std::string& what, std::vector<HardnessProbe> log, HardnessMethod method)
        : Error(ErrorCode::no_yes_found, what), log_(std::move(log)), method_(method) {}

    const std::vector<HardnessProbe>& probe_log() const noexcept { return log_; }
    HardnessMethod method() const noexcept { return method_; }

private:
    std::vector<HardnessProbe> log_;
    HardnessMethod method_;
};

/// Certifies one radius. probe_index counts probes in the order they are made.
using RadiusProbe = std::function<CertificationReport(double epsilon, std::size_t probe_index)>;

/// Largest radius still certified Yes. Sweep mode probes the grid in
/// ascending order and stops at the first non-Yes; bisect mode assumes
/// verdicts are monotone in the radius and narrows [lo, hi] to the
/// resolution.
HardnessResult hardness_search(const EpsilonSearch& search, const RadiusProbe& probe);

/// Adversarial hardness of a model around x0. Probe k is certified with
/// seed.derive(k).
HardnessResult adversarial_hardness(std::shared_ptr<const nn::Model> model, const std::vector<double>& x0, Norm norm,
                                    const EpsilonSearch& search, const ThresholdQuery& query, StrategyKind strategy,
                                    const SeedSpec& seed, const CertifyOptions& options = {});

/// Reads centers from CSV text: one input per row, comma-separated floats.
std::vector<std::vector<double>> parse_centers_csv(std::string_view text);
std::vector<std::vector<double>> read_centers_csv(const std::string& path);

}  // namespace quantcert
