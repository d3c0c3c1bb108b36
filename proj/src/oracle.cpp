#include "quantcert/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "quantcert/rng.hpp"

namespace quantcert {

BernoulliOracle::BernoulliOracle(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::out_of_range, "Bernoulli probability must lie in [0, 1]");
    }
}

SampleTally BernoulliOracle::draw(const TrialBatch& batch, const SeedSpec& seed) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < batch.count; ++i) {
        hits += unit_double(seed.trial_key(batch.call_index, batch.first_trial + i)) < p_ ? 1 : 0;
    }
    return SampleTally(batch.count, hits);
}

std::string BernoulliOracle::description() const {
    std::ostringstream s;
    s << "bernoulli(" << p_ << ")";
    return s.str();
}

std::unique_ptr<Oracle> bernoulli(double p) {
    return std::make_unique<BernoulliOracle>(p);
}

PropertyOracle::PropertyOracle(std::shared_ptr<const Sampler> sampler, std::shared_ptr<const nn::Model> model,
                               Property property)
    : sampler_(std::move(sampler)), model_(std::move(model)), property_(std::move(property)) {
    if (!sampler_ || !model_ || !property_) {
        throw Error(ErrorCode::out_of_range, "property oracle needs a sampler, a model and a property");
    }
    if (sampler_->dimension() != model_->input_dim()) {
        std::ostringstream msg;
        msg << "sampler dimension " << sampler_->dimension() << " != model input dimension "
            << model_->input_dim();
        throw Error(ErrorCode::dimension_mismatch, msg.str());
    }
}

SampleTally PropertyOracle::draw(const TrialBatch& batch, const SeedSpec& seed) {
    std::vector<double> x(sampler_->dimension());
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < batch.count; ++i) {
        sampler_->sample(batch.call_index, batch.first_trial + i, seed, x);
        const std::vector<double> logits = nn::forward(*model_, x);
        hits += property_(x, logits) ? 1 : 0;
    }
    return SampleTally(batch.count, hits);
}

std::string PropertyOracle::description() const {
    return "property over " + sampler_->description();
}

std::unique_ptr<Oracle> compose(std::shared_ptr<const Sampler> sampler, std::shared_ptr<const nn::Model> model,
                                Property property) {
    return std::make_unique<PropertyOracle>(std::move(sampler), std::move(model), std::move(property));
}

SampleTally CountingOracle::draw(const TrialBatch& batch, const SeedSpec& seed) {
    calls_.fetch_add(1);
    const SampleTally t = inner_.draw(batch, seed);
    trials_.fetch_add(t.trials());
    successes_.fetch_add(t.successes());
    return t;
}

SampleTally TracingOracle::draw(const TrialBatch& batch, const SeedSpec& seed) {
    SampleTally total;
    std::vector<Record> local;
    local.reserve(batch.count);
    for (std::uint64_t i = 0; i < batch.count; ++i) {
        const TrialBatch one{batch.call_index, batch.first_trial + i, 1};
        const SampleTally t = inner_.draw(one, seed);
        local.push_back({one.call_index, one.first_trial, t.successes() == 1});
        total += t;
    }
    std::lock_guard lock(mu_);
    records_.insert(records_.end(), local.begin(), local.end());
    return total;
}

std::vector<TracingOracle::Record> TracingOracle::records() const {
    std::lock_guard lock(mu_);
    std::vector<Record> out = records_;
    std::sort(out.begin(), out.end(), [](const Record& a, const Record& b) {
        return a.call_index != b.call_index ? a.call_index < b.call_index : a.trial_index < b.trial_index;
    });
    return out;
}

}  // namespace quantcert
