#pragma once

#include <json.hpp>

#include "quantcert/robustness.hpp"
#include "quantcert/sim.hpp"
#include "quantcert/strategy.hpp"
#include "quantcert/tester.hpp"

namespace quantcert {

/// {query, strategy, verdict, [inconclusive_reason], total_samples,
/// wall_time_ms, seed, calls, notes}. A call cut short by the wall-clock
/// limit has outcome "aborted".
nlohmann::json report_to_json(const CertificationReport& report);

nlohmann::json query_to_json(const ThresholdQuery& q);
nlohmann::json plan_to_json(const TesterPlan& plan);
nlohmann::json budget_to_json(const ThresholdQuery& q, const BudgetBound& bound);
nlohmann::json probe_log_to_json(const std::vector<HardnessProbe>& log);
nlohmann::json hardness_to_json(const HardnessResult& result);
nlohmann::json soundness_to_json(const SoundnessStats& stats);
nlohmann::json sweep_to_json(const SweepTable& table);

}  // namespace quantcert
