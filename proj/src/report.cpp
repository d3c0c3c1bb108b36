#include "quantcert/report.hpp"

#include <string>

namespace quantcert {

using nlohmann::json;

namespace {

std::string str(std::string_view s) { return std::string(s); }

json verdict_fields(const Verdict& v, json out) {
    out["verdict"] = str(to_string(v.kind()));
    if (v.reason()) out["inconclusive_reason"] = str(to_string(*v.reason()));
    return out;
}

}  // namespace

json query_to_json(const ThresholdQuery& q) {
    return json{{"theta", q.theta()}, {"eta", q.eta()}, {"delta", q.delta()}};
}

json plan_to_json(const TesterPlan& plan) {
    return json{{"theta1", plan.theta1}, {"theta2", plan.theta2}, {"delta_call", plan.delta_call},
                {"n", plan.n_samples},   {"eta1", plan.eta1},     {"eta2", plan.eta2},
                {"t", plan.t}};
}

json report_to_json(const CertificationReport& report) {
    json calls = json::array();
    for (const CallRecord& c : report.calls) {
        json j = plan_to_json(c.plan);
        j["side"] = str(to_string(c.schedule.side));
        j["trials"] = c.tally.trials();
        j["successes"] = c.tally.successes();
        j["p_hat"] = c.tally.p_hat();
        j["outcome"] = c.outcome ? str(to_string(*c.outcome)) : std::string("aborted");
        calls.push_back(std::move(j));
    }
    json out{{"query", query_to_json(report.query)},
             {"strategy", str(to_string(report.strategy))},
             {"total_samples", report.total_samples},
             {"wall_time_ms", report.wall_time_ms},
             {"seed", report.seed.root_seed},
             {"calls", std::move(calls)},
             {"notes", report.notes}};
    return verdict_fields(report.verdict, std::move(out));
}

json budget_to_json(const ThresholdQuery& q, const BudgetBound& b) {
    return json{{"query", query_to_json(q)},
                {"n_calls_bound", b.n_calls_bound},
                {"delta_min", b.delta_min},
                {"k1", b.k1},
                {"k2", b.k2},
                {"k3", b.k3},
                {"left_degenerate", b.left_degenerate},
                {"right_degenerate", b.right_degenerate},
                {"exact_schedule_total", b.exact_schedule_total},
                {"baseline_samples", baseline_samples(q.eta(), q.delta())}};
}

json probe_log_to_json(const std::vector<HardnessProbe>& log) {
    json out = json::array();
    for (const HardnessProbe& p : log) {
        out.push_back(verdict_fields(p.verdict, json{{"epsilon", p.epsilon}, {"total_samples", p.total_samples}}));
    }
    return out;
}

json hardness_to_json(const HardnessResult& result) {
    return json{{"hardness", result.hardness},
                {"method", str(to_string(result.method))},
                {"probe_log", probe_log_to_json(result.probe_log)}};
}

json soundness_to_json(const SoundnessStats& s) {
    return json{{"p", s.p},
                {"strategy", str(to_string(s.strategy))},
                {"trials", s.trials},
                {"yes_count", s.yes_count},
                {"no_count", s.no_count},
                {"inconclusive_count", s.inconclusive_count},
                {"failure_rate", s.failure_rate ? json(*s.failure_rate) : json(nullptr)},
                {"mean_samples", s.mean_samples},
                {"median_samples", s.median_samples},
                {"stddev_samples", s.stddev_samples}};
}

json sweep_to_json(const SweepTable& table) {
    json rows = json::array();
    for (const SweepRow& r : table.rows) {
        rows.push_back(json{{"p", r.p},
                            {"theta", r.theta},
                            {"eta", r.eta},
                            {"delta", r.delta},
                            {"strategy", str(to_string(r.strategy))},
                            {"mean_samples", r.mean_samples},
                            {"baseline_samples", r.baseline_samples},
                            {"ratio", r.ratio}});
    }
    return json{{"rows", std::move(rows)}};
}

}  // namespace quantcert
