#include "quantcert/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "quantcert/report.hpp"
#include "quantcert/robustness.hpp"
#include "quantcert/sim.hpp"
#include "quantcert/subprocess_oracle.hpp"

namespace quantcert::cli {

using nlohmann::json;

namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <typename T>
void get_optional(const json& j, const char* key, std::optional<T>& v) {
    if (j.contains(key) && !j.at(key).is_null()) v = j.at(key).get<T>();
}

template <typename T>
void get_value(const json& j, const char* key, T& v) {
    if (j.contains(key)) v = j.at(key).get<T>();
}

}  // namespace

json config_to_json(const RunConfig& c) {
    json j{{"command", c.command}};
    if (c.command == "plan") {
        j["theta1"] = c.theta1;
        j["theta2"] = c.theta2;
        j["delta"] = c.delta;
        return j;
    }
    j["theta"] = c.theta;
    j["eta"] = c.eta;
    j["delta"] = c.delta;
    if (c.command == "budget") return j;
    j["seed"] = c.seed;
    j["batch_size"] = c.batch_size;
    j["timing"] = c.timing;
    j["strategy"] = c.strategy;
    put_optional(j, "max_samples", c.max_samples);
    put_optional(j, "max_wall_ms", c.max_wall_ms);
    if (c.command == "simulate") {
        j["p_grid"] = c.p_grid;
        j["trials"] = c.trials;
        j["format"] = c.format;
        return j;
    }
    put_optional(j, "bernoulli", c.bernoulli);
    put_optional(j, "model", c.model);
    put_optional(j, "center_file", c.center_file);
    if (c.center_file) j["center_row"] = c.center_row;
    put_optional(j, "x0", c.x0);
    put_optional(j, "oracle_cmd", c.oracle_cmd);
    put_optional(j, "reference_label", c.reference_label);
    if (!c.bernoulli) j["norm"] = c.norm;
    put_optional(j, "eps", c.eps);
    put_optional(j, "eps_grid", c.eps_grid);
    put_optional(j, "eps_lo", c.eps_lo);
    put_optional(j, "eps_hi", c.eps_hi);
    put_optional(j, "resolution", c.resolution);
    return j;
}

RunConfig config_from_json(const json& doc) {
    try {
        const json& j = doc.contains("config") ? doc.at("config") : doc;
        RunConfig c;
        c.command = j.at("command").get<std::string>();
        get_value(j, "seed", c.seed);
        get_value(j, "batch_size", c.batch_size);
        get_value(j, "timing", c.timing);
        get_value(j, "theta", c.theta);
        get_value(j, "eta", c.eta);
        get_value(j, "delta", c.delta);
        get_value(j, "theta1", c.theta1);
        get_value(j, "theta2", c.theta2);
        get_value(j, "strategy", c.strategy);
        get_optional(j, "max_samples", c.max_samples);
        get_optional(j, "max_wall_ms", c.max_wall_ms);
        get_value(j, "p_grid", c.p_grid);
        get_value(j, "trials", c.trials);
        get_value(j, "format", c.format);
        get_optional(j, "bernoulli", c.bernoulli);
        get_optional(j, "model", c.model);
        get_optional(j, "center_file", c.center_file);
        get_value(j, "center_row", c.center_row);
        get_optional(j, "x0", c.x0);
        get_optional(j, "oracle_cmd", c.oracle_cmd);
        get_optional(j, "reference_label", c.reference_label);
        get_value(j, "norm", c.norm);
        get_optional(j, "eps", c.eps);
        get_optional(j, "eps_grid", c.eps_grid);
        get_optional(j, "eps_lo", c.eps_lo);
        get_optional(j, "eps_hi", c.eps_hi);
        get_optional(j, "resolution", c.resolution);
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("malformed run config: ") + e.what());
    }
}

namespace {

struct Session {
    RunConfig cfg;
    unsigned threads = 1;
    std::string out_path;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t parse_seed(const std::string& text) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw UsageError("QUANTCERT_SEED must be a non-negative 64-bit integer, got '" + text + "'");
    }
    return v;
}

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
}

void emit(Session& s, const std::string& text) {
    if (s.out_path.empty()) {
        *s.out << text;
        s.out->flush();
        return;
    }
    std::ofstream f(s.out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot open output file '" + s.out_path + "'");
    f << text;
}

void emit_json(Session& s, const json& j) { emit(s, j.dump(2) + "\n"); }

ThresholdQuery query_of(const RunConfig& c) { return validate_query(c.theta, c.eta, c.delta); }

CertifyOptions options_of(const Session& s) {
    CertifyOptions o;
    o.limits.max_samples = s.cfg.max_samples;
    o.limits.max_wall_ms = s.cfg.max_wall_ms;
    o.execution.batch_size = s.cfg.batch_size;
    o.execution.threads = s.threads;
    o.record_timing = s.cfg.timing;
    if (s.cfg.batch_size == 0) throw UsageError("--batch-size must be positive");
    if (s.threads == 0) throw UsageError("--threads must be positive");
    if (s.cfg.max_wall_ms && !(*s.cfg.max_wall_ms >= 0.0)) throw UsageError("--max-wall-ms must be non-negative");
    return o;
}

std::vector<double> center_of(const RunConfig& c) {
    if (c.x0 && c.center_file) throw UsageError("give either --center or --x0, not both");
    if (c.x0) return *c.x0;
    if (!c.center_file) throw UsageError("a center is required (--center FILE or --x0 VALUES)");
    const std::vector<std::vector<double>> rows = read_centers_csv(*c.center_file);
    if (c.center_row >= rows.size()) {
        throw UsageError("--center-row " + std::to_string(c.center_row) + " is out of range; the file has " +
                         std::to_string(rows.size()) + " rows");
    }
    return rows[c.center_row];
}

double eps_of(const RunConfig& c) {
    if (!c.eps) throw UsageError("--eps is required");
    return *c.eps;
}

int exit_for(const Verdict& v) {
    switch (v.kind()) {
        case Verdict::Kind::yes: return exit_yes;
        case Verdict::Kind::no: return exit_no;
        case Verdict::Kind::inconclusive: return exit_inconclusive;
    }
    return exit_internal;
}

json with_config(const RunConfig& c, const json& body) {
    json out{{"config", config_to_json(c)}};
    for (auto it = body.begin(); it != body.end(); ++it) out[it.key()] = it.value();
    return out;
}

int run_certify(Session& s) {
    const RunConfig& c = s.cfg;
    const ThresholdQuery q = query_of(c);
    const StrategyKind strategy = parse_strategy(c.strategy);
    const CertifyOptions options = options_of(s);
    const SeedSpec seed{c.seed};
    const int sources = int(c.bernoulli.has_value()) + int(c.model.has_value()) + int(c.oracle_cmd.has_value());
    if (sources != 1) throw UsageError("certify needs exactly one of --bernoulli, --model or --oracle-cmd");

    auto run = [&]() -> CertificationReport {
        if (c.bernoulli) {
            std::unique_ptr<Oracle> oracle = bernoulli(*c.bernoulli);
            return certify(strategy, q, *oracle, seed, options);
        }
        const RobustnessQuery rq{center_of(c), eps_of(c), parse_norm(c.norm), q};
        validate_robustness_query(rq);
        if (c.model) {
            auto model = std::make_shared<const nn::Model>(nn::load_model_file(*c.model));
            return certify_density(rq, model, strategy, seed, options);
        }
        std::shared_ptr<const Sampler> sampler = ball_sampler(rq.norm, rq.center, rq.epsilon);
        SubprocessOracle oracle(*c.oracle_cmd, sampler, c.reference_label);
        if (!c.reference_label) oracle.set_reference_from(rq.center);
        CertificationReport r = certify(strategy, q, oracle, seed, options);
        for (std::string& note : sampling_notes(rq.norm)) r.notes.push_back(std::move(note));
        r.notes.push_back("reference label " + std::to_string(*oracle.reference_label()));
        return r;
    };
    const CertificationReport report = run();
    emit_json(s, with_config(c, report_to_json(report)));
    return exit_for(report.verdict);
}

int run_hardness(Session& s) {
    const RunConfig& c = s.cfg;
    const ThresholdQuery q = query_of(c);
    const StrategyKind strategy = parse_strategy(c.strategy);
    const CertifyOptions options = options_of(s);
    if (!c.model) throw UsageError("hardness needs --model");
    const Norm norm = parse_norm(c.norm);
    const std::vector<double> x0 = center_of(c);

    EpsilonSearch search;
    const bool range = c.eps_lo || c.eps_hi || c.resolution;
    if (c.eps_grid && range) throw UsageError("give either --eps-grid or --eps-lo/--eps-hi/--resolution");
    if (c.eps_grid) {
        search = *c.eps_grid;
    } else if (c.eps_lo && c.eps_hi && c.resolution) {
        search = BisectRange{*c.eps_lo, *c.eps_hi, *c.resolution};
    } else {
        throw UsageError("hardness needs --eps-grid, or all of --eps-lo, --eps-hi and --resolution");
    }
    auto model = std::make_shared<const nn::Model>(nn::load_model_file(*c.model));
    if (model->input_dim() != x0.size()) {
        throw Error(ErrorCode::dimension_mismatch, "center dimension does not match the model input dimension");
    }

    json body{{"query", query_to_json(q)},
              {"strategy", std::string(to_string(strategy))},
              {"norm", std::string(to_string(norm))},
              {"seed", c.seed},
              {"notes", sampling_notes(norm)}};
    int code = exit_yes;
    try {
        const HardnessResult r = adversarial_hardness(model, x0, norm, search, q, strategy, SeedSpec{c.seed}, options);
        body.update(hardness_to_json(r));
    } catch (const NoYesFound& e) {
        body["hardness"] = nullptr;
        body["method"] = std::string(to_string(e.method()));
        body["probe_log"] = probe_log_to_json(e.probe_log());
        body["notes"].push_back(std::string("hardness lies below every probed radius: ") + e.what());
        code = exit_no;
    }
    emit_json(s, with_config(c, body));
    return code;
}

std::vector<StrategyKind> strategies_of(const std::string& text) {
    std::vector<StrategyKind> out;
    std::string_view rest(text);
    while (true) {
        const std::size_t comma = rest.find(',');
        out.push_back(parse_strategy(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

int run_simulate(Session& s) {
    const RunConfig& c = s.cfg;
    const ThresholdQuery q = query_of(c);
    const std::vector<StrategyKind> strategies = strategies_of(c.strategy);
    const std::vector<double> grid = parse_grid(c.p_grid);
    for (double p : grid) {
        if (!(p >= 0.0 && p <= 1.0)) throw UsageError("p grid values must lie in [0, 1]");
    }
    if (c.trials == 0) throw UsageError("--trials must be at least 1");
    if (c.format != "csv" && c.format != "json") throw UsageError("--format must be csv or json");
    SimOptions sim;
    sim.threads = s.threads;
    sim.certify = options_of(s);
    const SweepTable table = complexity_sweep(strategies, q, grid, c.trials, SeedSpec{c.seed}, sim);
    if (c.format == "csv") {
        emit(s, sweep_to_csv(table));
    } else {
        json body = sweep_to_json(table);
        body["query"] = query_to_json(q);
        body["seed"] = c.seed;
        json means = json::object();
        for (StrategyKind k : strategies) {
            means[std::string(to_string(k))] =
                json{{"grid_mean_samples", table.grid_mean_samples(k)}, {"grid_ratio", table.grid_ratio(k)}};
        }
        body["summary"] = std::move(means);
        emit_json(s, with_config(c, body));
    }
    return 0;
}

int run_plan(Session& s) {
    const TesterPlan plan = plan_tester(s.cfg.theta1, s.cfg.theta2, s.cfg.delta);
    emit_json(s, with_config(s.cfg, json{{"plan", plan_to_json(plan)}}));
    return 0;
}

int run_budget(Session& s) {
    const ThresholdQuery q = query_of(s.cfg);
    emit_json(s, with_config(s.cfg, json{{"budget", budget_to_json(q, worst_case_budget(q))}}));
    return 0;
}

bool oracle_side_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::oracle_failure:
        case ErrorCode::spawn_failure:
        case ErrorCode::protocol_violation:
        case ErrorCode::child_exit: return true;
        default: return false;
    }
}

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    bool no_timing = false;
    std::string x0;
    std::string eps_grid;
};

void add_query(CLI::App* sub, RunConfig& c) {
    sub->add_option("--theta", c.theta, "threshold theta")->required();
    sub->add_option("--eta", c.eta, "error tolerance eta")->required();
    sub->add_option("--delta", c.delta, "failure probability delta")->required();
}

void add_run(CLI::App* sub, RunConfig& c, Session& s, Flags& f) {
    sub->add_option("--strategy", c.strategy, "bincert, fixedcert or estimate");
    sub->add_option("--seed", f.seed, "root seed (QUANTCERT_SEED takes precedence)");
    sub->add_option("--max-samples", c.max_samples, "stop with Inconclusive before exceeding this many samples");
    sub->add_option("--max-wall-ms", c.max_wall_ms, "stop with Inconclusive after this wall-clock time");
    sub->add_option("--batch-size", c.batch_size, "trials per oracle batch");
    sub->add_option("--threads", s.threads, "worker threads");
    sub->add_flag("--no-timing", f.no_timing, "report wall_time_ms as 0 so reports are byte-reproducible");
}

void add_io(CLI::App* sub, Session& s, Flags& f) {
    sub->add_option("--out", s.out_path, "write the report to this file instead of stdout");
    sub->add_option("--config", f.config_path, "re-run the config embedded in a previous report");
}

void add_center(CLI::App* sub, RunConfig& c, Flags& f) {
    sub->add_option("--model", c.model, "model JSON file");
    sub->add_option("--center", c.center_file, "CSV file of centers, one per row");
    sub->add_option("--center-row", c.center_row, "row of the center file to use");
    sub->add_option("--x0", f.x0, "center as comma-separated values");
    sub->add_option("--norm", c.norm, "linf or l2");
}

std::vector<double> parse_values(const std::string& text) { return parse_centers_csv(text).front(); }

int dispatch(Session& s) {
    const std::string& cmd = s.cfg.command;
    if (cmd == "certify") return run_certify(s);
    if (cmd == "hardness") return run_hardness(s);
    if (cmd == "simulate") return run_simulate(s);
    if (cmd == "plan") return run_plan(s);
    if (cmd == "budget") return run_budget(s);
    throw UsageError("unknown command '" + cmd + "'");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Session s;
    s.out = &out;
    s.err = &err;
    RunConfig& c = s.cfg;
    Flags f;

    CLI::App app{"Statistical certification of threshold queries over black-box probabilistic properties",
                 "quantcert"};
    app.require_subcommand(1);

    CLI::App* certify_cmd = app.add_subcommand("certify", "decide whether Pr[property] <= theta");
    add_query(certify_cmd, c);
    add_run(certify_cmd, c, s, f);
    add_io(certify_cmd, s, f);
    add_center(certify_cmd, c, f);
    certify_cmd->add_option("--bernoulli", c.bernoulli, "synthetic oracle with success probability p");
    certify_cmd->add_option("--eps", c.eps, "perturbation radius");
    certify_cmd->add_option("--oracle-cmd", c.oracle_cmd, "external classifier command (line protocol)");
    certify_cmd->add_option("--reference-label", c.reference_label, "label of the center for --oracle-cmd");

    CLI::App* hardness_cmd = app.add_subcommand("hardness", "largest radius still certified Yes");
    add_query(hardness_cmd, c);
    add_run(hardness_cmd, c, s, f);
    add_io(hardness_cmd, s, f);
    add_center(hardness_cmd, c, f);
    hardness_cmd->add_option("--eps-grid", f.eps_grid, "ascending radii, 'a,b,c' or 'lo:hi:step'");
    hardness_cmd->add_option("--eps-lo", c.eps_lo, "bisection lower end");
    hardness_cmd->add_option("--eps-hi", c.eps_hi, "bisection upper end");
    hardness_cmd->add_option("--resolution", c.resolution, "bisection resolution");

    CLI::App* simulate_cmd = app.add_subcommand("simulate", "sample-complexity sweep against synthetic oracles");
    add_query(simulate_cmd, c);
    add_run(simulate_cmd, c, s, f);
    add_io(simulate_cmd, s, f);
    simulate_cmd->add_option("--p-grid", c.p_grid, "'lo:hi:step' or comma-separated values");
    simulate_cmd->add_option("--trials", c.trials, "runs per grid cell");
    simulate_cmd->add_option("--format", c.format, "csv or json");

    CLI::App* plan_cmd = app.add_subcommand("plan", "sample size and decision boundary of one test");
    plan_cmd->add_option("--theta1", c.theta1, "lower threshold")->required();
    plan_cmd->add_option("--theta2", c.theta2, "upper threshold")->required();
    plan_cmd->add_option("--delta", c.delta, "failure probability")->required();
    plan_cmd->add_option("--out", s.out_path, "write the result to this file instead of stdout");

    CLI::App* budget_cmd = app.add_subcommand("budget", "worst-case sample budget of bincert");
    add_query(budget_cmd, c);
    budget_cmd->add_option("--out", s.out_path, "write the result to this file instead of stdout");

    // --config supplies the query itself, so required flags must not block it.
    for (CLI::App* sub : {certify_cmd, hardness_cmd, simulate_cmd}) {
        for (const char* name : {"--theta", "--eta", "--delta"}) {
            sub->get_option(name)->required(false);
        }
    }

    std::vector<std::string> argv_store{"quantcert"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (std::string& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        CLI::App* chosen = app.get_subcommands().front();
        if (!f.config_path.empty()) {
            std::ifstream in(f.config_path, std::ios::binary);
            if (!in) throw UsageError("cannot open config file '" + f.config_path + "'");
            json doc;
            try {
                doc = json::parse(in);
            } catch (const json::exception& e) {
                throw Error(ErrorCode::parse_error, std::string("config file is not valid JSON: ") + e.what());
            }
            c = config_from_json(doc);
            if (c.command != chosen->get_name()) {
                throw UsageError("config was recorded for '" + c.command + "', not '" + chosen->get_name() + "'");
            }
        } else {
            c.command = chosen->get_name();
            if (c.command != "plan" && c.command != "budget") {
                for (const char* name : {"--theta", "--eta", "--delta"}) {
                    if (chosen->count(name) == 0) throw UsageError(std::string(name) + " is required");
                }
            }
            if (c.command == "certify" || c.command == "hardness" || c.command == "simulate") {
                if (const char* env = std::getenv("QUANTCERT_SEED"); env != nullptr) {
                    c.seed = parse_seed(env);
                } else if (f.seed) {
                    c.seed = *f.seed;
                } else {
                    c.seed = entropy_seed();
                }
                c.timing = !f.no_timing;
                if (c.strategy == "baseline") c.strategy = "estimate";
            }
            if (!f.x0.empty()) c.x0 = parse_values(f.x0);
            if (!f.eps_grid.empty()) c.eps_grid = parse_grid(f.eps_grid);
        }
        return dispatch(s);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return oracle_side_error(e.code()) ? exit_internal : exit_usage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace quantcert::cli
