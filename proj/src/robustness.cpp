#include "quantcert/robustness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace quantcert {

void validate_robustness_query(const RobustnessQuery& rq) {
    if (rq.center.empty()) {
        throw Error(ErrorCode::dimension_mismatch, "robustness query needs a non-empty center");
    }
    for (double c : rq.center) {
        if (!(c >= 0.0 && c <= 1.0)) {
            throw Error(ErrorCode::out_of_range, "center coordinates must lie in [0, 1]");
        }
    }
    if (!(rq.epsilon > 0.0) || !std::isfinite(rq.epsilon)) {
        throw Error(ErrorCode::out_of_range, "epsilon must be positive and finite");
    }
}

Property misclassification_property(const nn::Model& model, std::span<const double> x0) {
    const std::size_t reference = nn::predict(model, x0);
    return [reference](std::span<const double>, std::span<const double> logits) {
        return nn::argmax(logits) != reference;
    };
}

std::vector<std::string> sampling_notes(Norm norm) {
    if (norm == Norm::linf) {
        return {"linf inputs are drawn exactly uniformly from the ball intersected with the unit box"};
    }
    return {"l2 inputs are drawn uniformly from the ball and then clamped to the unit box; "
            "near the box boundary the clamped measure is not uniform on the intersection"};
}

CertificationReport certify_density(const RobustnessQuery& rq, std::shared_ptr<const nn::Model> model,
                                    StrategyKind strategy, const SeedSpec& seed, const CertifyOptions& options) {
    validate_robustness_query(rq);
    if (!model) throw Error(ErrorCode::out_of_range, "certify_density needs a model");
    if (model->input_dim() != rq.center.size()) {
        throw Error(ErrorCode::dimension_mismatch, "center dimension does not match the model input dimension");
    }
    std::shared_ptr<const Sampler> sampler = ball_sampler(rq.norm, rq.center, rq.epsilon);
    Property property = misclassification_property(*model, rq.center);
    std::unique_ptr<Oracle> oracle = compose(sampler, model, std::move(property));
    CertificationReport report = certify(strategy, rq.query, *oracle, seed, options);
    for (std::string& note : sampling_notes(rq.norm)) report.notes.push_back(std::move(note));
    return report;
}

std::string_view to_string(HardnessMethod method) {
    return method == HardnessMethod::sweep ? "sweep" : "bisect";
}

namespace {

HardnessResult sweep(const std::vector<double>& grid, const RadiusProbe& probe) {
    if (grid.empty()) throw Error(ErrorCode::out_of_range, "epsilon grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw Error(ErrorCode::out_of_range, "epsilon grid values must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw Error(ErrorCode::out_of_range, "epsilon grid must be strictly ascending");
        }
    }
    std::vector<HardnessProbe> log;
    std::optional<double> best;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const CertificationReport r = probe(grid[i], log.size());
        log.push_back({grid[i], r.verdict, r.total_samples});
        if (!r.verdict.is_yes()) break;
        best = grid[i];
    }
    if (!best) {
        throw NoYesFound("smallest probed radius is not certified; hardness lies below the grid", std::move(log),
                         HardnessMethod::sweep);
    }
    return HardnessResult{*best, std::move(log), HardnessMethod::sweep};
}

HardnessResult bisect(const BisectRange& range, const RadiusProbe& probe) {
    if (!(range.lo > 0.0 && range.lo < range.hi && range.resolution > 0.0)) {
        throw Error(ErrorCode::out_of_range, "bisection needs 0 < lo < hi and resolution > 0");
    }
    std::vector<HardnessProbe> log;
    auto certified = [&](double eps) {
        const CertificationReport r = probe(eps, log.size());
        log.push_back({eps, r.verdict, r.total_samples});
        return r.verdict.is_yes();
    };
    if (!certified(range.lo)) {
        throw NoYesFound("lower end of the bisection range is not certified", std::move(log), HardnessMethod::bisect);
    }
    if (certified(range.hi)) {
        return HardnessResult{range.hi, std::move(log), HardnessMethod::bisect};
    }
    double yes = range.lo;
    double not_yes = range.hi;
    while (not_yes - yes > range.resolution) {
        const double mid = yes + (not_yes - yes) / 2.0;
        if (mid <= yes || mid >= not_yes) break;
        if (certified(mid)) {
            yes = mid;
        } else {
            not_yes = mid;
        }
    }
    return HardnessResult{yes, std::move(log), HardnessMethod::bisect};
}

}  // namespace

HardnessResult hardness_search(const EpsilonSearch& search, const RadiusProbe& probe) {
    if (const auto* grid = std::get_if<std::vector<double>>(&search)) return sweep(*grid, probe);
    return bisect(std::get<BisectRange>(search), probe);
}

HardnessResult adversarial_hardness(std::shared_ptr<const nn::Model> model, const std::vector<double>& x0, Norm norm,
                                    const EpsilonSearch& search, const ThresholdQuery& query, StrategyKind strategy,
                                    const SeedSpec& seed, const CertifyOptions& options) {
    return hardness_search(search, [&](double eps, std::size_t k) {
        const RobustnessQuery rq{x0, eps, norm, query};
        return certify_density(rq, model, strategy, seed.derive(k), options);
    });
}

std::vector<std::vector<double>> parse_centers_csv(std::string_view text) {
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const std::size_t eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

        std::vector<double> row;
        while (true) {
            const std::size_t comma = line.find(',');
            std::string_view cell = line.substr(0, comma);
            while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
            while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
                std::ostringstream msg;
                msg << "line " << line_no << ": cannot parse '" << cell << "' as a number";
                throw Error(ErrorCode::parse_error, msg.str());
            }
            row.push_back(v);
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected " << rows.front().size() << " values, found " << row.size();
            throw Error(ErrorCode::shape_error, msg.str());
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorCode::parse_error, "center CSV contains no rows");
    return rows;
}

std::vector<std::vector<double>> read_centers_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::parse_error, "cannot open center file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_centers_csv(buf.str());
}

}  // namespace quantcert
