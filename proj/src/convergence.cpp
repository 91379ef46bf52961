#include "infint/convergence.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "infint/error.hpp"

namespace infint {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double measured_cost(const Quadrature& q, const CostModel& model) {
    return model.variant == CostVariant::Nested ? cost_nested(q, model).value : cost_unrestricted(q, model);
}

double inverse(double p) { return std::isfinite(p) && p > 0.0 ? 1.0 / p : 0.0; }

}  // namespace

double fit_rate(const std::vector<ConvergenceRow>& rows) {
    if (rows.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0.0, my = 0.0;
    for (const auto& r : rows) {
        mx += std::log(r.cost);
        my += std::log(r.error);
    }
    mx /= static_cast<double>(rows.size());
    my /= static_cast<double>(rows.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& r : rows) {
        const double dx = std::log(r.cost) - mx;
        sxy += dx * (std::log(r.error) - my);
        sxx += dx * dx;
    }
    return sxx > 0.0 ? -sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

ConvergenceResult run_convergence(const ConvergenceSetup& setup) {
    if (setup.budgets.empty()) throw Error(ErrorKind::InvalidParameters, "need at least one budget");
    ConvergenceResult out;
    const auto& space = setup.space;
    CBCRuleSource::Options opts;
    opts.b = setup.b;
    opts.alpha = space.kernel.alpha;
    opts.seed = setup.seed;

    if (setup.algorithm == Algorithm::Multilevel) {
        MLSetup ml;
        ml.plan = setup.plan;
        ml.cost = setup.cost;
        ml.b = setup.b;
        ml.level_share = setup.level_share;
        OrderedWeights ordered;
        if (setup.plan.mode == LevelMode::Union)
            ordered = enumerate_ordered(space.weights, std::nullopt, AnchoredKernel(space.kernel).c0(), 4096);
        CBCRuleSource source(space, opts);
        for (double budget : setup.budgets) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto planned = ml_plan_for_budget(ml, space.weights, ordered, budget);
            const auto algo = ml_build(planned.v, planned.level_m, source, space.kernel.c);
            const auto err = ml_error_exact(algo, space);
            ConvergenceRow row;
            row.budget = budget;
            row.parameter = static_cast<double>(planned.plan.m);
            row.cost = measured_cost(flatten(algo), setup.cost);
            row.error = std::sqrt(err.value);
            row.error_sq_bracket = err.bound;
            for (const auto& level : algo.levels) row.nodes += level.rule.size();
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            out.rows.push_back(row);
        }
    } else {
        if (setup.cost.variant != CostVariant::Unrestricted)
            throw Error(ErrorKind::InvalidParameters, "changing dimension runs in the unrestricted model");
        for (double budget : setup.budgets) {
            const auto t0 = std::chrono::steady_clock::now();
            CDParams p = setup.cd;
            p.epsilon = cd_epsilon_for_budget(space, p, setup.b, setup.cost, budget);
            const auto alloc = cd_allocate(space, p);
            const auto algo = cd_build(alloc, space, opts);
            const auto err = cd_error_exact(algo, space);
            ConvergenceRow row;
            row.budget = budget;
            row.parameter = p.epsilon;
            row.cost = cd_cost(algo, setup.cost);
            row.error = std::sqrt(err.value);
            row.error_sq_bracket = err.bound;
            for (const auto& [u, term] : algo.terms) row.nodes += term.rule.size();
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            out.rows.push_back(row);
        }
    }

    out.measured_rate = fit_rate(out.rows);
    out.prediction = predict_exponents(setup.weight_class, setup.decay, setup.t_star, space.kernel.alpha,
                                       setup.cost.s_exponent);
    const bool nested = setup.cost.variant == CostVariant::Nested;
    out.predicted_rate = inverse(nested ? out.prediction.upper_nes : out.prediction.upper_unr);
    out.rate_limit = inverse(nested ? out.prediction.lower_nes : out.prediction.lower_unr);
    return out;
}

std::string format_convergence_rows(const ConvergenceResult& result) {
    std::ostringstream out;
    out << "budget,parameter,cost,error,error_sq_bracket,nodes\n";
    for (const auto& r : result.rows)
        out << num(r.budget) << ',' << num(r.parameter) << ',' << num(r.cost) << ',' << num(r.error) << ','
            << num(r.error_sq_bracket) << ',' << r.nodes << '\n';
    return out.str();
}

std::string format_convergence_summary(const ConvergenceSetup& setup, const ConvergenceResult& result) {
    std::ostringstream out;
    out << "schema,algorithm,model,measured_rate,predicted_rate,rate_limit,case_tag\n"
        << "convergence-v1," << (setup.algorithm == Algorithm::Multilevel ? "ml" : "cd") << ','
        << (setup.cost.variant == CostVariant::Nested ? "nested" : "unrestricted") << ',' << num(result.measured_rate)
        << ',' << num(result.predicted_rate) << ',' << num(result.rate_limit) << ',' << result.prediction.case_tag
        << '\n';
    return out.str();
}

}  // namespace infint
