#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "infint/infdim.hpp"

namespace infint {

enum class Algorithm { Multilevel, ChangingDimension };

struct ConvergenceSetup {
    Algorithm algorithm = Algorithm::Multilevel;
    WeightedSpaceSpec space;
    CostModel cost;
    std::uint32_t b = 2;
    std::uint64_t seed = 0;
    std::vector<double> budgets;

    // multilevel
    LevelPlan plan;  // L, a, mode, tau
    double level_share = 0.5;

    // changing dimension; epsilon is chosen per budget
    CDParams cd;

    // prediction
    WeightClass weight_class = WeightClass::Pod;
    std::map<unsigned, double> decay;
    std::map<unsigned, double> t_star;
};

struct ConvergenceRow {
    double budget = 0.0;
    double parameter = 0.0;  // level count m, or epsilon
    double cost = 0.0;
    double error = 0.0;
    double error_sq_bracket = 0.0;
    std::uint64_t nodes = 0;  // quadrature nodes over all levels or sets
    double seconds = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    double measured_rate = 0.0;  // NaN below two rows
    RatePrediction prediction;
    double predicted_rate = 0.0;  // 1/p from the upper exponent of the chosen model, 0 when none applies
    double rate_limit = 0.0;      // 1/p from the lower exponent
};

// -slope of log(error) against log(cost) by least squares; NaN below two points.
double fit_rate(const std::vector<ConvergenceRow>& rows);

ConvergenceResult run_convergence(const ConvergenceSetup& setup);

// "budget,parameter,cost,error,error_sq_bracket,nodes"
std::string format_convergence_rows(const ConvergenceResult& result);
// "schema,algorithm,model,measured_rate,predicted_rate,rate_limit,case_tag"
std::string format_convergence_summary(const ConvergenceSetup& setup, const ConvergenceResult& result);

}  // namespace infint
