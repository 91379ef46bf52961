#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "infint/cbc.hpp"
#include "infint/coordinate_set.hpp"
#include "infint/kernel.hpp"
#include "infint/pointsets.hpp"
#include "infint/quadrature.hpp"
#include "infint/weights.hpp"

namespace infint {

enum class CostVariant { Nested, Unrestricted };

// $(k) = max(1, k^s)
struct CostModel {
    double s_exponent = 1.0;
    CostVariant variant = CostVariant::Nested;

    double dollar(std::size_t k) const;
};

enum class LevelMode { Union, Prefix };

struct LevelPlan {
    std::uint32_t L = 1;
    double a = 2.0;
    std::size_t m = 0;
    LevelMode mode = LevelMode::Prefix;
    double tau = 0.5;
    double budget = 0.0;

    void validate() const;
    // L_k = L ceil(a^{k-1}) for k = 1..m
    std::vector<std::uint32_t> level_sizes() const;
};

// v_1 .. v_m: [L_k] in prefix mode, the union of the first L_k ordered sets in union mode.
std::vector<CoordinateSet> level_sets(const LevelPlan& plan, const OrderedWeights& ordered);
// For each level, the 0-based positions j of ordered sets with u_j in v_k but not in v_{k-1}.
std::vector<std::vector<std::size_t>> level_partition(const std::vector<CoordinateSet>& v,
                                                      const OrderedWeights& ordered);

// n_k = ceil(C sigma_k^{1/(2tau+1)} L_k^{-s/(2tau+1)}) with C chosen so that sum x_k L_k^s = S, then a
// running minimum so the counts never increase with k.
std::vector<std::uint64_t> ml_allocate(const std::vector<double>& sigma, const std::vector<double>& L_k, double s,
                                       double tau, double budget);

// Prefix mode: sigma_k = sum of gamma_j over (L_{k-1}, L_k]. Union mode: sum over new coordinates l of
// (sum_{l in u in [l]} gamma_u^{1/(2tau)} c_tau^{|u|})^{2tau}.
std::vector<double> level_constants(const LevelPlan& plan, const std::vector<CoordinateSet>& v,
                                    const WeightFamily& weights, double c_tau = 1.0);

struct MLLevel {
    CoordinateSet v;
    Quadrature rule;                      // every node supported on v
    std::optional<PolyLatticeSpec> spec;  // set when the rule is a polynomial lattice rule
};

struct MultilevelAlgo {
    double anchor = 0.0;
    std::vector<MLLevel> levels;
};

// f(t_v; c): t lists the coordinates of support in increasing order.
using Integrand = std::function<double(const CoordinateSet& support, const std::vector<double>& t)>;

// Validates v_1 in v_2 in ... and rule supports.
MultilevelAlgo ml_assemble(std::vector<CoordinateSet> v, std::vector<Quadrature> rules, double anchor);

// Equal-weight polynomial lattice rules from CBC. Rules over [L] reuse one builder per point count,
// so a longer prefix only adds components.
class CBCRuleSource {
public:
    struct Options {
        std::uint32_t b = 2;
        unsigned alpha = 1;
        std::uint64_t seed = 0;
        std::uint64_t candidate_cap = std::uint64_t{1} << 16;
        std::uint64_t sample_size = 256;
        std::uint64_t pairwise_work = std::uint64_t{1} << 26;
    };

    CBCRuleSource(WeightedSpaceSpec space, Options options);

    // b^m points over the coordinates of v.
    MLLevel rule(const CoordinateSet& v, int m);
    // Per-component criteria of the cached builder for b^m points (prefix rules only).
    std::vector<double> criteria(int m, std::size_t s);
    const Options& options() const noexcept { return options_; }

private:
    CBCConfig config(int m, WeightFamily weights) const;

    WeightedSpaceSpec space_;
    Options options_;
    std::map<int, CBCBuilder> prefix_;
};

// Multilevel algorithm with b^m_k points on level k.
MultilevelAlgo ml_build(const std::vector<CoordinateSet>& v, const std::vector<int>& level_m, CBCRuleSource& source,
                        double anchor);

// Constant node f(c) followed by the signed level nodes; evaluations at v_0 = {} merge into the constant.
Quadrature flatten(const MultilevelAlgo& algo);

double quadrature_apply(const Quadrature& q, const Integrand& f);
// f(c) + sum_k sum_j a_j (f(t_{v_k}) - f(t_{v_{k-1}}))
double ml_apply(const MultilevelAlgo& algo, const Integrand& f);

// Squared worst-case error: covered sets use their own level, the rest contribute gamma_u C_0^{|u|}.
// bound is the width of the bracket on the tail.
ValueBound ml_error_exact(const MultilevelAlgo& algo, const WeightedSpaceSpec& spec);

// $(0) + 2 sum_k n_k $(|v_k|)
double ml_cost_bound(const MultilevelAlgo& algo, const CostModel& model);

struct MLSetup {
    LevelPlan plan;  // L, a, mode, tau; m and budget are chosen per budget
    CostModel cost;
    std::uint32_t b = 2;
    // Level counts tried: sum_k $(|v_k|) <= level_share * budget.
    double level_share = 0.5;
    double c_tau = 1.0;
};

struct MLPlanned {
    LevelPlan plan;
    std::vector<CoordinateSet> v;
    std::vector<double> sigma;
    std::vector<std::uint64_t> n_alloc;  // ml_allocate output at the fitted budget
    std::vector<int> level_m;            // b^{level_m} points per level
    double fitted_budget = 0.0;
    double predicted_cost = 0.0;
    // sum_k sigma_k N_k^{-2 tau} + weight outside v_m; the planner keeps the m minimizing it
    double error_model = 0.0;
};

// For each admissible m: allocates, rounds to powers of b (at least b points), shrinks the allocation budget
// until the nested cost fits, then spends what is left on the levels with the best modelled gain per cost.
// Returns the plan with the smallest error_model.
MLPlanned ml_plan_for_budget(const MLSetup& setup, const WeightFamily& weights, const OrderedWeights& ordered,
                             double budget);

// ---------------------------------------------------------------- changing dimension

struct CDParams {
    double lambda0 = 0.5;
    double tau = 0.5;
    double c_const = 1.0;
    double C_const = 1.0;
    double epsilon = 0.1;
    double decay = 2.0;  // decay of the weights, checked against lambda0 and tau
};

struct CDAllocation {
    std::map<CoordinateSet, std::uint64_t> n;  // only sets with n_u >= 1
    std::size_t d_eps = 0;
    double L_value = 0.0;  // L_{1-lambda0}
};

CDAllocation cd_allocate(const WeightedSpaceSpec& spec, const CDParams& params);

struct CDTerm {
    std::uint64_t n_alloc = 0;
    Quadrature rule;  // nodes supported on u
};

struct ChangingDimAlgo {
    double anchor = 0.0;
    std::map<CoordinateSet, CDTerm> terms;
};

// Rules with b^m points, b^m <= n_u < b^{m+1} and m >= 1, CBC-built over |u| coordinates.
ChangingDimAlgo cd_build(const CDAllocation& alloc, const WeightedSpaceSpec& spec, const CBCRuleSource::Options& opts);
double cd_apply(const ChangingDimAlgo& algo, const Integrand& f);
ValueBound cd_error_exact(const ChangingDimAlgo& algo, const WeightedSpaceSpec& spec);
double cd_cost(const ChangingDimAlgo& algo, const CostModel& model);
// cd_cost of cd_build(alloc) without building the rules.
double cd_planned_cost(const CDAllocation& alloc, std::uint32_t b, const CostModel& model);
// Smallest epsilon (to a relative 1e-3) whose planned cost fits the budget.
double cd_epsilon_for_budget(const WeightedSpaceSpec& spec, CDParams params, std::uint32_t b, const CostModel& model,
                             double budget);

// ---------------------------------------------------------------- costs

double cost_unrestricted(const Quadrature& q, const CostModel& model);

struct NestedCost {
    double value = 0.0;
    bool exact = true;
};
// Infimum over chains of the node costs; exact up to 12 distinct supports, otherwise the chain of
// cumulative unions in canonical order.
NestedCost cost_nested(const Quadrature& q, const CostModel& model);

// ---------------------------------------------------------------- exponents

enum class WeightClass { Pod, FiniteIntersection, FiniteAlgDim, General };

struct RatePrediction {
    double lower_nes = 0.0, lower_unr = 0.0;
    double upper_nes = 0.0, upper_unr = 0.0;  // infinite when no upper bound applies
    bool strongly_tractable = true;
    std::string case_tag;
};

// decay and t_star are keyed by the cut-off order sigma; the largest key stands for decay_gamma.
RatePrediction predict_exponents(WeightClass weight_class, const std::map<unsigned, double>& decay,
                                 const std::map<unsigned, double>& t_star, double alpha, double s);

// ---------------------------------------------------------------- integrands

// h(x) = int K_gamma(x, y) dy, with I(h) = ||I||^2.
Integrand representer_integrand(const WeightedSpaceSpec& spec);
// prod_{j in w} (x_j - c), integral (1/2 - c)^{|w|}
Integrand anchored_product_integrand(const CoordinateSet& w, double c);

// ---------------------------------------------------------------- manifests

// Plan parameters, level supports, point-set file names and allocation table.
std::string ml_manifest(const MLPlanned& planned, const MultilevelAlgo& algo,
                        const std::vector<std::string>& point_files);
std::string cd_manifest(const CDParams& params, const CDAllocation& alloc, const ChangingDimAlgo& algo);

}  // namespace infint
