#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "infint/kernel.hpp"
#include "infint/pointsets.hpp"
#include "infint/weights.hpp"

namespace infint {

struct CBCConfig {
    std::uint32_t b = 2;
    int m = 1;
    unsigned alpha = 1;
    std::size_t s = 1;
    WeightFamily weights = WeightFamily::product(UnivariateRule::power_law(1.0, 0.0));
    AnchoredKernelParams kernel{1, 0.0};
    std::size_t shift_trials = 0;
    std::uint64_t seed = 0;
    std::vector<double> tau_report;
    // Candidates evaluated per component before the construction gives up.
    std::uint64_t candidate_cap = std::uint64_t{1} << 20;
    // When nonzero and the candidate count exceeds the cap, evaluate this many seeded random candidates instead.
    std::uint64_t sample_size = 0;
    // When nonzero, components after the first evaluate at most max(8, pairwise_work / N^2) candidates,
    // sampled as above.
    std::uint64_t pairwise_work = 0;

    void validate() const;
};

struct ComponentLog {
    std::size_t component = 0;
    std::uint64_t candidate_count = 0;
    std::uint64_t best_encoding = 0;
    double criterion = 0.0;
};

struct CBCResult {
    PolyLatticeSpec spec;
    std::optional<DigitalShift> shift;
    std::vector<double> per_component_criterion;
    std::vector<ComponentLog> log;
    std::map<double, double> bound_values;  // tau -> theory_bound
    // tau -> whether every singleton projection meets b^{-tau m} C_{b,alpha,1/tau}^tau
    std::map<double, bool> singleton_bound_holds;
    double final_criterion = 0.0;  // weighted squared error over subsets of [s], shift applied
};

// Lattice rule with equal weights on [s], anchor collisions perturbed.
Quadrature lattice_quadrature(const PolyLatticeSpec& spec, const std::optional<DigitalShift>& shift, double anchor);

// Weights restricted to subsets of [s].
WeightFamily restrict_to_prefix(const WeightFamily& weights, std::size_t s);

// sum over u with max(u) = d of gamma_u e_u^2 for the rule with generating polynomials prefix + candidate.
double criterion(const std::vector<Poly>& prefix, const Poly& candidate, const CBCConfig& config);

CBCResult cbc_construct(const CBCConfig& config);

// Component-by-component search that can be resumed with more components; config.s is ignored.
// Plain product weights keep running products per point pair, so each component costs O(N^2)
// kernel evaluations per candidate whatever its index.
class CBCBuilder {
public:
    explicit CBCBuilder(CBCConfig config);

    void extend(std::size_t s);
    const PolyLatticeSpec& spec() const noexcept { return spec_; }
    const std::vector<double>& per_component_criterion() const noexcept { return criterion_; }
    const std::vector<ComponentLog>& log() const noexcept { return log_; }
    // Unshifted coordinates of component j (0-based), anchor collisions perturbed.
    const std::vector<double>& column(std::size_t j) const { return cols_.at(j); }

private:
    void absorb(const std::vector<double>& col, long double gamma);

    CBCConfig config_;
    AnchoredKernel kernel_;
    PolyLatticeSpec spec_;
    std::vector<std::vector<double>> cols_;
    std::vector<double> criterion_;
    std::vector<ComponentLog> log_;
    bool product_ = false;
    long double prod_c_ = 1.0L;
    std::vector<long double> prod_g_;
    std::vector<double> prod_k_;  // upper triangle, row major
};

// Sum over nonempty u in [s] of gamma_u e_u^2 under the shift.
double weighted_criterion(const PolyLatticeSpec& spec, const std::optional<DigitalShift>& shift,
                          const CBCConfig& config);
DigitalShift shift_search(const CBCConfig& config, const PolyLatticeSpec& spec);

double theory_bound(const CBCConfig& config, double tau);

// "component,candidate_count,best_encoding,criterion"
std::string format_criterion_log(const CBCResult& result);

}  // namespace infint
