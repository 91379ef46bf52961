#pragma once

#include <array>
#include <utility>
#include <vector>

#include "infint/coordinate_set.hpp"
#include "infint/quadrature.hpp"
#include "infint/weights.hpp"

namespace infint {

struct AnchoredKernelParams {
    unsigned alpha = 1;  // smoothness
    double c = 0.0;      // anchor in [0, 1]

    void validate() const;
};

// K_{alpha,c} with its integrals; coefficient tables are built once per parameter set.
class AnchoredKernel {
public:
    explicit AnchoredKernel(AnchoredKernelParams params);

    const AnchoredKernelParams& params() const noexcept { return params_; }
    double eval(double x, double y) const;
    // int_0^1 K(x, y) dy
    double integral(double x) const;
    double c0() const noexcept { return c0_; }
    double m() const noexcept { return m_; }

    // sum_{i,i'} a_i a_i' K(t_i, t_i') in O(n log n)
    long double gram_sum(const std::vector<double>& t, const std::vector<double>& a) const;
    // (sum_i integral(t_i), sum_{i,i'} K(t_i, t_i')) for ascending t.
    std::pair<long double, long double> unit_sums(const std::vector<double>& t) const;

private:
    long double same_side(long double p, long double q) const;

    AnchoredKernelParams params_;
    unsigned n_;                    // alpha - 1
    std::vector<long double> inv_fact_sq_;  // 1/(r!)^2
    // K on one side as sum of coef_[a][b] p^a q^b, p <= q distances from the anchor
    std::vector<std::vector<long double>> coef_;
    struct Term {
        unsigned a, b;
        long double k;
    };
    std::vector<Term> terms_;  // nonzero entries of coef_
    std::vector<long double> int_lower_, int_upper_;  // integral() per side, ascending powers of the distance
    static constexpr unsigned kMaxDeg = 2 * 11 + 1;
    double c0_ = 0.0, m_ = 0.0;
};

double k1_eval(const AnchoredKernelParams& params, double x, double y);
double k1_int(const AnchoredKernelParams& params, double x);
// (C_0, M) = (double integral of K, integral of K(x, x))
std::pair<double, double> c0_m_constants(const AnchoredKernelParams& params);
// product of K over u; x_u and y_u are indexed like u
double tensor_kernel_eval(const AnchoredKernelParams& params, const CoordinateSet& u,
                          const std::vector<double>& x_u, const std::vector<double>& y_u);

// Squared worst-case error of the projection of q onto H_u.
double wce_projected_sq(const Quadrature& q, const CoordinateSet& u, const AnchoredKernel& kernel);
double wce_projected(const Quadrature& q, const CoordinateSet& u, const AnchoredKernelParams& params);

// sum over nonempty u in v of gamma_u e_u^2
double subset_error_sum(const Quadrature& q, const CoordinateSet& v, const WeightFamily& weights,
                        const AnchoredKernel& kernel);

// sum over nonempty u in v of gamma_u prod_{j in u} x_j; xs lists (j, x_j), zeros may be omitted
long double weighted_symmetric_sum(const WeightFamily& weights, const CoordinateSet& v,
                                   const std::vector<std::pair<std::uint32_t, long double>>& xs);

struct WeightedSpaceSpec {
    AnchoredKernelParams kernel;
    WeightFamily weights;
    TruncationParams trunc;
};

// value: sqrt of the squared error with truncated analytic sums; bound: width of the bracket on the
// squared error coming from those sums
ValueBound wce_total(const Quadrature& q, const WeightedSpaceSpec& spec);
// Squared-error bracket itself.
ValueBound wce_total_sq(const Quadrature& q, const WeightedSpaceSpec& spec);
double operator_norm(const WeightedSpaceSpec& spec);

}  // namespace infint
