#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "infint/coordinate_set.hpp"

namespace infint {

constexpr unsigned kUnbounded = std::numeric_limits<unsigned>::max();

// Nonincreasing univariate sequence gamma_1 >= gamma_2 >= ... >= 0.
class UnivariateRule {
public:
    // gamma_j = scale * j^{-exponent}
    static UnivariateRule power_law(double scale, double exponent);
    // gamma_1..gamma_J as given, zero beyond
    static UnivariateRule finite(std::vector<double> values);

    double operator()(std::uint32_t j) const;
    // Largest j with gamma_j > 0, or UINT32_MAX for infinite support.
    std::uint32_t support_size() const;
    // Bracket [lo, hi] for sum_{j>J} (scale_factor * gamma_j)^r; hi is infinite if the series diverges.
    std::pair<double, double> tail_power_sum(std::uint32_t J, double r, double scale_factor = 1.0) const;

    bool is_power_law() const noexcept { return values_.empty(); }
    double scale() const noexcept { return scale_; }
    double exponent() const noexcept { return exponent_; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    double scale_ = 1.0;
    double exponent_ = 0.0;
    std::vector<double> values_;
};

// Order-dependent factors Gamma_k with Gamma_0 = 1.
class OrderRule {
public:
    static OrderRule constant();                          // Gamma_k = 1
    static OrderRule up_to(unsigned omega);               // 1 for k <= omega, else 0
    static OrderRule factorial_power(double q);           // (k!)^q
    static OrderRule pod_example(double p_star, double q_star);
    static OrderRule finite(std::vector<double> values);  // Gamma_0.., zero beyond

    double log_value(unsigned k) const;  // -inf where Gamma_k = 0
    double operator()(unsigned k) const;
    // Largest k with Gamma_k > 0 (kUnbounded if none).
    unsigned max_order() const;
    bool is_constant() const noexcept { return kind_ == Kind::Constant; }

private:
    enum class Kind { Constant, UpTo, FactorialPower, PodExample, Finite };
    Kind kind_ = Kind::Constant;
    double a_ = 0.0, b_ = 0.0;
    unsigned omega_ = kUnbounded;
    std::vector<double> values_;
};

enum class WeightKind { Product, FiniteProduct, Pod, Explicit };

class WeightFamily {
public:
    static WeightFamily product(UnivariateRule gamma);
    static WeightFamily finite_product(UnivariateRule gamma, unsigned omega);
    static WeightFamily pod(OrderRule Gamma, UnivariateRule gamma);
    static WeightFamily explicit_map(std::map<CoordinateSet, double> entries);

    WeightKind kind() const noexcept { return kind_; }
    std::optional<unsigned> cutoff() const noexcept { return cutoff_; }
    const UnivariateRule& univariate() const noexcept { return gamma_; }
    const OrderRule& order() const noexcept { return Gamma_; }
    const std::map<CoordinateSet, double>& entries() const noexcept { return entries_; }

    // Largest cardinality that can carry positive weight after cut-off and order limits.
    unsigned max_cardinality() const;
    // Gamma_k after the cut-off (product structure kinds only).
    double order_factor(unsigned k) const;
    double log_order_factor(unsigned k) const;
    double empty_weight() const;

    friend WeightFamily cutoff(const WeightFamily& family, unsigned sigma);

private:
    WeightKind kind_ = WeightKind::Product;
    UnivariateRule gamma_;
    OrderRule Gamma_;
    std::map<CoordinateSet, double> entries_;
    std::optional<unsigned> cutoff_;
};

double weight_of(const WeightFamily& family, const CoordinateSet& u);
WeightFamily cutoff(const WeightFamily& family, unsigned sigma);

struct EnumerationBounds {
    std::uint32_t j_max = 1u << 16;
    unsigned s_max = 48;
};

struct OrderedEntry {
    CoordinateSet u;
    double gamma_hat = 0.0;
};

struct OrderedWeights {
    WeightFamily family;  // already cut off at sigma
    std::optional<unsigned> sigma;
    double c0 = 1.0;
    EnumerationBounds bounds;
    std::vector<OrderedEntry> entries;
};

OrderedWeights enumerate_ordered(const WeightFamily& family, std::optional<unsigned> sigma, double c0,
                                 std::size_t k, EnumerationBounds bounds = {});

// All nonempty u with gamma_u * c0^{|u|} > threshold, in ordered-weights order.
std::vector<OrderedEntry> enumerate_above(const WeightFamily& family, double c0, double threshold,
                                          EnumerationBounds bounds = {});

struct TruncationParams {
    std::uint32_t j_sum = 1u << 16;  // terms summed explicitly before the analytic tail
    unsigned k_max = 400;            // cardinalities summed explicitly for unbounded orders
};

struct ValueBound {
    double value = 0.0;
    double bound = 0.0;  // true value lies in [value, value + bound]
};

// sum over nonempty u of (gamma_u c0^{|u|})^r
ValueBound power_sum(const WeightFamily& family, double r, double c0, TruncationParams trunc = {});
ValueBound big_L(const WeightFamily& family, double r, TruncationParams trunc = {});
// sum_{j>d} gamma_hat_{u_j}
ValueBound tail(const OrderedWeights& ordered, std::size_t d, TruncationParams trunc = {});

struct DecayEstimate {
    double value = 0.0;
    bool degenerate = false;
};
// Window bounds are 1-based positions in the ordered sequence.
DecayEstimate decay_estimate(const OrderedWeights& ordered, std::size_t j_lo, std::size_t j_hi);
// Count of active sets with |u| <= sigma inside [L], regressed on L in log-log scale.
double t_star_estimate(const OrderedWeights& ordered, unsigned sigma, const std::vector<std::uint32_t>& L_list);
double active_count_in_box(const WeightFamily& family, unsigned sigma, std::uint32_t L);

double pod_anchored_sum(const WeightFamily& family, unsigned d, double inv_tau, double boost);

// sum_{j>=N} j^{-s} with an error bracket, s > 1
std::pair<double, double> zeta_tail(double s, double N);
double riemann_zeta(double s, unsigned terms = 64);
double hurwitz_multi(double r, unsigned k, unsigned terms = 64);

WeightFamily pod_example_weights(double p_star, double q_star);
WeightFamily clique_weights(unsigned d, std::uint32_t coord_max);
// {2i-1, 2i} with weight i^{-exponent}, i = 1..count
WeightFamily disjoint_pairs_weights(std::uint32_t count, double exponent);

// "j1 j2 ... jk : gamma" per line, '#' comments
WeightFamily parse_explicit_weights(const std::string& text);
std::string format_explicit_weights(const WeightFamily& family);

}  // namespace infint
