#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "infint/coordinate_set.hpp"
#include "infint/polyfield.hpp"
#include "infint/quadrature.hpp"

namespace infint {

struct PolyLatticeSpec {
    std::uint32_t b = 2;
    int m = 1;
    int n = 1;
    Poly p{2};
    std::vector<Poly> q;

    std::size_t dim() const noexcept { return q.size(); }
    std::size_t count() const;
    void validate() const;
};

// Modulus find_irreducible(b, alpha*m), precision n = alpha*m.
PolyLatticeSpec higher_order_spec(std::uint32_t b, int m, int alpha, std::vector<Poly> q);

struct DigitalShift {
    std::uint32_t b = 2;
    int prec = 0;
    std::vector<std::vector<std::uint8_t>> digits;  // one digit row per coordinate

    std::size_t dim() const noexcept { return digits.size(); }
    static DigitalShift zero(std::uint32_t b, std::size_t s, int prec);
    static DigitalShift random(std::uint32_t b, std::size_t s, int prec, std::mt19937_64& rng);
};

// Points stored digit-exact: count x dim x prec digits, plus their values.
class PointSet {
public:
    PointSet(std::uint32_t b, int prec, std::size_t count, std::size_t dim);

    std::uint32_t base() const noexcept { return b_; }
    int prec() const noexcept { return prec_; }
    std::size_t count() const noexcept { return count_; }
    std::size_t dim() const noexcept { return dim_; }

    double value(std::size_t i, std::size_t j) const { return values_[i * dim_ + j]; }
    const std::uint8_t* digits(std::size_t i, std::size_t j) const {
        return &digits_[(i * dim_ + j) * static_cast<std::size_t>(prec_)];
    }
    std::uint8_t* digits(std::size_t i, std::size_t j) {
        return &digits_[(i * dim_ + j) * static_cast<std::size_t>(prec_)];
    }
    // Recompute values from digits.
    void refresh_values();

private:
    std::uint32_t b_;
    int prec_;
    std::size_t count_, dim_;
    std::vector<std::uint8_t> digits_;
    std::vector<double> values_;
};

// Digit rows of nu_n(x^r q / p) for r = 0..m-1; point h is the digitwise combination sum h_r B_r.
std::vector<std::vector<std::uint8_t>> lattice_basis(const PolyLatticeSpec& spec, const Poly& q);

// Points in ascending h.
PointSet generate_points(const PolyLatticeSpec& spec);

// Digitwise sum mod b; output precision is max(ps.prec, shift.prec).
PointSet apply_shift(const PointSet& ps, const DigitalShift& shift);

enum class AnchorPolicy { Perturb, Strict };

// Replacement for a coordinate that hits the anchor: c + b^{-(n+2)}, or c - b^{-(n+2)} at c = 1.
double anchor_perturbation(double c, std::uint32_t b, int n);

// Equal weights b^{-m} on the lattice points placed on `support`, zero-weight padding up to n_target.
Quadrature equal_weight_quadrature(const PointSet& ps, std::size_t n_target, const CoordinateSet& support,
                                   double anchor, AnchorPolicy policy = AnchorPolicy::Perturb,
                                   int precision_n = -1);

// Header "b m n p_encoded s", one q encoding per line, then the points if given.
std::string format_point_set(const PolyLatticeSpec& spec, const PointSet* points = nullptr);
// Reads the header and generating polynomials; coordinate lines are ignored.
PolyLatticeSpec parse_point_set(const std::string& text);

}  // namespace infint
