#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace infint {

bool is_prime(std::uint32_t b);

// Element of the prime field F_b.
class FbElem {
public:
    FbElem(std::uint32_t value, std::uint32_t b);

    std::uint32_t value() const noexcept { return value_; }
    std::uint32_t modulus() const noexcept { return b_; }

    FbElem operator+(FbElem o) const;
    FbElem operator-(FbElem o) const;
    FbElem operator*(FbElem o) const;
    FbElem operator-() const;
    // Throws DivisionByZeroPoly for the zero element.
    FbElem inverse() const;
    FbElem operator/(FbElem o) const { return *this * o.inverse(); }
    bool operator==(const FbElem&) const = default;

private:
    std::uint32_t value_;
    std::uint32_t b_;
};

// Dense polynomial over F_b, coefficients in ascending degree, no trailing zeros.
class Poly {
public:
    explicit Poly(std::uint32_t b) : b_(b) {}
    Poly(std::uint32_t b, std::vector<std::uint32_t> coeffs);

    // Coefficients low-to-high read as a base-b integer.
    static Poly from_encoding(std::uint32_t b, std::uint64_t code);
    static Poly monomial(std::uint32_t b, int degree, std::uint32_t coeff = 1);

    std::uint32_t base() const noexcept { return b_; }
    // -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    std::uint32_t coeff(int i) const {
        return (i >= 0 && i < static_cast<int>(coeffs_.size())) ? coeffs_[i] : 0;
    }
    std::uint32_t leading() const { return coeffs_.empty() ? 0 : coeffs_.back(); }
    const std::vector<std::uint32_t>& coeffs() const noexcept { return coeffs_; }
    std::uint64_t encode() const;

    bool operator==(const Poly&) const = default;

private:
    void trim();

    std::uint32_t b_;
    std::vector<std::uint32_t> coeffs_;
};

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, std::uint32_t c);
// (quotient, remainder); throws DivisionByZeroPoly.
std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& d);
Poly poly_mod(const Poly& a, const Poly& d);

bool is_irreducible(const Poly& p);
Poly find_irreducible(std::uint32_t b, int degree);

struct LaurentDigits {
    std::uint32_t b = 2;
    std::vector<std::uint32_t> digits;  // t_1, ..., t_n

    double value() const;
};

// First n digits t_1..t_n of the expansion of g/p in powers of 1/x.
LaurentDigits laurent_digits(const Poly& g, const Poly& p, int n);

}  // namespace infint
