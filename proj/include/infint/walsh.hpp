#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "infint/kernel.hpp"

namespace infint {

using Complex = std::complex<double>;

// sum of the min(alpha, nu) largest digit positions of k in base b; 0 for k = 0
unsigned mu_alpha(std::uint64_t k, unsigned alpha, std::uint32_t b);

// Digits xi_1, xi_2, ... of x in base b, rounded to the nearest multiple of b^{-count}.
std::vector<std::uint32_t> b_adic_digits(double x, std::uint32_t b, int count);

Complex wal_eval(std::uint64_t k, double x, std::uint32_t b);
Complex wal_eval_digits(std::uint64_t k, const std::vector<std::uint32_t>& xi, std::uint32_t b);

// Dense polynomial in (x - origin) with long double coefficients.
class RealPoly {
public:
    RealPoly() = default;
    explicit RealPoly(std::vector<long double> coeffs) : c_(std::move(coeffs)) {}

    const std::vector<long double>& coeffs() const noexcept { return c_; }
    long double operator()(long double s) const;
    // antiderivative vanishing at s = 0
    RealPoly antiderivative() const;
    // p(s + delta) as a polynomial in s
    RealPoly shifted(long double delta) const;
    RealPoly& operator+=(const RealPoly& o);
    RealPoly operator*(const RealPoly& o) const;
    RealPoly scaled(long double f) const;

private:
    std::vector<long double> c_;
};

// Piecewise polynomial on [0, 1]; piece i lives on [breaks[i], breaks[i+1]] as a polynomial in x - origin.
class PiecewisePoly {
public:
    PiecewisePoly();  // zero function
    PiecewisePoly(std::vector<double> breaks, std::vector<RealPoly> pieces, double origin);

    // K_{alpha,c}(., y) scaled by `coeff`.
    static PiecewisePoly kernel_section(const AnchoredKernel& kernel, double y, double coeff = 1.0);

    double origin() const noexcept { return origin_; }
    const std::vector<double>& breaks() const noexcept { return breaks_; }
    long double operator()(double x) const;
    long double integrate(double lo, double hi) const;
    PiecewisePoly& operator+=(const PiecewisePoly& o);

private:
    std::vector<double> breaks_;
    std::vector<RealPoly> pieces_;
    double origin_ = 0.0;
};

// Walsh coefficient of one index; integrates over the b^{a_1} intervals where wal_k is constant.
Complex walsh_coeff_exact(const PiecewisePoly& f, std::uint64_t k, std::uint32_t b);
// All coefficients k < b^resolution through a digitwise discrete Fourier transform of interval integrals.
std::vector<Complex> walsh_coeffs(const PiecewisePoly& f, std::uint32_t b, int resolution);

double const_c1(unsigned r, std::uint32_t b);
double const_c2(unsigned alpha, std::uint32_t b);
double const_c3(unsigned alpha, std::uint32_t b);
double const_c4(unsigned alpha, std::uint32_t b, std::size_t u_size);
double const_cbat(std::uint32_t b, unsigned alpha, double tau);

struct Atom {
    double x;
    double coeff;
};

struct AuditResult {
    double max_ratio = 0.0;
    std::uint64_t argmax = 0;
    double norm = 0.0;
    bool pass = true;
};

// One to four atoms with x uniform in (0, 1) and coefficients uniform in [-1, 1].
std::vector<Atom> random_atoms(std::uint64_t seed);

// max over 1 <= k <= k_max of |f^(k)| b^{mu_alpha(k)} / ||f||_H for f = sum coeff_i K(., x_i)
AuditResult embedding_audit(const AnchoredKernelParams& params, const std::vector<Atom>& atoms,
                            std::uint64_t k_max, std::uint32_t b = 2);

}  // namespace infint
