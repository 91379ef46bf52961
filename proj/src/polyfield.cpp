#include "infint/polyfield.hpp"

#include <algorithm>
#include <limits>

#include "infint/error.hpp"

namespace infint {

bool is_prime(std::uint32_t b) {
    if (b < 2) return false;
    for (std::uint32_t d = 2; d * d <= b; ++d)
        if (b % d == 0) return false;
    return true;
}

namespace {

void check_base(std::uint32_t b) {
    if (!is_prime(b)) throw Error(ErrorKind::InvalidParameters, "base must be prime");
}

void check_same_base(const Poly& a, const Poly& b) {
    if (a.base() != b.base()) throw Error(ErrorKind::InvalidParameters, "polynomials over different fields");
}

std::uint32_t inv_mod(std::uint32_t a, std::uint32_t b) {
    // a^(b-2) mod b
    std::uint64_t result = 1, base = a % b;
    for (std::uint32_t e = b - 2; e; e >>= 1) {
        if (e & 1u) result = result * base % b;
        base = base * base % b;
    }
    return static_cast<std::uint32_t>(result);
}

}  // namespace

FbElem::FbElem(std::uint32_t value, std::uint32_t b) : value_(value % b), b_(b) { check_base(b); }

FbElem FbElem::operator+(FbElem o) const { return {(value_ + o.value_) % b_, b_}; }
FbElem FbElem::operator-(FbElem o) const { return {(value_ + b_ - o.value_) % b_, b_}; }
FbElem FbElem::operator*(FbElem o) const {
    return {static_cast<std::uint32_t>(std::uint64_t(value_) * o.value_ % b_), b_};
}
FbElem FbElem::operator-() const { return {(b_ - value_) % b_, b_}; }

FbElem FbElem::inverse() const {
    if (value_ == 0) throw Error(ErrorKind::DivisionByZeroPoly, "inverse of zero in F_b");
    return {inv_mod(value_, b_), b_};
}

Poly::Poly(std::uint32_t b, std::vector<std::uint32_t> coeffs) : b_(b), coeffs_(std::move(coeffs)) {
    for (auto& c : coeffs_) c %= b_;
    trim();
}

void Poly::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Poly Poly::from_encoding(std::uint32_t b, std::uint64_t code) {
    std::vector<std::uint32_t> c;
    while (code) {
        c.push_back(static_cast<std::uint32_t>(code % b));
        code /= b;
    }
    return Poly(b, std::move(c));
}

Poly Poly::monomial(std::uint32_t b, int degree, std::uint32_t coeff) {
    std::vector<std::uint32_t> c(static_cast<std::size_t>(degree) + 1, 0);
    c.back() = coeff;
    return Poly(b, std::move(c));
}

std::uint64_t Poly::encode() const {
    std::uint64_t code = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        if (code > (std::numeric_limits<std::uint64_t>::max() - *it) / b_)
            throw Error(ErrorKind::TooLarge, "polynomial encoding exceeds 64 bits");
        code = code * b_ + *it;
    }
    return code;
}

Poly poly_add(const Poly& a, const Poly& b) {
    check_same_base(a, b);
    std::vector<std::uint32_t> c(std::max(a.coeffs().size(), b.coeffs().size()), 0);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = (a.coeff(int(i)) + b.coeff(int(i))) % a.base();
    return Poly(a.base(), std::move(c));
}

Poly poly_sub(const Poly& a, const Poly& b) {
    check_same_base(a, b);
    std::vector<std::uint32_t> c(std::max(a.coeffs().size(), b.coeffs().size()), 0);
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = (a.coeff(int(i)) + a.base() - b.coeff(int(i))) % a.base();
    return Poly(a.base(), std::move(c));
}

Poly poly_scale(const Poly& a, std::uint32_t s) {
    std::vector<std::uint32_t> c(a.coeffs());
    for (auto& x : c) x = static_cast<std::uint32_t>(std::uint64_t(x) * s % a.base());
    return Poly(a.base(), std::move(c));
}

Poly poly_mul(const Poly& a, const Poly& b) {
    check_same_base(a, b);
    if (a.is_zero() || b.is_zero()) return Poly(a.base());
    const std::uint32_t q = a.base();
    std::vector<std::uint64_t> acc(a.coeffs().size() + b.coeffs().size() - 1, 0);
    for (std::size_t i = 0; i < a.coeffs().size(); ++i)
        for (std::size_t j = 0; j < b.coeffs().size(); ++j)
            acc[i + j] = (acc[i + j] + std::uint64_t(a.coeffs()[i]) * b.coeffs()[j]) % q;
    return Poly(q, std::vector<std::uint32_t>(acc.begin(), acc.end()));
}

std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& d) {
    check_same_base(a, d);
    if (d.is_zero()) throw Error(ErrorKind::DivisionByZeroPoly, "division by the zero polynomial");
    const std::uint32_t q = a.base();
    const int dd = d.degree();
    if (a.degree() < dd) return {Poly(q), a};
    std::vector<std::uint32_t> r(a.coeffs());
    std::vector<std::uint32_t> quot(static_cast<std::size_t>(a.degree() - dd) + 1, 0);
    const std::uint64_t lead_inv = inv_mod(d.leading(), q);
    for (int k = a.degree() - dd; k >= 0; --k) {
        const std::uint32_t t = static_cast<std::uint32_t>(r[k + dd] * lead_inv % q);
        quot[k] = t;
        if (!t) continue;
        for (int i = 0; i <= dd; ++i)
            r[k + i] = static_cast<std::uint32_t>((r[k + i] + std::uint64_t(q - t) * d.coeffs()[i]) % q);
    }
    r.resize(static_cast<std::size_t>(dd));
    return {Poly(q, std::move(quot)), Poly(q, std::move(r))};
}

Poly poly_mod(const Poly& a, const Poly& d) { return poly_divmod(a, d).second; }

bool is_irreducible(const Poly& p) {
    if (p.degree() < 1) throw Error(ErrorKind::InvalidParameters, "irreducibility needs degree >= 1");
    const std::uint32_t b = p.base();
    for (int d = 1; 2 * d <= p.degree(); ++d) {
        // monic candidates of degree d: encodings b^d .. 2 b^d - 1
        std::uint64_t lo = 1;
        for (int i = 0; i < d; ++i) lo *= b;
        for (std::uint64_t code = lo; code < 2 * lo; ++code)
            if (poly_mod(p, Poly::from_encoding(b, code)).is_zero()) return false;
    }
    return true;
}

Poly find_irreducible(std::uint32_t b, int degree) {
    check_base(b);
    if (degree < 1) throw Error(ErrorKind::InvalidParameters, "degree must be >= 1");
    std::uint64_t lo = 1;
    for (int i = 0; i < degree; ++i) {
        if (lo > std::numeric_limits<std::uint64_t>::max() / (2 * b))
            throw Error(ErrorKind::TooLarge, "degree too large for 64-bit encodings");
        lo *= b;
    }
    for (std::uint64_t code = lo; code < 2 * lo; ++code) {
        Poly p = Poly::from_encoding(b, code);
        if (p.coeff(0) == 0 && degree > 1) continue;  // divisible by x
        if (is_irreducible(p)) return p;
    }
    throw Error(ErrorKind::InvalidParameters, "no irreducible polynomial found");
}

double LaurentDigits::value() const {
    double v = 0.0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) v = (v + *it) / b;
    return v;
}

LaurentDigits laurent_digits(const Poly& g, const Poly& p, int n) {
    check_same_base(g, p);
    if (p.is_zero()) throw Error(ErrorKind::DivisionByZeroPoly, "Laurent expansion over zero");
    const std::uint32_t b = p.base();
    const int dp = p.degree();
    LaurentDigits out;
    out.b = b;
    out.digits.assign(static_cast<std::size_t>(std::max(n, 0)), 0);

    Poly g_red = poly_mod(g, p);
    std::vector<std::uint32_t> r(static_cast<std::size_t>(dp) + 1, 0);
    for (int i = 0; i < dp; ++i) r[i] = g_red.coeff(i);
    const std::uint64_t lead_inv = inv_mod(p.leading(), b);
    for (int l = 0; l < n; ++l) {
        // r <- r * x, then peel off the x^{dp} term
        for (int i = dp; i > 0; --i) r[i] = r[i - 1];
        r[0] = 0;
        const std::uint32_t t = static_cast<std::uint32_t>(r[dp] * lead_inv % b);
        out.digits[l] = t;
        if (t)
            for (int i = 0; i <= dp; ++i)
                r[i] = static_cast<std::uint32_t>((r[i] + std::uint64_t(b - t) * p.coeffs()[i]) % b);
    }
    return out;
}

}  // namespace infint
