#include "infint/walsh.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "infint/error.hpp"

namespace infint {

namespace {

std::vector<std::uint32_t> digits_of(std::uint64_t k, std::uint32_t b) {
    std::vector<std::uint32_t> d;
    for (; k; k /= b) d.push_back(static_cast<std::uint32_t>(k % b));
    return d;
}

Complex root_power(std::uint64_t e, std::uint32_t b) {
    e %= b;
    if (b == 2) return e ? Complex(-1.0, 0.0) : Complex(1.0, 0.0);
    const double phi = 2.0 * M_PI * static_cast<double>(e) / b;
    return {std::cos(phi), std::sin(phi)};
}

long double binom(unsigned n, unsigned k) {
    long double r = 1.0L;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

RealPoly power(const RealPoly& p, unsigned e) {
    RealPoly r({1.0L});
    for (unsigned i = 0; i < e; ++i) r = r * p;
    return r;
}

}  // namespace

unsigned mu_alpha(std::uint64_t k, unsigned alpha, std::uint32_t b) {
    if (k == 0) return 0;
    const auto d = digits_of(k, b);
    unsigned sum = 0, taken = 0;
    for (std::size_t i = d.size(); i-- > 0 && taken < alpha;) {
        if (d[i] == 0) continue;
        sum += static_cast<unsigned>(i + 1);
        ++taken;
    }
    return sum;
}

std::vector<std::uint32_t> b_adic_digits(double x, std::uint32_t b, int count) {
    if (!(x >= 0.0 && x < 1.0)) throw Error(ErrorKind::InvalidParameters, "digits need x in [0, 1)");
    const long double scale = std::pow(static_cast<long double>(b), count);
    if (scale > 9.0e15L) throw Error(ErrorKind::ResolutionOverflow, "digit count exceeds double resolution");
    auto n = static_cast<std::uint64_t>(std::llround(x * scale));
    if (static_cast<long double>(n) >= scale) n = static_cast<std::uint64_t>(scale) - 1;
    std::vector<std::uint32_t> xi(count);
    for (int i = count; i-- > 0; n /= b) xi[i] = static_cast<std::uint32_t>(n % b);
    return xi;
}

Complex wal_eval_digits(std::uint64_t k, const std::vector<std::uint32_t>& xi, std::uint32_t b) {
    std::uint64_t e = 0;
    std::size_t i = 0;
    for (; k; k /= b, ++i) {
        if (i >= xi.size()) throw Error(ErrorKind::InvalidParameters, "not enough digits of x for this index");
        e += (k % b) * xi[i];
    }
    return root_power(e, b);
}

Complex wal_eval(std::uint64_t k, double x, std::uint32_t b) {
    const int need = std::max<int>(1, static_cast<int>(digits_of(k, b).size()));
    // more digits than needed so rounding cannot move x across an interval boundary of wal_k
    const int prec = std::max(need, static_cast<int>(std::floor(30.0 * std::log(2.0) / std::log(double(b)))));
    return wal_eval_digits(k, b_adic_digits(x, b, prec), b);
}

// ---------------------------------------------------------------- polynomials

long double RealPoly::operator()(long double s) const {
    long double v = 0.0L;
    for (std::size_t i = c_.size(); i-- > 0;) v = v * s + c_[i];
    return v;
}

RealPoly RealPoly::antiderivative() const {
    std::vector<long double> c(c_.size() + 1, 0.0L);
    for (std::size_t i = 0; i < c_.size(); ++i) c[i + 1] = c_[i] / static_cast<long double>(i + 1);
    return RealPoly(std::move(c));
}

RealPoly RealPoly::shifted(long double delta) const {
    // Horner in polynomial arithmetic: p(s + delta)
    RealPoly r;
    const RealPoly lin({delta, 1.0L});
    for (std::size_t i = c_.size(); i-- > 0;) {
        r = r * lin;
        r += RealPoly({c_[i]});
    }
    return r;
}

RealPoly& RealPoly::operator+=(const RealPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0L);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

RealPoly RealPoly::operator*(const RealPoly& o) const {
    if (c_.empty() || o.c_.empty()) return RealPoly();
    std::vector<long double> c(c_.size() + o.c_.size() - 1, 0.0L);
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < o.c_.size(); ++j) c[i + j] += c_[i] * o.c_[j];
    return RealPoly(std::move(c));
}

RealPoly RealPoly::scaled(long double f) const {
    RealPoly r = *this;
    for (auto& v : r.c_) v *= f;
    return r;
}

PiecewisePoly::PiecewisePoly() : breaks_{0.0, 1.0}, pieces_(1) {}

PiecewisePoly::PiecewisePoly(std::vector<double> breaks, std::vector<RealPoly> pieces, double origin)
    : breaks_(std::move(breaks)), pieces_(std::move(pieces)), origin_(origin) {
    if (breaks_.size() != pieces_.size() + 1 || breaks_.front() != 0.0 || breaks_.back() != 1.0 ||
        !std::is_sorted(breaks_.begin(), breaks_.end()))
        throw Error(ErrorKind::InvalidParameters, "pieces must tile [0, 1]");
}

PiecewisePoly PiecewisePoly::kernel_section(const AnchoredKernel& kernel, double y, double coeff) {
    const double c = kernel.params().c;
    const unsigned n = kernel.params().alpha - 1;
    if (y == c || coeff == 0.0) return PiecewisePoly();
    long double inv_fact_n = 1.0L;
    for (unsigned i = 2; i <= n; ++i) inv_fact_n /= i;
    // K on one side of the anchor for distances P <= Q
    auto same_side = [&](const RealPoly& P, const RealPoly& Q) {
        RealPoly out;
        long double inv_fact = 1.0L;
        for (unsigned r = 1; r <= n; ++r) {
            inv_fact /= r;
            out += (power(P, r) * power(Q, r)).scaled(inv_fact * inv_fact);
        }
        RealPoly diff = Q;
        diff += P.scaled(-1.0L);
        for (unsigned k = 0; k <= n; ++k)
            out += (power(diff, n - k) * power(P, n + k + 1))
                       .scaled(binom(n, k) * inv_fact_n * inv_fact_n / (n + k + 1));
        return out.scaled(coeff);
    };
    const long double dy = std::fabs(static_cast<long double>(y) - c);
    const RealPoly dist_plus({0.0L, 1.0L}), dist_minus({0.0L, -1.0L}), fixed({dy});
    std::vector<double> br;
    std::vector<RealPoly> pieces;
    if (y > c) {
        br = {0.0, c, y, 1.0};
        pieces = {RealPoly(), same_side(dist_plus, fixed), same_side(fixed, dist_plus)};
    } else {
        br = {0.0, y, c, 1.0};
        pieces = {same_side(fixed, dist_minus), same_side(dist_minus, fixed), RealPoly()};
    }
    // drop empty pieces at the ends
    std::vector<double> b2{0.0};
    std::vector<RealPoly> p2;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        if (br[i + 1] <= br[i]) continue;
        b2.push_back(br[i + 1]);
        p2.push_back(pieces[i]);
    }
    return PiecewisePoly(std::move(b2), std::move(p2), c);
}

long double PiecewisePoly::operator()(double x) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    std::size_t i = it == breaks_.begin() ? 0 : static_cast<std::size_t>(it - breaks_.begin()) - 1;
    i = std::min(i, pieces_.size() - 1);
    return pieces_[i](static_cast<long double>(x) - origin_);
}

long double PiecewisePoly::integrate(double lo, double hi) const {
    long double s = 0.0L;
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), lo);
    std::size_t i = it == breaks_.begin() ? 0 : static_cast<std::size_t>(it - breaks_.begin()) - 1;
    for (; i < pieces_.size() && breaks_[i] < hi; ++i) {
        const double a = std::max(lo, breaks_[i]), b = std::min(hi, breaks_[i + 1]);
        if (b <= a) continue;
        const RealPoly F = pieces_[i].antiderivative();
        s += F(static_cast<long double>(b) - origin_) - F(static_cast<long double>(a) - origin_);
    }
    return s;
}

PiecewisePoly& PiecewisePoly::operator+=(const PiecewisePoly& o) {
    std::vector<double> br;
    std::merge(breaks_.begin(), breaks_.end(), o.breaks_.begin(), o.breaks_.end(), std::back_inserter(br));
    br.erase(std::unique(br.begin(), br.end()), br.end());
    std::vector<RealPoly> pieces;
    auto piece_at = [](const PiecewisePoly& f, double mid) {
        auto it = std::upper_bound(f.breaks_.begin(), f.breaks_.end(), mid);
        return static_cast<std::size_t>(it - f.breaks_.begin()) - 1;
    };
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const double mid = 0.5 * (br[i] + br[i + 1]);
        RealPoly p = pieces_[piece_at(*this, mid)];
        p += o.pieces_[piece_at(o, mid)].shifted(static_cast<long double>(origin_) - o.origin_);
        pieces.push_back(std::move(p));
    }
    breaks_ = std::move(br);
    pieces_ = std::move(pieces);
    return *this;
}

// ---------------------------------------------------------------- coefficients

Complex walsh_coeff_exact(const PiecewisePoly& f, std::uint64_t k, std::uint32_t b) {
    const auto kd = digits_of(k, b);
    const std::size_t a1 = kd.size();
    if (static_cast<double>(a1) * std::log2(double(b)) >= 64.0)
        throw Error(ErrorKind::ResolutionOverflow, "more than 2^64 constancy intervals");
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < a1; ++i) count *= b;
    const long double h = 1.0L / static_cast<long double>(count);
    std::complex<long double> acc = 0.0L;
    std::vector<std::uint32_t> xi(a1);
    for (std::uint64_t l = 0; l < count; ++l) {
        std::uint64_t r = l;
        for (std::size_t i = a1; i-- > 0; r /= b) xi[i] = static_cast<std::uint32_t>(r % b);
        const long double I = f.integrate(static_cast<double>(l * h), static_cast<double>((l + 1) * h));
        const Complex w = a1 ? std::conj(wal_eval_digits(k, xi, b)) : Complex(1.0, 0.0);
        acc += I * std::complex<long double>(w.real(), w.imag());
    }
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

std::vector<Complex> walsh_coeffs(const PiecewisePoly& f, std::uint32_t b, int resolution) {
    if (resolution < 0 || std::pow(double(b), resolution) > double(1 << 26))
        throw Error(ErrorKind::ResolutionOverflow, "batch transform limited to 2^26 intervals");
    std::size_t N = 1;
    for (int i = 0; i < resolution; ++i) N *= b;
    std::vector<std::complex<long double>> v(N);
    for (std::size_t l = 0; l < N; ++l)
        v[l] = f.integrate(static_cast<double>(l) / N, static_cast<double>(l + 1) / N);
    std::vector<std::complex<long double>> roots(b);
    for (std::uint32_t e = 0; e < b; ++e) {
        const Complex w = std::conj(root_power(e, b));
        roots[e] = {w.real(), w.imag()};
    }
    std::vector<std::complex<long double>> tmp(b);
    // transform digit axis t (stride b^{resolution-1-t}) against kappa_t
    for (int t = 0; t < resolution; ++t) {
        std::size_t stride = 1;
        for (int i = 0; i < resolution - 1 - t; ++i) stride *= b;
        for (std::size_t base = 0; base < N; ++base) {
            if ((base / stride) % b != 0) continue;
            for (std::uint32_t kap = 0; kap < b; ++kap) {
                std::complex<long double> s = 0.0L;
                for (std::uint32_t x = 0; x < b; ++x) s += v[base + x * stride] * roots[(kap * x) % b];
                tmp[kap] = s;
            }
            for (std::uint32_t kap = 0; kap < b; ++kap) v[base + kap * stride] = tmp[kap];
        }
    }
    std::vector<Complex> out(N);
    for (std::size_t k = 0; k < N; ++k) {
        std::size_t pos = 0, r = k, w = N / b;
        for (int t = 0; t < resolution; ++t, r /= b, w /= b) pos += (r % b) * w;
        out[k] = {static_cast<double>(v[pos].real()), static_cast<double>(v[pos].imag())};
    }
    return out;
}

// ---------------------------------------------------------------- constants

double const_c1(unsigned r, std::uint32_t b) {
    if (r < 1) throw Error(ErrorKind::InvalidParameters, "r must be >= 1");
    const double bb = b;
    return std::tgamma(r + 1.0) * std::pow(3.0 / (2.0 * std::sin(M_PI / bb)), r) *
           std::pow(1.0 + 1.0 / bb + 1.0 / (bb * (bb + 1.0)), r - 1.0);
}

double const_c2(unsigned alpha, std::uint32_t b) {
    double s = 0.0;
    for (unsigned r = 1; r < alpha; ++r) s += const_c1(r, b) * const_c1(r, b);
    return s;
}

double const_c3(unsigned alpha, std::uint32_t b) {
    if (alpha < 2) throw Error(ErrorKind::InvalidParameters, "embedding constants need alpha >= 2");
    return std::sqrt(double(alpha)) * const_c1(alpha, b);
}

double const_c4(unsigned alpha, std::uint32_t b, std::size_t u_size) {
    return std::pow(const_c3(alpha, b), static_cast<double>(u_size));
}

double const_cbat(std::uint32_t b, unsigned alpha, double tau) {
    if (!(tau >= 1.0 && tau < alpha)) throw Error(ErrorKind::InvalidTau, "tau must lie in [1, alpha)");
    const double bb = b, bt = std::pow(bb, 1.0 / tau);
    double ctilde;
    if (tau == 1.0) {
        ctilde = alpha - 1.0;
    } else {
        ctilde = (bb - 1.0) * (std::pow(bb - 1.0, alpha - 1.0) - std::pow(bt - 1.0, alpha - 1.0)) /
                 ((bb - bt) * std::pow(bt - 1.0, alpha - 1.0));
    }
    double prod = 1.0;
    for (unsigned j = 1; j < alpha; ++j) prod /= std::pow(bb, j / tau) - 1.0;
    const double tailf = std::pow(bb - 1.0, alpha) / (std::pow(bb, alpha / tau) - bb) * prod;
    return 1.0 + const_c3(alpha, b) * (ctilde + tailf);
}

std::vector<Atom> random_atoms(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> count(1, 4);
    std::uniform_real_distribution<double> pos(0.0, 1.0), coeff(-1.0, 1.0);
    std::vector<Atom> atoms(static_cast<std::size_t>(count(rng)));
    for (auto& a : atoms) {
        a.x = pos(rng);
        a.coeff = coeff(rng);
    }
    return atoms;
}

AuditResult embedding_audit(const AnchoredKernelParams& params, const std::vector<Atom>& atoms,
                            std::uint64_t k_max, std::uint32_t b) {
    if (params.alpha < 2) throw Error(ErrorKind::InvalidParameters, "audit needs alpha >= 2");
    const AnchoredKernel kernel(params);
    AuditResult res;
    long double norm2 = 0.0L;
    for (const auto& a : atoms)
        for (const auto& a2 : atoms) norm2 += static_cast<long double>(a.coeff) * a2.coeff * kernel.eval(a.x, a2.x);
    res.norm = std::sqrt(static_cast<double>(std::max(norm2, 0.0L)));
    if (k_max == 0 || res.norm == 0.0) return res;
    PiecewisePoly f;
    for (const auto& a : atoms) f += PiecewisePoly::kernel_section(kernel, a.x, a.coeff);
    int resolution = 0;
    for (std::uint64_t p = 1; p <= k_max; p *= b) ++resolution;
    const auto coeffs = walsh_coeffs(f, b, resolution);
    for (std::uint64_t k = 1; k <= k_max; ++k) {
        const double r = std::abs(coeffs[k]) * std::pow(double(b), mu_alpha(k, params.alpha, b)) / res.norm;
        if (r > res.max_ratio) {
            res.max_ratio = r;
            res.argmax = k;
        }
    }
    res.pass = res.max_ratio <= const_c3(params.alpha, b);
    return res;
}

}  // namespace infint
