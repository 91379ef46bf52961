#include "infint/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "infint/error.hpp"

namespace infint {

namespace {

long double binom(unsigned n, unsigned k) {
    long double r = 1.0L;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

long double factorial(unsigned n) {
    long double r = 1.0L;
    for (unsigned i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace

void AnchoredKernelParams::validate() const {
    if (alpha < 1 || alpha > 12) throw Error(ErrorKind::InvalidParameters, "alpha must lie in [1, 12]");
    if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorKind::InvalidParameters, "anchor must lie in [0, 1]");
}

AnchoredKernel::AnchoredKernel(AnchoredKernelParams params) : params_(params), n_(params.alpha - 1) {
    params_.validate();
    const unsigned n = n_;
    inv_fact_sq_.resize(n + 2);
    for (unsigned r = 0; r <= n + 1; ++r) {
        const long double f = factorial(r);
        inv_fact_sq_[r] = 1.0L / (f * f);
    }
    coef_.assign(2 * n + 2, std::vector<long double>(n + 1, 0.0L));
    for (unsigned r = 1; r <= n; ++r) coef_[r][r] += inv_fact_sq_[r];
    // (q-p)^{n-k} p^{n+k+1} expanded in powers of q
    for (unsigned k = 0; k <= n; ++k)
        for (unsigned l = 0; l <= n - k; ++l) {
            const long double sign = ((n - k - l) % 2) ? -1.0L : 1.0L;
            coef_[2 * n + 1 - l][l] += sign * binom(n, k) * binom(n - k, l) * inv_fact_sq_[n] / (n + k + 1);
        }
    for (unsigned a = 0; a < coef_.size(); ++a)
        for (unsigned b = 0; b <= n; ++b)
            if (coef_[a][b] != 0.0L) terms_.push_back({a, b, coef_[a][b]});
    // integral over the side of length L as a polynomial in the distance d:
    // sum_r d^r L^{r+1} / ((r+1) (r!)^2) + sum_k C(n+1,k) (L-d)^{n+1-k} d^{n+k+1} / ((n+k+1) n! (n+1)!)
    const long double denom = factorial(n) * factorial(n + 1);
    for (int upper = 0; upper < 2; ++upper) {
        const long double L = upper ? 1.0L - params_.c : static_cast<long double>(params_.c);
        std::vector<long double> poly(2 * n + 3, 0.0L);
        for (unsigned r = 1; r <= n; ++r) poly[r] += std::pow(L, r + 1.0L) / (r + 1.0L) * inv_fact_sq_[r];
        for (unsigned k = 0; k <= n + 1; ++k) {
            const unsigned e = n + 1 - k;
            for (unsigned i = 0; i <= e; ++i) {
                const long double sign = (i % 2) ? -1.0L : 1.0L;
                poly[n + k + 1 + i] += binom(n + 1, k) * binom(e, i) * sign * std::pow(L, static_cast<long double>(e - i)) /
                                       ((n + k + 1) * denom);
            }
        }
        (upper ? int_upper_ : int_lower_) = std::move(poly);
    }
    long double c0 = 0.0L, m = 0.0L;
    const long double fn1 = factorial(n + 1);
    for (long double L : {static_cast<long double>(1.0 - params_.c), static_cast<long double>(params_.c)}) {
        for (unsigned r = 1; r <= n; ++r) {
            c0 += std::pow(L, 2.0L * r + 2) / ((r + 1.0L) * (r + 1.0L)) * inv_fact_sq_[r];
            m += std::pow(L, 2.0L * r + 1) / (2.0L * r + 1) * inv_fact_sq_[r];
        }
        c0 += std::pow(L, 2.0L * n + 3) / ((2.0L * n + 3) * fn1 * fn1);
        m += std::pow(L, 2.0L * n + 2) / ((2.0L * n + 1) * (2.0L * n + 2)) * inv_fact_sq_[n];
    }
    c0_ = static_cast<double>(c0);
    m_ = static_cast<double>(m);
}

long double AnchoredKernel::same_side(long double p, long double q) const {
    long double pp[kMaxDeg + 1], qq[kMaxDeg + 1];
    pp[0] = qq[0] = 1.0L;
    for (unsigned e = 1; e <= 2 * n_ + 1; ++e) pp[e] = pp[e - 1] * p;
    for (unsigned e = 1; e <= n_; ++e) qq[e] = qq[e - 1] * q;
    long double s = 0.0L;
    for (const auto& t : terms_) s += t.k * pp[t.a] * qq[t.b];
    return s;
}

double AnchoredKernel::eval(double x, double y) const {
    const double c = params_.c;
    long double dx, dy;
    if (x > c && y > c) {
        dx = static_cast<long double>(x) - c;
        dy = static_cast<long double>(y) - c;
    } else if (x < c && y < c) {
        dx = c - static_cast<long double>(x);
        dy = c - static_cast<long double>(y);
    } else {
        return 0.0;
    }
    return static_cast<double>(same_side(std::min(dx, dy), std::max(dx, dy)));
}

double AnchoredKernel::integral(double x) const {
    const double c = params_.c;
    if (x == c) return 0.0;
    const auto& poly = x > c ? int_upper_ : int_lower_;
    const long double d = x > c ? static_cast<long double>(x) - c : c - static_cast<long double>(x);
    long double s = 0.0L;
    for (std::size_t e = poly.size(); e-- > 0;) s = s * d + poly[e];
    return static_cast<double>(s);
}

long double AnchoredKernel::gram_sum(const std::vector<double>& t, const std::vector<double>& a) const {
    const double c = params_.c;
    const unsigned deg = 2 * n_ + 1;
    long double total = 0.0L;
    std::vector<std::pair<long double, long double>> side;  // (distance, coefficient)
    std::vector<long double> prefix(deg + 1), pw(deg + 1);
    for (int upper = 0; upper < 2; ++upper) {
        side.clear();
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (a[i] == 0.0) continue;
            if (upper && t[i] > c) side.emplace_back(static_cast<long double>(t[i]) - c, a[i]);
            if (!upper && t[i] < c) side.emplace_back(c - static_cast<long double>(t[i]), a[i]);
        }
        std::sort(side.begin(), side.end());
        std::fill(prefix.begin(), prefix.end(), 0.0L);
        for (const auto& [d, w] : side) {
            pw[0] = 1.0L;
            for (unsigned e = 1; e <= deg; ++e) pw[e] = pw[e - 1] * d;
            // pairs with an earlier (closer) point, then the diagonal term
            long double cross = 0.0L, diag = 0.0L;
            for (const auto& tm : terms_) {
                cross += tm.k * prefix[tm.a] * pw[tm.b];
                diag += tm.k * pw[tm.a] * pw[tm.b];
            }
            total += 2.0L * w * cross + w * w * diag;
            for (unsigned e = 0; e <= deg; ++e) prefix[e] += w * pw[e];
        }
    }
    return total;
}

std::pair<long double, long double> AnchoredKernel::unit_sums(const std::vector<double>& t) const {
    const double c = params_.c;
    const unsigned deg = 2 * n_ + 1;
    long double prefix[kMaxDeg + 2], pw[kMaxDeg + 2];
    long double lin = 0.0L, total = 0.0L;
    // prefix[e] ends as the power sum of the distances on one side, which also gives the integral terms
    auto side = [&](auto first, auto last, auto dist, const std::vector<long double>& ipoly) {
        std::fill(prefix, prefix + deg + 2, 0.0L);
        for (auto it = first; it != last; ++it) {
            const long double d = dist(*it);
            pw[0] = 1.0L;
            for (unsigned e = 1; e <= deg + 1; ++e) pw[e] = pw[e - 1] * d;
            long double cross = 0.0L;
            for (const auto& tm : terms_) cross += tm.k * prefix[tm.a] * pw[tm.b];
            total += 2.0L * cross;
            for (unsigned e = 0; e <= deg + 1; ++e) prefix[e] += pw[e];
        }
        // the diagonal and the integrals are linear in the power sums; ipoly has degree deg + 1
        for (const auto& tm : terms_) total += tm.k * prefix[tm.a + tm.b];
        for (unsigned e = 1; e < ipoly.size(); ++e) lin += ipoly[e] * prefix[e];
    };
    const auto split = std::lower_bound(t.begin(), t.end(), c);
    side(std::make_reverse_iterator(split), t.rend(), [c](double x) { return c - static_cast<long double>(x); },
         int_lower_);
    side(std::upper_bound(split, t.end(), c), t.end(), [c](double x) { return static_cast<long double>(x) - c; },
         int_upper_);
    return {lin, total};
}

double k1_eval(const AnchoredKernelParams& params, double x, double y) { return AnchoredKernel(params).eval(x, y); }

double k1_int(const AnchoredKernelParams& params, double x) { return AnchoredKernel(params).integral(x); }

std::pair<double, double> c0_m_constants(const AnchoredKernelParams& params) {
    AnchoredKernel k(params);
    return {k.c0(), k.m()};
}

double tensor_kernel_eval(const AnchoredKernelParams& params, const CoordinateSet& u, const std::vector<double>& x_u,
                          const std::vector<double>& y_u) {
    if (x_u.size() != u.size() || y_u.size() != u.size())
        throw Error(ErrorKind::InvalidParameters, "argument length differs from |u|");
    AnchoredKernel k(params);
    double prod = 1.0;
    for (std::size_t i = 0; i < u.size(); ++i) prod *= k.eval(x_u[i], y_u[i]);
    return prod;
}

namespace {

double clamp_sq(long double e2, long double scale) {
    if (e2 < -1e-8L * std::max(1.0L, scale))
        throw Error(ErrorKind::NumericalBreakdown, "quadratic form is negative beyond roundoff");
    return e2 < 0.0L ? 0.0 : static_cast<double>(e2);
}

// Nodes whose support contains all of u, with their coordinates on u.
struct Projection {
    std::vector<std::vector<double>> t;
    std::vector<double> a;
};

Projection project(const Quadrature& q, const CoordinateSet& u) {
    Projection p;
    for (const auto& node : q.nodes) {
        if (node.a == 0.0 || !u.subset_of(node.support)) continue;
        std::vector<double> t;
        t.reserve(u.size());
        for (auto j : u) t.push_back(node.t[static_cast<std::size_t>(node.support.index_of(j))]);
        p.t.push_back(std::move(t));
        p.a.push_back(node.a);
    }
    return p;
}

}  // namespace

double wce_projected_sq(const Quadrature& q, const CoordinateSet& u, const AnchoredKernel& kernel) {
    if (u.empty()) throw Error(ErrorKind::InvalidParameters, "projected error needs a nonempty set");
    const Projection p = project(q, u);
    const std::size_t n = p.a.size(), s = u.size();
    const long double init = std::pow(static_cast<long double>(kernel.c0()), static_cast<long double>(s));
    long double lin = 0.0L, quad = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        long double g = 1.0L;
        for (std::size_t k = 0; k < s; ++k) g *= kernel.integral(p.t[i][k]);
        lin += p.a[i] * g;
    }
    if (s == 1) {
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = p.t[i][0];
        quad = kernel.gram_sum(t, p.a);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            long double row = 0.0L;
            for (std::size_t i2 = 0; i2 < i; ++i2) {
                long double prod = p.a[i2];
                for (std::size_t k = 0; k < s && prod != 0.0L; ++k) prod *= kernel.eval(p.t[i][k], p.t[i2][k]);
                row += prod;
            }
            long double diag = p.a[i];
            for (std::size_t k = 0; k < s; ++k) diag *= kernel.eval(p.t[i][k], p.t[i][k]);
            quad += p.a[i] * (2.0L * row + diag);
        }
    }
    return clamp_sq(init - 2.0L * lin + quad, init);
}

double wce_projected(const Quadrature& q, const CoordinateSet& u, const AnchoredKernelParams& params) {
    return std::sqrt(wce_projected_sq(q, u, AnchoredKernel(params)));
}

namespace {

// Evaluates sum_{nonempty u in v} gamma_u prod_{j in u} x_j for dense x indexed by positions of v.
class SymmetricSum {
public:
    SymmetricSum(const WeightFamily& w, const CoordinateSet& v) : w_(w), v_(v) {
        if (w.kind() == WeightKind::Explicit) {
            for (const auto& [u, g] : w.entries()) {
                if (u.empty() || g == 0.0 || !u.subset_of(v)) continue;
                if (w.cutoff() && u.size() > *w.cutoff()) continue;
                std::vector<std::size_t> pos;
                for (auto j : u) pos.push_back(static_cast<std::size_t>(v.index_of(j)));
                sets_.emplace_back(std::move(pos), g);
            }
            return;
        }
        product_ = w.order().is_constant() && !w.cutoff();
        for (auto j : v) gamma_.push_back(w.univariate()(j));
        kmax_ = std::min<std::size_t>(v.size(), w.max_cardinality());
        for (std::size_t k = 0; k <= kmax_; ++k) Gamma_.push_back(w.order_factor(static_cast<unsigned>(k)));
        e_.resize(kmax_ + 1);
    }

    long double operator()(const long double* x) const {
        if (w_.kind() == WeightKind::Explicit) {
            long double s = 0.0L;
            for (const auto& [pos, g] : sets_) {
                long double prod = g;
                for (auto p : pos) prod *= x[p];
                s += prod;
            }
            return s;
        }
        if (product_) {
            long double logp = 0.0L;
            for (std::size_t i = 0; i < gamma_.size(); ++i)
                if (x[i] != 0.0L) logp += std::log1p(gamma_[i] * x[i]);
            return std::expm1(logp);
        }
        std::fill(e_.begin(), e_.end(), 0.0L);
        e_[0] = 1.0L;
        std::size_t used = 0;
        for (std::size_t i = 0; i < gamma_.size(); ++i) {
            if (x[i] == 0.0L) continue;
            const long double y = gamma_[i] * x[i];
            used = std::min(used + 1, kmax_);
            for (std::size_t k = used; k >= 1; --k) e_[k] += y * e_[k - 1];
        }
        long double s = 0.0L;
        for (std::size_t k = 1; k <= used; ++k) s += Gamma_[k] * e_[k];
        return s;
    }

private:
    const WeightFamily& w_;
    CoordinateSet v_;
    std::vector<std::pair<std::vector<std::size_t>, double>> sets_;
    bool product_ = false;
    std::vector<long double> gamma_, Gamma_;
    std::size_t kmax_ = 0;
    mutable std::vector<long double> e_;
};

struct DenseNodes {
    std::vector<long double> g;  // n x |v| kernel integrals, zero off-support
    std::vector<double> t;       // n x |v| coordinates, NaN off-support
    std::vector<double> a;
};

DenseNodes densify(const Quadrature& q, const CoordinateSet& v, const AnchoredKernel& kernel) {
    DenseNodes d;
    const std::size_t s = v.size();
    for (const auto& node : q.nodes) {
        if (node.a == 0.0) continue;
        std::vector<long double> g(s, 0.0L);
        std::vector<double> t(s, std::numeric_limits<double>::quiet_NaN());
        bool any = false;
        for (std::size_t k = 0; k < node.support.size(); ++k) {
            const auto pos = v.index_of(node.support[k]);
            if (pos < 0) continue;
            t[pos] = node.t[k];
            g[pos] = kernel.integral(node.t[k]);
            any = true;
        }
        if (!any) continue;  // projections onto v vanish identically
        d.g.insert(d.g.end(), g.begin(), g.end());
        d.t.insert(d.t.end(), t.begin(), t.end());
        d.a.push_back(node.a);
    }
    return d;
}

// -2 sum a_i W(g_i) + sum_{i,i'} a_i a_i' W(K_ii') over nonempty u in v.
long double node_terms(const Quadrature& q, const CoordinateSet& v, const WeightFamily& w,
                       const AnchoredKernel& kernel) {
    if (v.empty()) return 0.0L;
    if (v.size() == 1 && !(w.cutoff() && *w.cutoff() < 1)) {
        const double gamma = weight_of(w, v);
        if (gamma == 0.0) return 0.0L;
        const Projection p = project(q, v);
        std::vector<double> t(p.a.size());
        long double lin = 0.0L;
        for (std::size_t i = 0; i < p.a.size(); ++i) {
            t[i] = p.t[i][0];
            lin += p.a[i] * static_cast<long double>(kernel.integral(t[i]));
        }
        return gamma * (kernel.gram_sum(t, p.a) - 2.0L * lin);
    }
    const SymmetricSum W(w, v);
    const DenseNodes d = densify(q, v, kernel);
    const std::size_t n = d.a.size(), s = v.size();
    std::vector<long double> x(s);
    long double lin = 0.0L, quad = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        lin += d.a[i] * W(&d.g[i * s]);
        long double row = 0.0L;
        for (std::size_t i2 = 0; i2 <= i; ++i2) {
            bool any = false;
            for (std::size_t k = 0; k < s; ++k) {
                const double ti = d.t[i * s + k], tj = d.t[i2 * s + k];
                x[k] = (std::isnan(ti) || std::isnan(tj)) ? 0.0L : kernel.eval(ti, tj);
                any = any || x[k] != 0.0L;
            }
            if (!any) continue;
            row += (i2 == i ? 1.0L : 2.0L) * d.a[i2] * W(x.data());
        }
        quad += d.a[i] * row;
    }
    return quad - 2.0L * lin;
}

long double initial_term(const CoordinateSet& v, const WeightFamily& w, const AnchoredKernel& kernel) {
    if (v.empty()) return 0.0L;
    const SymmetricSum W(w, v);
    std::vector<long double> x(v.size(), kernel.c0());
    return W(x.data());
}

}  // namespace

long double weighted_symmetric_sum(const WeightFamily& weights, const CoordinateSet& v,
                                   const std::vector<std::pair<std::uint32_t, long double>>& xs) {
    std::vector<long double> x(v.size(), 0.0L);
    for (const auto& [j, val] : xs) {
        const auto pos = v.index_of(j);
        if (pos < 0) throw Error(ErrorKind::InvalidParameters, "coordinate outside the set");
        x[pos] = val;
    }
    return SymmetricSum(weights, v)(x.data());
}

double subset_error_sum(const Quadrature& q, const CoordinateSet& v, const WeightFamily& weights,
                        const AnchoredKernel& kernel) {
    const long double init = initial_term(v, weights, kernel);
    return clamp_sq(init + node_terms(q, v, weights, kernel), init);
}

ValueBound wce_total_sq(const Quadrature& q, const WeightedSpaceSpec& spec) {
    const AnchoredKernel kernel(spec.kernel);
    const ValueBound total = power_sum(spec.weights, 1.0, kernel.c0(), spec.trunc);
    const CoordinateSet V = q.support_union();
    const long double empty_err = 1.0L - static_cast<long double>(q.coefficient_sum());
    const long double e2 = spec.weights.empty_weight() * empty_err * empty_err + total.value +
                           node_terms(q, V, spec.weights, kernel);
    return {clamp_sq(e2, total.value + 1.0L), total.bound};
}

ValueBound wce_total(const Quadrature& q, const WeightedSpaceSpec& spec) {
    const ValueBound sq = wce_total_sq(q, spec);
    return {std::sqrt(sq.value), sq.bound};
}

double operator_norm(const WeightedSpaceSpec& spec) {
    const AnchoredKernel kernel(spec.kernel);
    const ValueBound total = power_sum(spec.weights, 1.0, kernel.c0(), spec.trunc);
    return std::sqrt(spec.weights.empty_weight() + total.value);
}

}  // namespace infint
