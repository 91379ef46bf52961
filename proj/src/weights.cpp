#include "infint/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>

#include "infint/error.hpp"

namespace infint {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

}  // namespace

// ---------------------------------------------------------------- univariate

UnivariateRule UnivariateRule::power_law(double scale, double exponent) {
    if (!(scale > 0.0) || !(exponent >= 0.0))
        throw Error(ErrorKind::InvalidParameters, "power law needs scale > 0 and exponent >= 0");
    UnivariateRule r;
    r.scale_ = scale;
    r.exponent_ = exponent;
    return r;
}

UnivariateRule UnivariateRule::finite(std::vector<double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0)) throw Error(ErrorKind::InvalidParameters, "weights must be nonnegative");
        if (i && values[i] > values[i - 1])
            throw Error(ErrorKind::InvalidParameters, "univariate weights must be nonincreasing");
    }
    while (!values.empty() && values.back() == 0.0) values.pop_back();
    UnivariateRule r;
    r.values_ = std::move(values);
    if (r.values_.empty()) r.values_.push_back(0.0);
    return r;
}

double UnivariateRule::operator()(std::uint32_t j) const {
    if (j == 0) return 0.0;
    if (is_power_law()) return scale_ * std::pow(static_cast<double>(j), -exponent_);
    return j <= values_.size() ? values_[j - 1] : 0.0;
}

std::uint32_t UnivariateRule::support_size() const {
    if (is_power_law()) return std::numeric_limits<std::uint32_t>::max();
    return values_.back() > 0.0 ? static_cast<std::uint32_t>(values_.size()) : 0u;
}

std::pair<double, double> UnivariateRule::tail_power_sum(std::uint32_t J, double r, double scale_factor) const {
    if (!is_power_law()) {
        double s = 0.0;
        for (std::size_t j = J; j < values_.size(); ++j) s += std::pow(scale_factor * values_[j], r);
        return {s, s};
    }
    const double s = exponent_ * r;
    if (s <= 1.0) return {0.0, kInf};
    const double f = std::pow(scale_factor * scale_, r);
    auto [lo, hi] = zeta_tail(s, static_cast<double>(J) + 1.0);
    return {f * std::max(lo, 0.0), f * hi};
}

// ---------------------------------------------------------------- order rule

OrderRule OrderRule::constant() { return OrderRule{}; }

OrderRule OrderRule::up_to(unsigned omega) {
    OrderRule r;
    r.kind_ = Kind::UpTo;
    r.omega_ = omega;
    return r;
}

OrderRule OrderRule::factorial_power(double q) {
    OrderRule r;
    r.kind_ = Kind::FactorialPower;
    r.a_ = q;
    return r;
}

OrderRule OrderRule::pod_example(double p_star, double q_star) {
    OrderRule r;
    r.kind_ = Kind::PodExample;
    r.a_ = p_star;
    r.b_ = q_star;
    return r;
}

OrderRule OrderRule::finite(std::vector<double> values) {
    if (values.empty()) values.push_back(1.0);
    for (double v : values)
        if (!(v >= 0.0)) throw Error(ErrorKind::InvalidParameters, "order weights must be nonnegative");
    OrderRule r;
    r.kind_ = Kind::Finite;
    r.values_ = std::move(values);
    r.values_[0] = 1.0;
    return r;
}

double OrderRule::log_value(unsigned k) const {
    if (k == 0) return 0.0;
    switch (kind_) {
    case Kind::Constant: return 0.0;
    case Kind::UpTo: return k <= omega_ ? 0.0 : kNegInf;
    case Kind::FactorialPower: return a_ * std::lgamma(k + 1.0);
    case Kind::PodExample: {
        if (k == 1) return 0.0;
        const double p = a_, q = b_;
        const double kk = k;
        return p * std::lgamma(kk + 1.0) + (p / 2.0 - q) * std::log(kk) +
               kk * p * std::log((p / q) * std::sin(q * M_PI / p) / M_PI);
    }
    case Kind::Finite: return k < values_.size() ? safe_log(values_[k]) : kNegInf;
    }
    return kNegInf;
}

double OrderRule::operator()(unsigned k) const {
    switch (kind_) {
    case Kind::Constant: return 1.0;
    case Kind::UpTo: return k <= omega_ ? 1.0 : 0.0;
    case Kind::Finite: return k < values_.size() ? values_[k] : 0.0;
    default: return std::exp(log_value(k));
    }
}

unsigned OrderRule::max_order() const {
    switch (kind_) {
    case Kind::UpTo: return omega_;
    case Kind::Finite: {
        unsigned last = 0;
        for (unsigned k = 0; k < values_.size(); ++k)
            if (values_[k] > 0.0) last = k;
        return last;
    }
    default: return kUnbounded;
    }
}

// ---------------------------------------------------------------- families

WeightFamily WeightFamily::product(UnivariateRule gamma) {
    WeightFamily f;
    f.kind_ = WeightKind::Product;
    f.gamma_ = std::move(gamma);
    return f;
}

WeightFamily WeightFamily::finite_product(UnivariateRule gamma, unsigned omega) {
    if (omega < 1) throw Error(ErrorKind::InvalidParameters, "order must be >= 1");
    WeightFamily f;
    f.kind_ = WeightKind::FiniteProduct;
    f.gamma_ = std::move(gamma);
    f.Gamma_ = OrderRule::up_to(omega);
    return f;
}

WeightFamily WeightFamily::pod(OrderRule Gamma, UnivariateRule gamma) {
    WeightFamily f;
    f.kind_ = WeightKind::Pod;
    f.gamma_ = std::move(gamma);
    f.Gamma_ = std::move(Gamma);
    return f;
}

WeightFamily WeightFamily::explicit_map(std::map<CoordinateSet, double> entries) {
    for (const auto& [u, g] : entries)
        if (!(g >= 0.0)) throw Error(ErrorKind::InvalidParameters, "weights must be nonnegative");
    WeightFamily f;
    f.kind_ = WeightKind::Explicit;
    f.entries_ = std::move(entries);
    return f;
}

unsigned WeightFamily::max_cardinality() const {
    unsigned k = cutoff_.value_or(kUnbounded);
    if (kind_ == WeightKind::Explicit) {
        unsigned largest = 0;
        for (const auto& [u, g] : entries_)
            if (g > 0.0) largest = std::max<unsigned>(largest, static_cast<unsigned>(u.size()));
        return std::min(k, largest);
    }
    k = std::min(k, Gamma_.max_order());
    const std::uint32_t supp = gamma_.support_size();
    if (supp != std::numeric_limits<std::uint32_t>::max()) k = std::min<unsigned>(k, supp);
    return k;
}

double WeightFamily::order_factor(unsigned k) const {
    if (cutoff_ && k > *cutoff_) return 0.0;
    return Gamma_(k);
}

double WeightFamily::log_order_factor(unsigned k) const {
    if (cutoff_ && k > *cutoff_) return kNegInf;
    return Gamma_.log_value(k);
}

double WeightFamily::empty_weight() const {
    if (kind_ != WeightKind::Explicit) return 1.0;
    auto it = entries_.find(CoordinateSet{});
    return it == entries_.end() ? 0.0 : it->second;
}

namespace {

// gamma_u c0^{|u|} for product-structured kinds; direct products keep exact ties exact.
double pod_hat(const WeightFamily& f, const CoordinateSet& u, double c0) {
    const unsigned k = static_cast<unsigned>(u.size());
    const double lG = f.log_order_factor(k);
    if (lG == kNegInf) return 0.0;
    double prod = 1.0;
    for (auto j : u) prod *= f.univariate()(j);
    if (prod == 0.0) return 0.0;
    const double ck = std::pow(c0, static_cast<double>(k));
    if (lG < 600.0) return f.order_factor(k) * prod * ck;
    return std::exp(lG + std::log(prod) + k * std::log(c0));
}

}  // namespace

double weight_of(const WeightFamily& family, const CoordinateSet& u) {
    if (family.cutoff() && u.size() > *family.cutoff()) return 0.0;
    if (family.kind() == WeightKind::Explicit) {
        auto it = family.entries().find(u);
        return it == family.entries().end() ? 0.0 : it->second;
    }
    return pod_hat(family, u, 1.0);
}

WeightFamily cutoff(const WeightFamily& family, unsigned sigma) {
    if (sigma < 1) throw Error(ErrorKind::InvalidParameters, "cut-off order must be >= 1");
    WeightFamily out = family;
    out.cutoff_ = family.cutoff_ ? std::min(*family.cutoff_, sigma) : sigma;
    return out;
}

// ---------------------------------------------------------------- enumeration

namespace {

bool ordered_before(const OrderedEntry& a, const OrderedEntry& b) {
    if (a.gamma_hat != b.gamma_hat) return a.gamma_hat > b.gamma_hat;
    return a.u < b.u;
}

std::vector<OrderedEntry> explicit_sorted(const WeightFamily& f, double c0) {
    std::vector<OrderedEntry> out;
    for (const auto& [u, g] : f.entries()) {
        if (u.empty() || (f.cutoff() && u.size() > *f.cutoff())) continue;
        const double h = g * std::pow(c0, static_cast<double>(u.size()));
        if (h > 0.0) out.push_back({u, h});
    }
    std::sort(out.begin(), out.end(), ordered_before);
    return out;
}

// Depth-first enumeration of sets whose modified weight reaches a threshold, pruned by the best
// possible extension of each partial set (gamma nonincreasing makes consecutive indices optimal).
class PodEnumerator {
public:
    PodEnumerator(const WeightFamily& f, double c0, EnumerationBounds bounds)
        : f_(f), c0_(c0), bounds_(bounds) {
        max_card_ = f.max_cardinality();
        S_ = std::min(bounds.s_max, max_card_);
        jlim_ = std::min<std::uint64_t>(bounds.j_max, f.univariate().support_size());
        lg_.assign(static_cast<std::size_t>(jlim_) + 2, kNegInf);
        for (std::uint32_t j = 1; j <= jlim_; ++j) lg_[j] = safe_log(c0 * f.univariate()(j));
        lG_.assign(S_ + 2, kNegInf);
        for (unsigned k = 0; k <= S_ + 1; ++k) lG_[k] = f.log_order_factor(k);
    }

    // Best log weight reachable from cardinality k using elements from index j on.
    double extension(unsigned k, std::uint64_t j) const {
        double best = lG_[k], acc = 0.0;
        for (unsigned t = 1; k + t <= S_ && j + t - 1 <= jlim_; ++t) {
            acc += lg_[j + t - 1];
            if (acc == kNegInf) break;
            best = std::max(best, lG_[k + t] + acc);
        }
        return best;
    }

    double root_bound() const { return jlim_ >= 1 ? extension(0, 1) : kNegInf; }

    // Collect all sets with gamma_hat >= thr (strict when `strict`); stops early past `cap` sets.
    bool collect(double thr, bool strict, std::size_t cap, std::vector<OrderedEntry>& out) const {
        out.clear();
        const double log_thr = std::log(thr) - 1e-9;
        std::vector<std::uint32_t> cur;
        bool overflow = false;
        std::function<void(double)> rec = [&](double logprod) {
            const unsigned k = static_cast<unsigned>(cur.size());
            if (k >= S_) return;
            const std::uint64_t start = cur.empty() ? 1 : std::uint64_t(cur.back()) + 1;
            for (std::uint64_t j = start; j <= jlim_; ++j) {
                if (overflow) return;
                const double lp = logprod + lg_[j];
                if (lp == kNegInf) break;
                if (lp + extension(k + 1, j + 1) < log_thr) break;
                cur.push_back(static_cast<std::uint32_t>(j));
                if (lG_[k + 1] + lp >= log_thr) {
                    CoordinateSet u(cur);
                    const double h = pod_hat(f_, u, c0_);
                    if (strict ? h > thr : h >= thr) {
                        out.push_back({std::move(u), h});
                        if (out.size() > cap) overflow = true;
                    }
                }
                rec(lp);
                cur.pop_back();
            }
        };
        rec(0.0);
        return !overflow;
    }

    // Certify that no set outside the bounds reaches log threshold `log_t`.
    void certify(double log_t) const {
        const double margin = 1e-12 * std::max(1.0, std::fabs(log_t));
        // sets using an index beyond j_max
        if (jlim_ < f_.univariate().support_size()) {
            const double lg_next = safe_log(c0_ * f_.univariate()(static_cast<std::uint32_t>(jlim_ + 1)));
            double best = kNegInf, acc = 0.0;
            for (unsigned s = 1; s <= S_; ++s) {
                best = std::max(best, lG_[s] + acc + lg_next);
                acc += lg_[s <= jlim_ ? s : jlim_];
            }
            if (best >= log_t - margin)
                throw Error(ErrorKind::TruncationInsufficient, "coordinate bound j_max too small");
        }
        // sets larger than s_max
        if (S_ < max_card_) {
            double acc = 0.0;
            for (unsigned s = 1; s <= S_; ++s) acc += safe_log(c0_ * f_.univariate()(s));
            const unsigned last = max_card_ == kUnbounded ? S_ + 256 : std::min(max_card_, S_ + 256);
            double prev = kInf;
            bool decreasing_tail = true;
            for (unsigned s = S_ + 1; s <= last; ++s) {
                acc += safe_log(c0_ * f_.univariate()(s));
                const double v = f_.log_order_factor(s) + acc;
                if (v >= log_t - margin)
                    throw Error(ErrorKind::TruncationInsufficient, "cardinality bound s_max too small");
                if (s + 16 > last) decreasing_tail = decreasing_tail && v <= prev;
                prev = v;
            }
            if (last < max_card_ && !decreasing_tail)
                throw Error(ErrorKind::TruncationInsufficient, "cannot certify cardinality tail");
        }
    }

private:
    const WeightFamily& f_;
    double c0_;
    EnumerationBounds bounds_;
    unsigned max_card_ = 0, S_ = 0;
    std::uint64_t jlim_ = 0;
    std::vector<double> lg_, lG_;
};

}  // namespace

OrderedWeights enumerate_ordered(const WeightFamily& family, std::optional<unsigned> sigma, double c0,
                                 std::size_t k, EnumerationBounds bounds) {
    if (!(c0 > 0.0)) throw Error(ErrorKind::InvalidParameters, "c0 must be positive");
    OrderedWeights ow{sigma ? cutoff(family, *sigma) : family, sigma, c0, bounds, {}};
    const WeightFamily& f = ow.family;
    if (k == 0) return ow;
    if (f.kind() == WeightKind::Explicit) {
        ow.entries = explicit_sorted(f, c0);
        if (ow.entries.size() > k) ow.entries.resize(k);
        return ow;
    }
    PodEnumerator en(f, c0, bounds);
    const double root = en.root_bound();
    if (root == kNegInf) return ow;
    std::vector<OrderedEntry> found;
    double thr = std::exp(root) * 0.5;
    for (;;) {
        const bool complete = en.collect(thr, false, 64 * k + 4096, found);
        if (!complete) {  // overshoot: raise the threshold towards the previous one
            thr *= 2.0;
            en.collect(thr, false, kUnbounded, found);
            break;
        }
        if (found.size() >= k || thr < 1e-300) break;
        thr *= 1.0 / 16.0;
    }
    std::sort(found.begin(), found.end(), ordered_before);
    if (found.size() > k) found.resize(k);
    if (!found.empty()) en.certify(std::log(found.back().gamma_hat));
    ow.entries = std::move(found);
    return ow;
}

std::vector<OrderedEntry> enumerate_above(const WeightFamily& family, double c0, double threshold,
                                          EnumerationBounds bounds) {
    if (!(c0 > 0.0) || !(threshold > 0.0))
        throw Error(ErrorKind::InvalidParameters, "c0 and threshold must be positive");
    if (family.kind() == WeightKind::Explicit) {
        auto all = explicit_sorted(family, c0);
        all.erase(std::remove_if(all.begin(), all.end(), [&](const auto& e) { return !(e.gamma_hat > threshold); }),
                  all.end());
        return all;
    }
    PodEnumerator en(family, c0, bounds);
    std::vector<OrderedEntry> found;
    en.collect(threshold, true, kUnbounded, found);
    en.certify(std::log(threshold));
    std::sort(found.begin(), found.end(), ordered_before);
    return found;
}

// ---------------------------------------------------------------- sums

std::pair<double, double> zeta_tail(double s, double N) {
    if (!(s > 1.0) || !(N >= 1.0)) throw Error(ErrorKind::InvalidParameters, "zeta tail needs s > 1, N >= 1");
    // Euler-Maclaurin for sum_{j>=N} j^{-s}; error below the first omitted Bernoulli term.
    const double Ns = std::pow(N, -s);
    const double est = N * Ns / (s - 1.0) + Ns / 2.0 + s * Ns / N / 12.0 -
                       s * (s + 1) * (s + 2) * Ns / (N * N * N) / 720.0;
    const double err = 2.0 * s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * Ns / std::pow(N, 5) / 30240.0;
    return {est - err, est + err};
}

double riemann_zeta(double s, unsigned terms) {
    if (terms < 2) terms = 2;
    long double head = 0.0L;
    for (unsigned j = terms - 1; j >= 1; --j) head += std::pow(static_cast<long double>(j), -static_cast<long double>(s));
    auto [lo, hi] = zeta_tail(s, terms);
    return static_cast<double>(head + 0.5L * (lo + hi));
}

double hurwitz_multi(double r, unsigned k, unsigned terms) {
    if (!(r > 1.0)) throw Error(ErrorKind::InvalidParameters, "hurwitz_multi needs r > 1");
    std::vector<long double> p(k + 1), e(k + 1);
    for (unsigned i = 1; i <= k; ++i) p[i] = riemann_zeta(r * i, terms);
    e[0] = 1.0L;
    for (unsigned n = 1; n <= k; ++n) {
        long double acc = 0.0L;
        for (unsigned i = 1; i <= n; ++i) acc += (i % 2 ? 1.0L : -1.0L) * e[n - i] * p[i];
        e[n] = acc / n;
    }
    return static_cast<double>(e[k]);
}

ValueBound power_sum(const WeightFamily& family, double r, double c0, TruncationParams trunc) {
    if (!(r > 0.0) || !(c0 > 0.0)) throw Error(ErrorKind::InvalidParameters, "power sum needs r, c0 > 0");
    if (family.kind() == WeightKind::Explicit) {
        ValueBound vb;
        for (const auto& e : explicit_sorted(family, c0)) vb.value += std::pow(e.gamma_hat, r);
        return vb;
    }
    const UnivariateRule& g = family.univariate();
    const std::uint32_t J = std::min(trunc.j_sum, g.support_size());
    auto [R_lo, R_hi] = g.tail_power_sum(J, r, c0);
    if (!std::isfinite(R_hi)) throw Error(ErrorKind::DivergentSum, "univariate series diverges");
    std::vector<long double> x(J);
    for (std::uint32_t j = 1; j <= J; ++j) x[j - 1] = std::pow(static_cast<long double>(c0) * g(j), r);
    const unsigned maxk = family.max_cardinality();

    if (family.order().is_constant() && maxk == kUnbounded && !family.cutoff()) {
        long double logP = 0.0L;
        for (std::uint32_t j = J; j-- > 0;) logP += std::log1p(x[j]);
        const double R2 = g.tail_power_sum(J, 2.0 * r, c0).second;
        const long double lo = logP + R_lo - R2 / 2.0, hi = logP + R_hi;
        const long double v = std::expm1(lo);
        return {static_cast<double>(v), static_cast<double>(std::expm1(hi) - v)};
    }

    const unsigned K = maxk == kUnbounded ? trunc.k_max : std::min<unsigned>(maxk, trunc.k_max);
    const unsigned Kd = std::min<unsigned>(K, J);
    std::vector<long double> e(Kd + 1, 0.0L);
    e[0] = 1.0L;
    for (std::uint32_t j = J; j-- > 0;)
        for (unsigned k = Kd; k >= 1; --k) e[k] += x[j] * e[k - 1];
    ValueBound vb;
    long double value = 0.0L, slack = 0.0L;
    std::vector<long double> term_hi(K + 1, 0.0L);
    for (unsigned k = 1; k <= K; ++k) {
        const double lG = family.log_order_factor(k);
        if (lG == kNegInf) continue;
        long double upper = 0.0L, pw = 1.0L;
        for (unsigned i = 0; i <= k; ++i) {
            if (k - i <= Kd) upper += e[k - i] * pw;
            pw *= static_cast<long double>(R_hi) / (i + 1);
        }
        const long double G = std::exp(static_cast<long double>(r) * lG);
        const long double lower = k <= Kd ? e[k] : 0.0L;
        value += G * lower;
        slack += G * (upper - lower);
        term_hi[k] = G * upper;
    }
    if (K < maxk) {
        long double rho = 0.0L;
        for (unsigned k = K > 8 ? K - 8 : 1; k < K; ++k) {
            if (term_hi[k] == 0.0L) continue;
            rho = std::max(rho, term_hi[k + 1] / term_hi[k]);
        }
        if (!(rho < 0.95L)) throw Error(ErrorKind::DivergentSum, "cannot certify the cardinality tail");
        slack += term_hi[K] * rho / (1.0L - rho);
    }
    vb.value = static_cast<double>(value);
    vb.bound = static_cast<double>(slack);
    return vb;
}

ValueBound big_L(const WeightFamily& family, double r, TruncationParams trunc) {
    return power_sum(family, r, 1.0, trunc);
}

ValueBound tail(const OrderedWeights& ordered, std::size_t d, TruncationParams trunc) {
    if (ordered.family.kind() == WeightKind::Explicit) {
        auto all = explicit_sorted(ordered.family, ordered.c0);
        ValueBound vb;
        for (std::size_t j = d; j < all.size(); ++j) vb.value += all[j].gamma_hat;
        return vb;
    }
    if (d > ordered.entries.size())
        throw Error(ErrorKind::TruncationInsufficient, "ordered weights shorter than requested tail start");
    ValueBound total = power_sum(ordered.family, 1.0, ordered.c0, trunc);
    long double partial = 0.0L;
    for (std::size_t j = 0; j < d; ++j) partial += ordered.entries[j].gamma_hat;
    return {std::max(0.0, static_cast<double>(total.value - partial)), total.bound};
}

namespace {

double regression_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

DecayEstimate decay_estimate(const OrderedWeights& ordered, std::size_t j_lo, std::size_t j_hi) {
    if (j_lo < 1 || j_hi <= j_lo || j_hi - j_lo + 1 < 10)
        throw Error(ErrorKind::InvalidParameters, "decay window needs at least 10 entries");
    if (ordered.entries.size() < j_hi)
        throw Error(ErrorKind::TruncationInsufficient, "ordered weights shorter than the decay window");
    std::vector<double> xs, ys;
    bool all_equal = true;
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
        xs.push_back(std::log(static_cast<double>(j)));
        ys.push_back(std::log(ordered.entries[j - 1].gamma_hat));
        all_equal = all_equal && ordered.entries[j - 1].gamma_hat == ordered.entries[j_lo - 1].gamma_hat;
    }
    if (all_equal) return {0.0, true};
    return {-regression_slope(xs, ys), false};
}

double active_count_in_box(const WeightFamily& family, unsigned sigma, std::uint32_t L) {
    if (family.kind() == WeightKind::Explicit) {
        double count = 0.0;
        for (const auto& [u, g] : family.entries())
            if (!u.empty() && g > 0.0 && u.size() <= sigma && u.max() <= L &&
                (!family.cutoff() || u.size() <= *family.cutoff()))
                count += 1.0;
        return count;
    }
    const std::uint32_t Lp = std::min(L, family.univariate().support_size());
    const unsigned kmax = std::min(sigma, family.max_cardinality());
    double count = 0.0, binom = 1.0;
    for (unsigned k = 1; k <= kmax && k <= Lp; ++k) {
        binom = binom * (Lp - k + 1) / k;
        if (family.order_factor(k) > 0.0) count += binom;
    }
    return count;
}

double t_star_estimate(const OrderedWeights& ordered, unsigned sigma, const std::vector<std::uint32_t>& L_list) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < L_list.size(); ++i) {
        if (i && L_list[i] <= L_list[i - 1]) throw Error(ErrorKind::InvalidParameters, "L_list must increase");
        const double c = active_count_in_box(ordered.family, sigma, L_list[i]);
        if (c > 0.0) {
            xs.push_back(std::log(static_cast<double>(L_list[i])));
            ys.push_back(std::log(c));
        }
    }
    if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return regression_slope(xs, ys);
}

double pod_anchored_sum(const WeightFamily& family, unsigned d, double inv_tau, double boost) {
    if (family.kind() == WeightKind::Explicit)
        throw Error(ErrorKind::InvalidParameters, "pod_anchored_sum needs a product-structured family");
    if (d < 1 || !(inv_tau > 0.0) || !(boost > 0.0))
        throw Error(ErrorKind::InvalidParameters, "need d >= 1, inv_tau > 0, boost > 0");
    const auto& g = family.univariate();
    std::vector<long double> e(d, 0.0L);
    e[0] = 1.0L;
    for (unsigned j = 1; j < d; ++j) {
        const long double y = std::pow(static_cast<long double>(g(j)), inv_tau);
        for (unsigned k = j; k >= 1; --k) e[k] += y * e[k - 1];
    }
    const long double gd = std::pow(static_cast<long double>(g(d)), inv_tau);
    long double sum = 0.0L;
    for (unsigned k = 0; k < d; ++k) {
        const double lG = family.log_order_factor(k + 1);
        if (lG == kNegInf) continue;
        sum += std::exp(static_cast<long double>(inv_tau) * lG) *
               std::pow(static_cast<long double>(boost), static_cast<long double>(k + 1)) * gd * e[k];
    }
    return static_cast<double>(sum);
}

// ---------------------------------------------------------------- fixtures

WeightFamily pod_example_weights(double p_star, double q_star) {
    if (!(q_star >= 1.0) || !(p_star >= 2.0 * q_star))
        throw Error(ErrorKind::InvalidParameters, "need p* >= 2q* >= 2");
    const double ratio = p_star / (2.0 * q_star);
    if (std::fabs(ratio - std::round(ratio)) > 1e-12)
        throw Error(ErrorKind::InvalidParameters, "p*/(2q*) must be an integer");
    return WeightFamily::pod(OrderRule::pod_example(p_star, q_star), UnivariateRule::power_law(1.0, p_star));
}

WeightFamily clique_weights(unsigned d, std::uint32_t coord_max) {
    if (d < 2 || coord_max < d) throw Error(ErrorKind::InvalidParameters, "need d >= 2 and coord_max >= d");
    std::map<CoordinateSet, double> entries;
    std::vector<std::uint32_t> cur;
    std::vector<bool> used(d, false);
    std::function<void(std::uint32_t, double)> rec = [&](std::uint32_t start, double w) {
        for (std::uint32_t j = start; j <= coord_max; ++j) {
            if (used[j % d]) continue;
            used[j % d] = true;
            cur.push_back(j);
            const double wj = w / (double(j) * double(j));
            entries.emplace(CoordinateSet(cur), wj);
            rec(j + 1, wj);
            cur.pop_back();
            used[j % d] = false;
        }
    };
    rec(1, 1.0);
    return WeightFamily::explicit_map(std::move(entries));
}

WeightFamily disjoint_pairs_weights(std::uint32_t count, double exponent) {
    std::map<CoordinateSet, double> entries;
    for (std::uint32_t i = 1; i <= count; ++i)
        entries.emplace(CoordinateSet{2 * i - 1, 2 * i}, std::pow(double(i), -exponent));
    return WeightFamily::explicit_map(std::move(entries));
}

// ---------------------------------------------------------------- text format

WeightFamily parse_explicit_weights(const std::string& text) {
    std::map<CoordinateSet, double> entries;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto where = "weights line " + std::to_string(lineno);
        auto colon = line.find(':');
        if (colon == std::string::npos) throw Error(ErrorKind::ParseError, where + ": missing ':'");
        std::istringstream sj(line.substr(0, colon)), sg(line.substr(colon + 1));
        std::vector<std::uint32_t> js;
        std::string tok;
        while (sj >> tok) {
            char* end = nullptr;
            const long v = std::strtol(tok.c_str(), &end, 10);
            if (*end || v < 1) throw Error(ErrorKind::ParseError, where + ": bad coordinate '" + tok + "'");
            js.push_back(static_cast<std::uint32_t>(v));
        }
        double g;
        std::string extra;
        if (!(sg >> g) || (sg >> extra)) throw Error(ErrorKind::ParseError, where + ": bad weight");
        if (!(g >= 0.0)) throw Error(ErrorKind::ParseError, where + ": negative weight");
        CoordinateSet u;
        try {
            u = CoordinateSet(std::move(js));
        } catch (const Error&) {
            throw Error(ErrorKind::ParseError, where + ": repeated coordinate");
        }
        if (!entries.emplace(std::move(u), g).second)
            throw Error(ErrorKind::ParseError, where + ": set listed twice");
    }
    return WeightFamily::explicit_map(std::move(entries));
}

std::string format_explicit_weights(const WeightFamily& family) {
    if (family.kind() != WeightKind::Explicit)
        throw Error(ErrorKind::InvalidParameters, "only explicit families have a text form");
    std::string out;
    char buf[40];
    for (const auto& [u, g] : family.entries()) {
        std::string line;
        for (auto j : u) line += std::to_string(j) + " ";
        std::snprintf(buf, sizeof buf, ": %.17g\n", g);
        out += line + buf;
    }
    return out;
}

}  // namespace infint
