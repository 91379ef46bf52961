// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "infint/cbc.hpp"
#include "infint/convergence.hpp"
#include "infint/coordgraph.hpp"
#include "infint/error.hpp"
#include "infint/infdim.hpp"
#include "infint/kernel.hpp"
#include "infint/pointsets.hpp"
#include "infint/walsh.hpp"
#include "infint/weights.hpp"
#include "oracles.hpp"

using namespace infint;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Records the first failing check and keeps going.
struct Checks {
    Outcome out;
    void require(bool ok, const std::string& what) {
        if (!ok && out.pass) {
            out.pass = false;
            out.detail = "failed: " + what;
        }
    }
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

WeightFamily unit_weight() { return WeightFamily::product(UnivariateRule::finite({1.0})); }

double lfact(unsigned k) { return std::lgamma(k + 1.0); }

// ---------------------------------------------------------------- 1

Outcome worked_example() {
    Checks c;
    const PolyLatticeSpec spec{2, 2, 2, Poly(2, {1, 1, 1}), {Poly(2, {1})}};
    const auto ps = generate_points(spec);
    c.require(ps.count() == 4, "four points");
    const double want[] = {0.0, 0.25, 0.75, 0.5};
    for (std::size_t h = 0; h < 4 && c.out.pass; ++h) {
        c.require(ps.value(h, 0) == want[h], "point " + std::to_string(h));
        c.require(ps.value(h, 0) == oracle::lattice_point(h, {1}, {1, 1, 1}, 2, 2), "long division " + std::to_string(h));
    }
    if (c.out.pass) c.out.detail = "points 0, 1/4, 3/4, 1/2";
    return c.out;
}

// ---------------------------------------------------------------- 2

Outcome hurwitz_identity() {
    Checks c;
    double worst = 0.0;
    for (unsigned k = 1; k <= 6; ++k)
        worst = std::max(worst, std::fabs(hurwitz_multi(2, k) - std::pow(M_PI, 2.0 * k) / std::tgamma(2.0 * k + 2)));
    c.require(worst <= 1e-10, "max abs error " + fmt("%.3g", worst));
    if (c.out.pass) c.out.detail = "max abs error " + fmt("%.3g", worst);
    return c.out;
}

// ---------------------------------------------------------------- 3

Outcome ratio_bounded() {
    Checks c;
    double lo = 1e300, hi = 0.0;
    for (unsigned k = 1; k <= 12; ++k) {
        const double r = std::exp(2 * lfact(k)) * hurwitz_multi(2, k) * k * std::pow(2.0 * std::sin(M_PI / 2) / M_PI, 2.0 * k);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    c.require(lo >= 0.1 && hi <= 10.0, "ratio range [" + fmt("%.4g", lo) + ", " + fmt("%.4g", hi) + "]");
    if (c.out.pass) c.out.detail = "ratio range [" + fmt("%.4g", lo) + ", " + fmt("%.4g", hi) + "]";
    return c.out;
}

// ---------------------------------------------------------------- 4

Outcome pod_order() {
    Checks c;
    const auto w = WeightFamily::pod(OrderRule::factorial_power(1.0), UnivariateRule::power_law(1.0, 3.0));
    // each subset with largest element d contributes e_{k}(j^{-3/2}, j < d) (k+1)!^{1/2}, and
    // e_k <= zeta(3/2)^k / k! bounds the ratio uniformly in d
    const double z = 2.6123753486854883;
    double upper = 0.0;
    for (int k = 0; k < 200; ++k) upper += std::sqrt(k + 1.0) * std::exp(k * std::log(z) - 0.5 * std::lgamma(k + 1.0));
    double lo = 1e300, hi = 0.0;
    for (unsigned d = 1; d <= 30; ++d) {
        const double r = pod_anchored_sum(w, d, 0.5, 1.0) / std::pow(std::pow(double(d), -3.0), 0.5);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    c.require(lo >= 1.0 && hi <= upper,
              "ratio range [" + fmt("%.4g", lo) + ", " + fmt("%.4g", hi) + "] outside [1, " + fmt("%.4g", upper) + "]");

    double worst = 0.0;
    for (unsigned d = 1; d <= 12; ++d) {
        long double bf = 0.0L;
        for (std::uint32_t mask = 0; mask < (1u << (d - 1)); ++mask) {
            unsigned k = 1;
            long double prod = std::pow(static_cast<long double>(d), -3.0L);
            for (std::uint32_t j = 0; j + 1 < d; ++j)
                if (mask >> j & 1) {
                    ++k;
                    prod *= std::pow(static_cast<long double>(j + 1), -3.0L);
                }
            bf += std::sqrt(static_cast<long double>(std::tgamma(k + 1.0)) * prod);
        }
        worst = std::max(worst, std::fabs(pod_anchored_sum(w, d, 0.5, 1.0) / double(bf) - 1.0));
    }
    c.require(worst <= 1e-12, "dp vs brute force relative error " + fmt("%.3g", worst));
    if (c.out.pass)
        c.out.detail = "ratio in [" + fmt("%.4g", lo) + ", " + fmt("%.4g", hi) + "], dp rel error " + fmt("%.2g", worst);
    return c.out;
}

// ---------------------------------------------------------------- 5

Outcome kernel_closed_forms() {
    Checks c;
    double worst = 0.0;
    for (unsigned alpha : {1u, 2u, 3u})
        for (double anchor : {0.0, 0.5, 1.0}) {
            AnchoredKernel k({alpha, anchor});
            for (double x : {0.0, 0.05, 0.3, 0.5, 0.77, 1.0}) {
                for (double y : {0.0, 0.2, 0.5, 0.9, 1.0})
                    worst = std::max(worst, std::fabs(k1_eval({alpha, anchor}, x, y) - oracle::kernel(alpha, anchor, x, y)));
                worst = std::max(worst, std::fabs(k.integral(x) - oracle::kernel_row_integral(alpha, anchor, x)));
            }
            auto row = [&](double x) { return oracle::kernel_row_integral(alpha, anchor, x); };
            const double c0 = oracle::integrate(row, 0, anchor) + oracle::integrate(row, anchor, 1);
            const double m = oracle::integrate([&](double x) { return oracle::kernel(alpha, anchor, x, x); }, 0, 1);
            worst = std::max({worst, std::fabs(k.c0() - c0), std::fabs(k.m() - m)});
        }
    c.require(worst <= 1e-10, "max deviation " + fmt("%.3g", worst));
    const auto [c0, m] = c0_m_constants({1, 0.0});
    c.require(c0 == 1.0 / 3.0 && m == 0.5, "C0 = 1/3 and M = 1/2 at alpha 1, anchor 0");
    if (c.out.pass) c.out.detail = "max deviation " + fmt("%.3g", worst);
    return c.out;
}

// ---------------------------------------------------------------- 6

// Squared worst-case error of an equal-weight rule at anchor 0 for alpha 1 or 2. On x <= y the kernel is
// min(x,y) for alpha 1 and xy + x^2 y / 2 - x^3 / 6 for alpha 2, so the double sum runs over sorted nodes
// with prefix sums of x, x^2, x^3.
class SortedWCE {
public:
    explicit SortedWCE(unsigned alpha) : alpha_(alpha) {
        // the row integral is a polynomial of degree 2 alpha; interpolate it from quadrature values and
        // expand the Lagrange form into monomial coefficients
        const int deg = 2 * static_cast<int>(alpha);
        std::vector<double> xs;
        for (int i = 0; i <= deg; ++i) xs.push_back(0.5 - 0.5 * std::cos(M_PI * (i + 0.5) / (deg + 1)));
        coeffs_.assign(deg + 1, 0.0);
        for (int i = 0; i <= deg; ++i) {
            std::vector<double> basis{oracle::kernel_row_integral(alpha, 0.0, xs[i])};
            for (int k = 0; k <= deg; ++k) {
                if (k == i) continue;
                std::vector<double> next(basis.size() + 1, 0.0);
                for (std::size_t r = 0; r < basis.size(); ++r) {
                    next[r + 1] += basis[r] / (xs[i] - xs[k]);
                    next[r] -= basis[r] * xs[k] / (xs[i] - xs[k]);
                }
                basis = std::move(next);
            }
            for (int r = 0; r <= deg; ++r) coeffs_[r] += basis[r];
        }
        c0_ = oracle::integrate([&](double x) { return oracle::kernel_row_integral(alpha, 0.0, x); }, 0.0, 1.0);
    }

    double row(double x) const {
        double s = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) s = s * x + *it;
        return s;
    }

    // t sorted increasingly
    double operator()(const std::vector<double>& t) const {
        const double n = static_cast<double>(t.size());
        double lin = 0.0, pair = 0.0, p1 = 0.0, p2 = 0.0, p3 = 0.0;
        for (double y : t) {
            lin += row(y);
            // pairs (x, y) with x before y, then the diagonal
            if (alpha_ == 1) {
                pair += 2.0 * p1 + y;
            } else {
                pair += 2.0 * (p1 * y + p2 * y / 2.0 - p3 / 6.0) + y * y + y * y * y / 3.0;
            }
            p1 += y;
            p2 += y * y;
            p3 += y * y * y;
        }
        return c0_ - 2.0 * lin / n + pair / (n * n);
    }

private:
    unsigned alpha_;
    std::vector<double> coeffs_;
    double c0_ = 0.0;
};

// Sorted nodes h q / p for all h of degree < m: digit vectors add up digitwise, seeded from the long-division
// oracle on the monomials x^i q. Buffers are reused across candidates.
class LatticeColumn {
public:
    LatticeColumn(std::uint32_t b, int m, int n) : b_(b), n_(n) {
        N_ = 1;
        for (int i = 0; i < m; ++i) N_ *= b;
        m_ = m;
        digits_.resize(N_ * n);
        keys_.resize(N_);
        tmp_.resize(N_);
        t_.resize(N_);
    }

    const std::vector<double>& operator()(const std::vector<std::uint32_t>& p, const std::vector<std::uint32_t>& q) {
        // digits_[l N + h] is digit l + 1 of node h
        std::vector<std::uint32_t> shifted = q;
        std::size_t size = 1;
        for (int l = 0; l < n_; ++l) digits_[l * N_] = 0;
        for (int i = 0; i < m_; ++i) {
            const auto basis = oracle::laurent(shifted, p, n_, b_);
            for (std::uint32_t j = 1; j < b_; ++j)
                for (int l = 0; l < n_; ++l) {
                    const auto step = static_cast<std::uint8_t>(j * basis[l] % b_);
                    const std::uint8_t* src = &digits_[l * N_];
                    std::uint8_t* dst = &digits_[l * N_ + j * size];
                    for (std::size_t h = 0; h < size; ++h) {
                        const std::uint8_t v = src[h] + step;
                        dst[h] = v >= b_ ? static_cast<std::uint8_t>(v - b_) : v;
                    }
                }
            size *= b_;
            shifted.insert(shifted.begin(), 0);
        }
        std::fill(keys_.begin(), keys_.end(), 0);
        for (int l = 0; l < n_; ++l) {
            const std::uint8_t* d = &digits_[l * N_];
            for (std::size_t h = 0; h < N_; ++h) keys_[h] = keys_[h] * b_ + d[h];
        }
        radix_sort();
        const double scale = std::pow(double(b_), -n_);
        for (std::size_t h = 0; h < N_; ++h) t_[h] = static_cast<double>(keys_[h]) * scale;
        // the rule moves nodes off the anchor by b^-(n+2)
        t_[0] = std::pow(double(b_), -(n_ + 2));
        return t_;
    }

private:
    // least significant digit first, 11 bits per pass
    void radix_sort() {
        std::uint32_t top = 0;
        for (auto k : keys_) top = std::max(top, k);
        for (int shift = 0; shift == 0 || (top >> shift) != 0; shift += 11) {
            std::vector<std::size_t> count(2049, 0);
            for (auto k : keys_) ++count[((k >> shift) & 2047) + 1];
            for (std::size_t i = 1; i < count.size(); ++i) count[i] += count[i - 1];
            for (auto k : keys_) tmp_[count[(k >> shift) & 2047]++] = k;
            keys_.swap(tmp_);
        }
    }

    std::uint32_t b_;
    int n_, m_;
    std::size_t N_;
    std::vector<std::uint8_t> digits_;
    std::vector<std::uint32_t> keys_, tmp_;  // b^n stays below 2^32 for the sizes searched
    std::vector<double> t_;
};

Outcome exhaustive_cbc() {
    Checks c;
    std::size_t cases = 0;
    for (std::uint32_t b : {2u, 3u})
        for (unsigned alpha : {1u, 2u}) {
            const SortedWCE wce(alpha);
            for (int m = 1; m <= 6; ++m) {
                CBCConfig cfg;
                cfg.b = b;
                cfg.m = m;
                cfg.alpha = alpha;
                cfg.weights = unit_weight();
                cfg.kernel = {alpha, 0.0};
                const auto res = cbc_construct(cfg);
                const int n = static_cast<int>(alpha) * m;
                const auto& p = res.spec.p.coeffs();
                LatticeColumn column(b, m, n);
                // c q gives the same node set as q, so monic q cover every candidate
                double best = std::numeric_limits<double>::infinity();
                for (int deg = 0; deg < n; ++deg) {
                    std::vector<std::uint32_t> low(deg, 0);
                    while (true) {
                        std::vector<std::uint32_t> cand(low);
                        cand.push_back(1);
                        best = std::min(best, wce(column(p, cand)));
                        int i = 0;
                        while (i < deg && ++low[i] == b) low[i++] = 0;
                        if (i == deg) break;
                    }
                }
                const double chosen = wce(column(p, res.spec.q[0].coeffs()));
                const std::string tag = "b=" + std::to_string(b) + " alpha=" + std::to_string(alpha) +
                                        " m=" + std::to_string(m);
                // the criterion is a difference of order-one sums, so roundoff sets an absolute floor
                const double tol = 1e-8 * best + 1e-14;
                c.require(std::fabs(chosen - best) <= tol, tag + ": chosen " + fmt("%.10g", chosen) +
                                                                        " vs minimum " + fmt("%.10g", best));
                c.require(std::fabs(res.final_criterion - best) <= tol,
                          tag + ": reported criterion " + fmt("%.10g", res.final_criterion) + " vs minimum " +
                              fmt("%.10g", best));
                ++cases;
            }
        }
    if (c.out.pass) c.out.detail = std::to_string(cases) + " configurations match the exhaustive minimum";
    return c.out;
}

// ---------------------------------------------------------------- 7

Outcome univariate_rate() {
    Checks c;
    std::vector<double> ms, ls;
    for (int m = 4; m <= 12; ++m) {
        CBCConfig cfg;
        cfg.b = 2;
        cfg.m = m;
        cfg.alpha = 2;
        cfg.weights = unit_weight();
        cfg.kernel = {2, 0.0};
        cfg.candidate_cap = std::uint64_t{1} << 16;
        cfg.sample_size = 4096;
        ms.push_back(m);
        ls.push_back(std::log2(std::sqrt(cbc_construct(cfg).final_criterion)));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        mx += ms[i] / ms.size();
        my += ls[i] / ms.size();
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        sxy += (ms[i] - mx) * (ls[i] - my);
        sxx += (ms[i] - mx) * (ms[i] - mx);
    }
    const double slope = sxy / sxx;
    c.out.detail = "slope " + fmt("%.3f", slope) + " (need <= -1.5)";
    c.require(slope <= -1.5, c.out.detail);
    return c.out;
}

// ---------------------------------------------------------------- 8, 9

std::vector<double> budget_grid(double lo, double hi) {
    std::vector<double> out;
    for (double b = lo; b <= hi * 1.0001; b *= std::sqrt(10.0)) out.push_back(std::round(b));
    return out;
}

std::string rows_text(const ConvergenceResult& r) {
    std::ostringstream s;
    for (const auto& row : r.rows) s << " [" << row.budget << ": cost " << row.cost << ", err " << fmt("%.3e", row.error) << "]";
    return s.str();
}

Outcome multilevel_rate() {
    ConvergenceSetup s;
    s.algorithm = Algorithm::Multilevel;
    s.space = {{1, 0.0}, WeightFamily::product(UnivariateRule::power_law(1.0, 3.0)), {}};
    s.cost = {1.0, CostVariant::Nested};
    s.budgets = budget_grid(1e2, 1e5);
    s.plan.tau = 0.99;
    s.decay = {{1, 3.0}};
    const auto r = run_convergence(s);
    Checks c;
    c.out.detail = "measured " + fmt("%.3f", r.measured_rate) + " vs predicted " + fmt("%.3f", r.predicted_rate) +
                   " (need within 0.25)";
    c.require(std::fabs(r.measured_rate - r.predicted_rate) <= 0.25, c.out.detail);
    std::printf("    multilevel rows:%s\n", rows_text(r).c_str());
    return c.out;
}

Outcome changing_dimension_rate() {
    ConvergenceSetup s;
    s.algorithm = Algorithm::ChangingDimension;
    s.space = {{2, 0.0}, WeightFamily::product(UnivariateRule::power_law(1.0, 6.0)), {}};
    s.cost = {1.0, CostVariant::Unrestricted};
    s.budgets = budget_grid(1e2, 1e5);
    s.decay = {{1, 6.0}};
    s.cd.decay = 6.0;
    s.cd.lambda0 = 0.8;
    s.cd.tau = 1.5;
    s.cd.C_const = AnchoredKernel(s.space.kernel).c0();
    const auto r = run_convergence(s);
    Checks c;
    c.out.detail = "measured " + fmt("%.3f", r.measured_rate) + " vs predicted " + fmt("%.3f", r.predicted_rate) +
                   " (need >= 1.5)";
    c.require(r.measured_rate >= 1.5, c.out.detail);
    std::printf("    changing dimension rows:%s\n", rows_text(r).c_str());
    return c.out;
}

// ---------------------------------------------------------------- 10

Outcome embedding() {
    Checks c;
    double worst = 0.0;
    int violations = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto res = embedding_audit({2, 0.0}, random_atoms(seed), 4095, 2);
        worst = std::max(worst, res.max_ratio);
        violations += !res.pass;
    }
    c.out.detail = std::to_string(violations) + " violations, largest ratio to the bound " + fmt("%.4g", worst);
    c.require(violations == 0 && worst <= 1.0, c.out.detail);
    return c.out;
}

// ---------------------------------------------------------------- 11

// Exhaustive k-colourability over all assignments.
unsigned brute_chromatic(const CoordGraph& g) {
    const std::size_t n = g.vertex_count();
    for (unsigned k = 1;; ++k) {
        std::vector<unsigned> col(n, 0);
        while (true) {
            bool ok = true;
            for (std::size_t i = 0; i < n && ok; ++i)
                for (auto nb : g.neighbours(i)) ok = ok && col[i] != col[nb];
            if (ok) return k;
            std::size_t i = 0;
            while (i < n && ++col[i] == k) col[i++] = 0;
            if (i == n) break;
        }
    }
}

SetSystem pairs(std::initializer_list<std::pair<std::uint32_t, std::uint32_t>> es) {
    SetSystem s;
    for (auto [a, b] : es) s.sets.push_back(CoordinateSet{a, b});
    return s;
}

Outcome coloring() {
    Checks c;
    c.require(chromatic_exact(build_graph(pairs({{1, 2}, {2, 3}, {1, 3}}))) == 3, "triangle");
    c.require(chromatic_exact(build_graph(pairs({{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 1}}))) == 3, "5-cycle");
    for (unsigned d : {2u, 3u, 4u})
        c.require(chromatic_exact(build_graph(SetSystem::from_weights(clique_weights(d, 3 * d)))) == d,
                  "clique weights d=" + std::to_string(d));
    std::mt19937_64 rng(17);
    int brute = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint32_t vertices = 3 + rng() % 18;
        SetSystem sys;
        const int count = 1 + rng() % 12;
        for (int i = 0; i < count; ++i) {
            std::vector<std::uint32_t> u;
            for (std::uint32_t j = 1; j <= vertices; ++j)
                if (rng() % 5 == 0) u.push_back(j);
            if (u.empty()) u.push_back(1 + rng() % vertices);
            sys.sets.push_back(CoordinateSet(u));
        }
        const auto g = build_graph(sys);
        const unsigned chi = chromatic_exact(g);
        const auto greedy = greedy_coloring(g);
        const std::string tag = "random system " + std::to_string(trial);
        c.require(greedy.proper_for(sys), tag + ": greedy colouring proper");
        c.require(clique_lower_bound(sys) <= chi && chi <= greedy.num_colors &&
                      greedy.num_colors <= degree_bound(sys),
                  tag + ": sandwich");
        if (g.vertex_count() <= 9) {
            c.require(chi == brute_chromatic(g), tag + ": brute force");
            ++brute;
        }
    }
    if (c.out.pass) c.out.detail = "fixtures exact, sandwich on 100 systems (" + std::to_string(brute) + " brute forced)";
    return c.out;
}

// ---------------------------------------------------------------- 12

Outcome cost_contract() {
    Checks c;
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const double s = std::uniform_real_distribution<double>(0.0, 2.5)(rng);
        Quadrature q;
        const int n = std::uniform_int_distribution<int>(1, 10)(rng);
        for (int i = 0; i < n; ++i) {
            std::vector<std::uint32_t> u;
            for (std::uint32_t j = 1; j <= 8; ++j)
                if (rng() % 3 == 0) u.push_back(j);
            q.nodes.push_back({CoordinateSet(u), std::vector<double>(u.size(), 0.5), 1.0});
        }
        c.require(cost_nested(q, {s, CostVariant::Nested}).value >=
                      cost_unrestricted(q, {s, CostVariant::Unrestricted}) - 1e-12,
                  "nested below unrestricted on quadrature " + std::to_string(trial));
    }

    std::vector<MultilevelAlgo> fixtures;
    {
        const WeightedSpaceSpec two{{1, 0.3}, WeightFamily::product(UnivariateRule::finite({0.8, 0.4})), {}};
        CBCRuleSource source(two, {});
        fixtures.push_back(ml_build({{1}, {1, 2}}, {4, 2}, source, 0.3));
        fixtures.push_back(ml_build({{1}, {1, 2}}, {3, 3}, source, 0.3));
    }
    {
        const WeightedSpaceSpec spec{{1, 0.0}, WeightFamily::product(UnivariateRule::power_law(1.0, 3.0)), {}};
        CBCRuleSource source(spec, {});
        MLSetup setup;
        setup.plan.tau = 0.99;
        for (double budget : {1e2, 1e3, 1e4}) {
            const auto planned = ml_plan_for_budget(setup, spec.weights, OrderedWeights{}, budget);
            fixtures.push_back(ml_build(planned.v, planned.level_m, source, 0.0));
        }
    }
    for (std::size_t f = 0; f < fixtures.size(); ++f)
        for (double s : {0.0, 1.0, 2.0}) {
            const CostModel model{s, CostVariant::Nested};
            double bound = model.dollar(0);
            for (const auto& level : fixtures[f].levels)
                bound += 2.0 * static_cast<double>(level.rule.nodes.size()) * model.dollar(level.v.size());
            c.require(cost_nested(flatten(fixtures[f]), model).value <= bound + 1e-9,
                      "multilevel fixture " + std::to_string(f) + " at s=" + fmt("%g", s));
        }
    if (c.out.pass)
        c.out.detail = "100 quadratures, " + std::to_string(fixtures.size()) + " multilevel fixtures at 3 cost exponents";
    return c.out;
}

// ---------------------------------------------------------------- 13

Outcome flattening() {
    Checks c;
    const double anchor = 0.3;
    const WeightedSpaceSpec spec{{1, anchor}, WeightFamily::product(UnivariateRule::finite({0.8, 0.4})), {}};
    CBCRuleSource source(spec, {});
    const auto algo = ml_build({{1}, {1, 2}}, {3, 2}, source, anchor);
    const Quadrature flat = flatten(algo);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const double a0 = U(rng), a1 = U(rng), a2 = U(rng), a12 = U(rng), w = 3.0 * U(rng);
        const Integrand f = [=](const CoordinateSet& s, const std::vector<double>& t) {
            double x[2] = {anchor, anchor};
            for (std::size_t k = 0; k < s.size(); ++k) x[s[k] - 1] = t[k];
            return a0 + a1 * std::sin(w * x[0]) + a2 * x[1] * x[1] + a12 * std::exp(x[0] * x[1]);
        };
        // the flattened rule evaluated directly from its nodes
        double direct = 0.0;
        for (const auto& node : flat.nodes) direct += node.a * f(node.support, node.t);
        worst = std::max(worst, std::fabs(ml_apply(algo, f) - direct));
    }
    c.out.detail = "max difference " + fmt("%.3g", worst) + " over 20 integrands";
    c.require(worst <= 1e-12, c.out.detail);
    return c.out;
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "worked lattice example", 1e-3, worked_example},
        {2, "multiple zeta identity", 1.0, hurwitz_identity},
        {3, "zeta ratio bounded", 1.0, ratio_bounded},
        {4, "POD sum of order of the last weight", 1.0, pod_order},
        {5, "kernel closed forms", 5.0, kernel_closed_forms},
        {6, "exhaustive CBC optimality", 30.0, exhaustive_cbc},
        {7, "higher order univariate rate", 300.0, univariate_rate},
        {8, "multilevel convergence rate", 600.0, multilevel_rate},
        {9, "changing dimension convergence rate", 600.0, changing_dimension_rate},
        {10, "embedding audit", 120.0, embedding},
        {11, "colouring fixtures", 30.0, coloring},
        {12, "cost model contract", 5.0, cost_contract},
        {13, "flattening equivalence", 5.0, flattening},
    };
    int failures = 0;
    for (const auto& crit : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = crit.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (out.pass && secs > crit.limit_seconds) {
            out.pass = false;
            out.detail += "; over the time limit of " + fmt("%g", crit.limit_seconds) + " s";
        }
        failures += !out.pass;
        std::printf("criterion %2d %s: %s, %s (%.3f s)\n", crit.id, out.pass ? "PASS" : "FAIL", crit.name,
                    out.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures ? 1 : 0;
}
