#include "doctest.h"
#include "infint/cbc.hpp"
#include "infint/error.hpp"
#include "infint/walsh.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace infint;
using doctest::Approx;

namespace {

CBCConfig base_config(std::uint32_t b, int m, unsigned alpha, std::size_t s, WeightFamily w) {
    CBCConfig cfg;
    cfg.b = b;
    cfg.m = m;
    cfg.alpha = alpha;
    cfg.s = s;
    cfg.weights = std::move(w);
    cfg.kernel = {alpha, 0.0};
    return cfg;
}

WeightFamily unit_weight() { return WeightFamily::product(UnivariateRule::finite({1.0})); }

std::vector<double> oracle_column(const CBCConfig& cfg, const Poly& p, std::uint64_t code) {
    const int n = static_cast<int>(cfg.alpha) * cfg.m;
    const Poly q = Poly::from_encoding(cfg.b, code);
    std::vector<double> t;
    std::uint64_t N = 1;
    for (int i = 0; i < cfg.m; ++i) N *= cfg.b;
    for (std::uint64_t h = 0; h < N; ++h) {
        double x = oracle::lattice_point(h, q.coeffs(), p.coeffs(), n, cfg.b);
        if (x == cfg.kernel.c) x = cfg.kernel.c + std::pow(double(cfg.b), -(n + 2));
        t.push_back(x);
    }
    return t;
}

}  // namespace

TEST_CASE("criterion of the four-point rule") {
    auto cfg = base_config(2, 2, 1, 1, unit_weight());
    const double got = criterion({}, Poly(2, {1}), cfg);
    // nodes 0 -> 2^-4, 1/4, 3/4, 1/2
    const double want = oracle::univariate_wce_sq(1, 0.0, {0.0625, 0.25, 0.75, 0.5});
    CHECK(got == Approx(want).epsilon(1e-10));
    CHECK(std::abs(got - want) < 1e-8);
}

TEST_CASE("zero weights give a zero criterion") {
    auto w = WeightFamily::explicit_map({{CoordinateSet{1}, 1.0}});
    auto cfg = base_config(2, 3, 1, 2, w);
    CHECK(criterion({Poly(2, {1})}, Poly(2, {1, 1}), cfg) == 0.0);
    auto res = cbc_construct(cfg);
    CHECK(res.spec.q[1].encode() == 1);
    CHECK(res.per_component_criterion[1] == 0.0);
}

TEST_CASE("criterion against a direct two-dimensional oracle") {
    for (unsigned alpha : {1u, 2u}) {
        auto w = WeightFamily::explicit_map({{CoordinateSet{1}, 0.7}, {CoordinateSet{2}, 0.4},
                                             {CoordinateSet{1, 2}, 0.25}});
        auto cfg = base_config(2, 3, alpha, 2, w);
        cfg.kernel = {alpha, 0.5};
        const Poly p = find_irreducible(2, int(alpha) * 3);
        const std::uint64_t c1 = 1, c2 = 5;
        const auto t1 = oracle_column(cfg, p, c1), t2 = oracle_column(cfg, p, c2);
        const double c = 0.5;
        auto row = [&](double y) { return oracle::kernel_row_integral(alpha, c, y); };
        const double c0 = oracle::integrate(row, 0.0, c) + oracle::integrate(row, c, 1.0);
        const double N = double(t1.size());
        double e2 = c0, e12 = c0 * c0;
        for (std::size_t i = 0; i < t1.size(); ++i) {
            e2 -= 2.0 / N * oracle::kernel_row_integral(alpha, c, t2[i]);
            e12 -= 2.0 / N * oracle::kernel_row_integral(alpha, c, t1[i]) * oracle::kernel_row_integral(alpha, c, t2[i]);
            for (std::size_t k = 0; k < t1.size(); ++k) {
                const double k2 = oracle::kernel(alpha, c, t2[i], t2[k]);
                e2 += k2 / (N * N);
                e12 += oracle::kernel(alpha, c, t1[i], t1[k]) * k2 / (N * N);
            }
        }
        const double want = 0.4 * e2 + 0.25 * e12;
        const double got = criterion({Poly::from_encoding(2, c1)}, Poly::from_encoding(2, c2), cfg);
        CHECK(got == Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("exchanging two coordinates with symmetric weights") {
    auto w = WeightFamily::product(UnivariateRule::finite({0.6, 0.6}));
    auto cfg = base_config(3, 2, 1, 2, w);
    const Poly a = Poly::from_encoding(3, 1), b = Poly::from_encoding(3, 5);
    const double ea = criterion({}, a, cfg), eb = criterion({}, b, cfg);
    const double ab = criterion({a}, b, cfg), ba = criterion({b}, a, cfg);
    CHECK(ea + ab == Approx(eb + ba).epsilon(1e-12));
    CHECK(criterion({a}, a, cfg) == Approx(criterion({a}, a, cfg)));
}

TEST_CASE("exhaustive optimality in one dimension") {
    struct Case {
        std::uint32_t b;
        unsigned alpha;
        int m;
    };
    for (Case k : {Case{2, 1, 4}, Case{2, 2, 2}, Case{2, 2, 3}, Case{3, 1, 3}, Case{3, 2, 1}}) {
        auto cfg = base_config(k.b, k.m, k.alpha, 1, unit_weight());
        const auto res = cbc_construct(cfg);
        const Poly& p = res.spec.p;
        std::uint64_t total = 1;
        for (int i = 0; i < res.spec.n; ++i) total *= k.b;
        double best = 0.0;
        std::uint64_t best_code = 0;
        for (std::uint64_t code = 1; code < total; ++code) {
            const double v = oracle::univariate_wce_sq(k.alpha, 0.0, oracle_column(cfg, p, code));
            if (best_code == 0 || v < best * (1.0 - 1e-10)) {
                best = v;
                best_code = code;
            }
        }
        INFO("b=" << k.b << " alpha=" << k.alpha << " m=" << k.m);
        CHECK(res.spec.q[0].encode() == best_code);
        CHECK(res.per_component_criterion[0] == Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("additivity of the criterion") {
    auto w = WeightFamily::product(UnivariateRule::power_law(1.0, 4.0));
    auto cfg = base_config(2, 4, 2, 3, w);
    const auto res = cbc_construct(cfg);
    double prev = 0.0;
    for (std::size_t d = 1; d <= 3; ++d) {
        PolyLatticeSpec part = res.spec;
        part.q.erase(part.q.begin() + static_cast<std::ptrdiff_t>(d), part.q.end());
        const Quadrature q = lattice_quadrature(part, std::nullopt, 0.0);
        const double total = wce_total_sq(q, {cfg.kernel, restrict_to_prefix(w, d), {}}).value;
        CHECK(total == Approx(prev + res.per_component_criterion[d - 1]).epsilon(1e-10));
        prev = total;
    }
    CHECK(res.final_criterion == Approx(prev).epsilon(1e-10));
}

TEST_CASE("coordinatewise optimality") {
    auto w = WeightFamily::pod(OrderRule::factorial_power(1.0), UnivariateRule::power_law(0.5, 2.0));
    auto cfg = base_config(2, 3, 1, 3, w);
    const auto res = cbc_construct(cfg);
    for (std::size_t d = 0; d < 3; ++d) {
        std::vector<Poly> prefix(res.spec.q.begin(), res.spec.q.begin() + d);
        for (std::uint64_t code = 1; code < 8; ++code)
            CHECK(criterion(prefix, Poly::from_encoding(2, code), cfg) >=
                  res.per_component_criterion[d] * (1.0 - 1e-12));
    }
}

TEST_CASE("determinism and candidate caps") {
    auto cfg = base_config(2, 4, 2, 2, WeightFamily::product(UnivariateRule::power_law(1.0, 2.0)));
    cfg.shift_trials = 3;
    cfg.seed = 99;
    const auto r1 = cbc_construct(cfg), r2 = cbc_construct(cfg);
    CHECK(format_point_set(r1.spec) == format_point_set(r2.spec));
    CHECK(r1.per_component_criterion == r2.per_component_criterion);
    CHECK(r1.shift->digits == r2.shift->digits);
    CHECK(r1.final_criterion == r2.final_criterion);

    cfg.shift_trials = 0;
    cfg.candidate_cap = 100;
    CHECK_THROWS_AS(cbc_construct(cfg), Error);
    try {
        cbc_construct(cfg);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BudgetExceeded);
    }
    cfg.sample_size = 50;
    const auto s1 = cbc_construct(cfg), s2 = cbc_construct(cfg);
    CHECK(s1.log[0].candidate_count == 50);
    CHECK(s1.spec.q[1] == s2.spec.q[1]);
}

TEST_CASE("shift search") {
    auto cfg = base_config(2, 3, 1, 2, WeightFamily::product(UnivariateRule::power_law(1.0, 2.0)));
    const auto spec = cbc_construct(cfg).spec;
    cfg.seed = 5;
    cfg.shift_trials = 1;
    const auto one = shift_search(cfg, spec);
    CHECK(one.digits == shift_search(cfg, spec).digits);
    CHECK(one.prec == spec.n + 16);
    cfg.shift_trials = 32;
    CHECK(weighted_criterion(spec, shift_search(cfg, spec), cfg) <= weighted_criterion(spec, one, cfg));

    int better = 0;
    cfg.shift_trials = 64;
    const double unshifted = weighted_criterion(spec, std::nullopt, cfg);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.seed = seed;
        better += weighted_criterion(spec, shift_search(cfg, spec), cfg) <= unshifted;
    }
    CHECK(better >= 18);
}

TEST_CASE("theoretical bound") {
    auto cfg = base_config(2, 3, 2, 1, unit_weight());
    const double C = const_cbat(2, 2, 1.0), c3 = const_c3(2, 2);
    CHECK(theory_bound(cfg, 1.0) == Approx((1.0 + c3 * (1.0 + 2.0 * C)) / 8.0).epsilon(1e-12));
    const double tau = 1.5;
    const double want = std::pow(2.0, -tau * 3) *
                        std::pow(1.0 + std::pow(c3, 1.0 / tau) * (1.0 + 2.0 * const_cbat(2, 2, tau)), tau);
    CHECK(theory_bound(cfg, tau) == Approx(want).epsilon(1e-12));
    CHECK_THROWS_AS(theory_bound(cfg, 2.0), Error);
    for (int m = 1; m < 8; ++m) {
        auto a = cfg, b = cfg;
        a.m = m;
        b.m = m + 1;
        CHECK(theory_bound(b, 1.2) < theory_bound(a, 1.2));
    }

    for (std::size_t s = 1; s <= 3; ++s)
        for (int m = 2; m <= 4; ++m) {
            auto c = base_config(2, m, 2, s, WeightFamily::product(UnivariateRule::power_law(1.0, 4.0)));
            c.tau_report = {1.0, 1.5};
            const auto res = cbc_construct(c);
            for (double t : c.tau_report) {
                CHECK(std::sqrt(res.final_criterion) <= res.bound_values.at(t));
                CHECK(res.singleton_bound_holds.at(t));
            }
        }
}

TEST_CASE("output formats") {
    auto cfg = base_config(2, 2, 1, 1, unit_weight());
    const auto res = cbc_construct(cfg);
    CHECK(res.spec.q[0].encode() == 1);
    const std::string text = format_point_set(res.spec);
    CHECK(text.rfind("2 2 2 7 1\n", 0) == 0);
    const auto back = parse_point_set(text);
    CHECK(back.q == res.spec.q);
    CHECK(back.p == res.spec.p);
    const std::string log = format_criterion_log(res);
    CHECK(log.rfind("component,candidate_count,best_encoding,criterion\n1,3,1,", 0) == 0);
    CHECK_THROWS_AS(parse_point_set("2 2 2 6 1\n1\n"), Error);
}

TEST_CASE("running products match the generic criterion") {
    const auto gamma = UnivariateRule::power_law(0.8, 1.5);
    auto prod = base_config(2, 4, 2, 4, WeightFamily::product(gamma));
    auto pod = base_config(2, 4, 2, 4, WeightFamily::pod(OrderRule::constant(), gamma));
    prod.kernel.c = pod.kernel.c = 0.3;
    const auto a = cbc_construct(prod), b = cbc_construct(pod);
    CHECK(a.spec.q == b.spec.q);
    for (std::size_t d = 0; d < 4; ++d)
        CHECK(a.per_component_criterion[d] == Approx(b.per_component_criterion[d]).epsilon(1e-10));

    CBCBuilder builder(prod);
    builder.extend(2);
    builder.extend(4);
    CHECK(builder.spec().q == a.spec.q);
    CHECK(builder.column(3).size() == 16);
}

TEST_CASE("pairwise work cap limits later components") {
    auto cfg = base_config(2, 4, 2, 3, WeightFamily::product(UnivariateRule::power_law(1.0, 2.0)));
    cfg.pairwise_work = 16 * 16 * 20;
    const auto res = cbc_construct(cfg);
    CHECK(res.log[0].candidate_count == 255);
    CHECK(res.log[1].candidate_count == 20);
    CHECK(res.log[2].candidate_count == 20);
}
