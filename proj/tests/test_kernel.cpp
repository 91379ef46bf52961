#include "doctest.h"
#include "infint/error.hpp"
#include "infint/kernel.hpp"
#include "oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <random>

using namespace infint;
using doctest::Approx;

namespace {

Quadrature random_quadrature(std::mt19937_64& rng, std::size_t n, std::uint32_t max_coord, double c) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Quadrature q;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::uint32_t> js;
        for (std::uint32_t j = 1; j <= max_coord; ++j)
            if (U(rng) < 0.6) js.push_back(j);
        QuadratureNode node{CoordinateSet(js), {}, U(rng) / double(n) * 2.0};
        for (std::size_t k = 0; k < js.size(); ++k) {
            double t = U(rng);
            if (t == c) t = 0.5;
            node.t.push_back(t);
        }
        q.nodes.push_back(node);
    }
    return q;
}

// e_u^2 straight from the kernel definition, O(n^2) with the oracle kernel.
double oracle_projected_sq(const Quadrature& q, const CoordinateSet& u, unsigned alpha, double c, double c0) {
    std::vector<std::vector<double>> t;
    std::vector<double> a;
    for (const auto& node : q.nodes) {
        if (!u.subset_of(node.support)) continue;
        std::vector<double> x;
        for (auto j : u) x.push_back(node.t[node.support.index_of(j)]);
        t.push_back(x);
        a.push_back(node.a);
    }
    double e2 = std::pow(c0, double(u.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        double g = 1.0;
        for (double x : t[i]) g *= oracle::kernel_row_integral(alpha, c, x);
        e2 -= 2.0 * a[i] * g;
        for (std::size_t k = 0; k < a.size(); ++k) {
            double kk = 1.0;
            for (std::size_t s = 0; s < u.size(); ++s) kk *= oracle::kernel(alpha, c, t[i][s], t[k][s]);
            e2 += a[i] * a[k] * kk;
        }
    }
    return e2;
}

}  // namespace

TEST_CASE("kernel values") {
    for (unsigned alpha : {1u, 2u, 3u}) CHECK(k1_eval({alpha, 0.3}, 0.3, 0.3) == 0.0);
    CHECK(k1_eval({1, 0.0}, 0.3, 0.7) == Approx(0.3).epsilon(1e-15));
    CHECK(k1_eval({2, 0.0}, 0.5, 1.0) == Approx(0.5 + 0.125 - 1.0 / 48.0).epsilon(1e-15));
    CHECK(k1_eval({2, 0.0}, 0.5, 1.0) == Approx(0.6041666666666666).epsilon(1e-15));
    CHECK(k1_eval({2, 0.5}, 0.2, 0.9) == 0.0);
}

TEST_CASE("closed forms agree with numerical quadrature") {
    for (unsigned alpha : {1u, 2u, 3u})
        for (double c : {0.0, 0.5, 1.0}) {
            AnchoredKernelParams p{alpha, c};
            AnchoredKernel k(p);
            for (double x : {0.05, 0.3, 0.5, 0.77, 1.0})
                for (double y : {0.0, 0.2, 0.5, 0.9})
                    CHECK(std::fabs(k.eval(x, y) - oracle::kernel(alpha, c, x, y)) < 1e-12);
            for (double x : {0.0, 0.1, 0.5, 0.6, 0.95, 1.0})
                CHECK(std::fabs(k.integral(x) - oracle::kernel_row_integral(alpha, c, x)) < 1e-12);
            auto row = [&](double x) { return oracle::kernel_row_integral(alpha, c, x); };
            const double c0 = oracle::integrate(row, 0, c) + oracle::integrate(row, c, 1);
            const double m = oracle::integrate([&](double x) { return oracle::kernel(alpha, c, x, x); }, 0, 1);
            CHECK(std::fabs(k.c0() - c0) < 1e-10);
            CHECK(std::fabs(k.m() - m) < 1e-10);
            CHECK(k.c0() > 0.0);
            CHECK(k.c0() <= k.m());
        }
    auto [c0, m] = c0_m_constants({1, 0.0});
    CHECK(c0 == 1.0 / 3.0);
    CHECK(m == 0.5);
    auto [c1, m1] = c0_m_constants({1, 1.0});
    CHECK(c1 == 1.0 / 3.0);
    CHECK(m1 == 0.5);
    CHECK(k1_int({1, 0.0}, 1.0) == 0.5);
    CHECK(k1_int({2, 0.4}, 0.4) == 0.0);
}

TEST_CASE("tensor kernel") {
    AnchoredKernelParams p{1, 0.0};
    CHECK(tensor_kernel_eval(p, {}, {}, {}) == 1.0);
    CHECK(tensor_kernel_eval(p, {1, 2}, {0.5, 0.5}, {1.0, 0.25}) == 0.125);
    CHECK(tensor_kernel_eval(p, {1, 2}, {0.5, 0.0}, {1.0, 0.25}) == 0.0);
    CHECK(tensor_kernel_eval({2, 0.3}, {4, 7}, {0.3, 0.9}, {0.6, 0.8}) == 0.0);
}

TEST_CASE("gram matrices are positive semidefinite") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        const unsigned alpha = 1 + trial % 3;
        const double c = (trial % 5) / 4.0;
        AnchoredKernel k({alpha, c});
        const int n = 2 + trial % 7, s = 1 + trial % 3;
        std::vector<std::vector<double>> x(n, std::vector<double>(s));
        for (auto& row : x)
            for (auto& v : row) v = U(rng);
        Eigen::MatrixXd G(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double prod = 1.0;
                for (int d = 0; d < s; ++d) prod *= k.eval(x[i][d], x[j][d]);
                G(i, j) = prod;
            }
        CHECK((G - G.transpose()).norm() == 0.0);
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().minCoeff() >= -1e-10);
    }
}

TEST_CASE("fast univariate gram sum") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0, 1);
    for (unsigned alpha : {1u, 2u, 3u, 4u})
        for (double c : {0.0, 0.35, 1.0}) {
            AnchoredKernel k({alpha, c});
            std::vector<double> t(60), a(60);
            for (int i = 0; i < 60; ++i) {
                t[i] = i % 7 == 0 ? t[std::max(0, i - 1)] : U(rng);
                a[i] = U(rng) - 0.3;
            }
            long double direct = 0.0L;
            for (int i = 0; i < 60; ++i)
                for (int j = 0; j < 60; ++j) direct += a[i] * a[j] * static_cast<long double>(k.eval(t[i], t[j]));
            CHECK(double(k.gram_sum(t, a)) == Approx(double(direct)).epsilon(1e-12));
        }
}

TEST_CASE("unit-weight sums over sorted nodes") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(0, 1);
    for (unsigned alpha : {1u, 2u, 3u})
        for (double c : {0.0, 0.35, 1.0}) {
            AnchoredKernel k({alpha, c});
            std::vector<double> t(40);
            for (auto& x : t) x = U(rng);
            t[5] = t[6];
            t[7] = c;
            std::sort(t.begin(), t.end());
            double lin = 0.0, quad = 0.0;
            for (double x : t) {
                lin += oracle::kernel_row_integral(alpha, c, x);
                for (double y : t) quad += oracle::kernel(alpha, c, x, y);
            }
            const auto [l, q] = k.unit_sums(t);
            CHECK(double(l) == Approx(lin).epsilon(1e-11));
            CHECK(double(q) == Approx(quad).epsilon(1e-11));
        }
}

TEST_CASE("projected errors") {
    AnchoredKernelParams p{1, 0.0};
    Quadrature one;
    one.nodes.push_back({CoordinateSet{1}, {0.5}, 1.0});
    CHECK(wce_projected_sq(one, CoordinateSet{1}, AnchoredKernel(p)) == Approx(1.0 / 12).epsilon(1e-14));
    CHECK(wce_projected(one, CoordinateSet{1}, p) == Approx(0.2886751345948129).epsilon(1e-14));

    Quadrature empty;
    CHECK(wce_projected(empty, CoordinateSet{1, 2}, p) == Approx(1.0 / 3.0).epsilon(1e-15));
    // nodes that do not cover u contribute nothing
    Quadrature off;
    off.nodes.push_back({CoordinateSet{1}, {0.25}, 3.0});
    off.nodes.push_back({CoordinateSet{2, 3}, {0.5, 0.7}, -2.0});
    CHECK(wce_projected_sq(off, CoordinateSet{1, 2}, AnchoredKernel(p)) == Approx(1.0 / 9.0).epsilon(1e-15));

    std::mt19937_64 rng(1);
    for (unsigned alpha : {1u, 2u, 3u}) {
        const double c = alpha == 2 ? 0.5 : 0.0;
        AnchoredKernel k({alpha, c});
        auto q = random_quadrature(rng, 12, 3, c);
        for (CoordinateSet u : {CoordinateSet{1}, CoordinateSet{2, 3}, CoordinateSet{1, 2, 3}}) {
            const double want = oracle_projected_sq(q, u, alpha, c, k.c0());
            CHECK(wce_projected_sq(q, u, k) == Approx(want).epsilon(1e-9));
            // invariant under extra nodes whose supports miss part of u
            auto q2 = q;
            q2.nodes.push_back({CoordinateSet{9}, {0.3}, 5.0});
            CHECK(wce_projected_sq(q2, u, k) == Approx(wce_projected_sq(q, u, k)).epsilon(1e-14));
        }
    }
}

TEST_CASE("subset error sums match per-set errors") {
    std::mt19937_64 rng(2);
    AnchoredKernel k({2, 0.0});
    auto q = random_quadrature(rng, 15, 4, 0.0);
    const CoordinateSet v{1, 2, 4};
    std::vector<WeightFamily> fams = {
        WeightFamily::product(UnivariateRule::power_law(1, 3)),
        cutoff(WeightFamily::product(UnivariateRule::power_law(0.8, 2)), 2),
        WeightFamily::pod(OrderRule::factorial_power(1.0), UnivariateRule::power_law(0.5, 2)),
        WeightFamily::explicit_map({{CoordinateSet{1, 4}, 0.3}, {CoordinateSet{2}, 0.7}, {CoordinateSet{3}, 9.0}}),
    };
    for (const auto& w : fams) {
        double want = 0.0;
        for (std::uint32_t mask = 1; mask < 8; ++mask) {
            std::vector<std::uint32_t> u;
            for (int b = 0; b < 3; ++b)
                if (mask >> b & 1) u.push_back(v[b]);
            CoordinateSet us(u);
            want += weight_of(w, us) * wce_projected_sq(q, us, k);
        }
        CHECK(subset_error_sum(q, v, w, k) == Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("total error") {
    AnchoredKernelParams p{1, 0.0};
    WeightedSpaceSpec single{p, WeightFamily::explicit_map({{CoordinateSet{1}, 1.0}}), {}};
    Quadrature one;
    one.nodes.push_back({CoordinateSet{1}, {0.5}, 1.0});
    CHECK(wce_total(one, single).value == Approx(wce_projected(one, CoordinateSet{1}, p)).epsilon(1e-14));
    CHECK(operator_norm(single) == Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-15));
    CHECK(wce_total(Quadrature{}, single).value == Approx(operator_norm(single)).epsilon(1e-15));

    // product weights: brute force over subsets of [8] plus the closed-form weight outside [8]
    WeightedSpaceSpec prod{{2, 0.0}, WeightFamily::product(UnivariateRule::power_law(1, 3)), {}};
    AnchoredKernel k(prod.kernel);
    std::mt19937_64 rng(4);
    auto q = random_quadrature(rng, 10, 4, 0.0);
    long double bf = std::pow(1.0L - q.coefficient_sum(), 2.0L);
    for (std::uint32_t mask = 1; mask < 256; ++mask) {
        std::vector<std::uint32_t> u;
        for (int b = 0; b < 8; ++b)
            if (mask >> b & 1) u.push_back(b + 1);
        CoordinateSet us(u);
        bf += weight_of(prod.weights, us) * wce_projected_sq(q, us, k);
    }
    long double all = 1.0L, inside = 1.0L;
    for (int j = 1; j <= 2000000; ++j) {
        const long double f = 1.0L + k.c0() * std::pow(static_cast<long double>(j), -3.0L);
        all *= f;
        if (j <= 8) inside *= f;
    }
    bf += all - inside;
    auto got = wce_total_sq(q, prod);
    CHECK(got.value == Approx(double(bf)).epsilon(1e-10));
    CHECK(got.bound < 1e-10);
    CHECK(wce_total(Quadrature{}, prod).value == Approx(operator_norm(prod)).epsilon(1e-14));

    // raising one weight never lowers the error
    auto ex = WeightFamily::explicit_map({{CoordinateSet{1}, 1.0}, {CoordinateSet{1, 2}, 0.5}});
    auto ex2 = WeightFamily::explicit_map({{CoordinateSet{1}, 1.0}, {CoordinateSet{1, 2}, 0.9}});
    CHECK(wce_total(q, {p, ex2, {}}).value >= wce_total(q, {p, ex, {}}).value);
}

TEST_CASE("negative quadratic forms beyond roundoff are reported") {
    CHECK_THROWS_AS(Quadrature::parse("v: 1 | 0 | 1\n").check_admissible(0.0), Error);
}
