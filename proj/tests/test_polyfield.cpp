#include "doctest.h"
#include "infint/error.hpp"
#include "infint/polyfield.hpp"
#include "oracles.hpp"

#include <random>

using namespace infint;

TEST_CASE("field axioms hold exhaustively for small primes") {
    for (std::uint32_t b : {2u, 3u, 5u}) {
        for (std::uint32_t x = 0; x < b; ++x)
            for (std::uint32_t y = 0; y < b; ++y)
                for (std::uint32_t z = 0; z < b; ++z) {
                    FbElem X(x, b), Y(y, b), Z(z, b);
                    CHECK((X + Y) + Z == X + (Y + Z));
                    CHECK((X * Y) * Z == X * (Y * Z));
                    CHECK(X * (Y + Z) == X * Y + X * Z);
                }
        for (std::uint32_t x = 1; x < b; ++x) CHECK((FbElem(x, b) * FbElem(x, b).inverse()).value() == 1);
        CHECK_THROWS_AS(FbElem(0, b).inverse(), Error);
    }
}

TEST_CASE("ring operations") {
    Poly x1(2, {1, 1});
    CHECK(poly_add(x1, x1).is_zero());
    CHECK(poly_mul(x1, x1) == Poly(2, {1, 0, 1}));
    auto [quot, rem] = poly_divmod(Poly(2, {0, 0, 0, 1}), Poly(2, {1, 1, 1}));
    CHECK(quot == Poly(2, {1, 1}));
    CHECK(rem == Poly(2, {1}));
    CHECK_THROWS_AS(poly_divmod(x1, Poly(2)), Error);
}

TEST_CASE("divmod reconstructs the dividend") {
    std::mt19937_64 rng(7);
    for (std::uint32_t b : {2u, 3u, 5u}) {
        for (int trial = 0; trial < 10000; ++trial) {
            std::vector<std::uint32_t> ca(rng() % 12), cd(1 + rng() % 6);
            for (auto& v : ca) v = rng() % b;
            for (auto& v : cd) v = rng() % b;
            Poly a(b, ca), d(b, cd);
            if (d.is_zero()) continue;
            auto [q, r] = poly_divmod(a, d);
            CHECK(r.degree() < d.degree());
            CHECK(poly_add(poly_mul(q, d), r) == a);
        }
    }
}

TEST_CASE("irreducibility") {
    CHECK(is_irreducible(Poly(2, {1, 1, 1})));
    CHECK_FALSE(is_irreducible(Poly(2, {1, 0, 1})));
    CHECK(is_irreducible(Poly(3, {0, 1})));
    CHECK(find_irreducible(2, 2) == Poly(2, {1, 1, 1}));
    CHECK(find_irreducible(2, 1) == Poly(2, {0, 1}));
    CHECK(find_irreducible(3, 2) == Poly(3, {1, 0, 1}));
    // root test is an independent irreducibility check for degrees 2 and 3
    for (std::uint32_t b : {2u, 3u, 5u})
        for (int deg : {2, 3}) {
            Poly p = find_irreducible(b, deg);
            for (std::uint32_t r = 0; r < b; ++r) {
                std::uint64_t v = 0, pw = 1;
                for (int i = 0; i <= deg; ++i) {
                    v = (v + p.coeff(i) * pw) % b;
                    pw = pw * r % b;
                }
                CHECK(v != 0);
            }
        }
}

TEST_CASE("encoding round trip") {
    Poly p = Poly::from_encoding(2, 7);
    CHECK(p == Poly(2, {1, 1, 1}));
    CHECK(p.encode() == 7);
    CHECK(Poly::from_encoding(3, 10) == Poly(3, {1, 0, 1}));
}

TEST_CASE("laurent digits") {
    Poly p(2, {1, 1, 1});
    CHECK(laurent_digits(Poly(2), p, 2).value() == 0.0);
    auto d1 = laurent_digits(Poly(2, {1}), p, 2);
    CHECK(d1.digits == std::vector<std::uint32_t>{0, 1});
    CHECK(d1.value() == 0.25);
    auto dx = laurent_digits(Poly(2, {0, 1}), p, 2);
    CHECK(dx.digits == std::vector<std::uint32_t>{1, 1});
    CHECK(dx.value() == 0.75);

    std::mt19937_64 rng(3);
    for (std::uint32_t b : {2u, 3u, 5u})
        for (int deg : {2, 4, 6}) {
            Poly p = find_irreducible(b, deg);
            for (int trial = 0; trial < 50; ++trial) {
                std::vector<std::uint32_t> g(deg);
                for (auto& v : g) v = rng() % b;
                auto got = laurent_digits(Poly(b, g), p, 3 * deg).digits;
                CHECK(got == oracle::laurent(g, p.coeffs(), 3 * deg, b));
            }
        }
}

TEST_CASE("exact multiples of p have no fractional digits") {
    Poly p = find_irreducible(3, 4);
    Poly g = poly_mul(Poly(3, {2, 1, 1}), p);
    for (auto t : laurent_digits(g, p, 10).digits) CHECK(t == 0);
}

TEST_CASE("digits of 1/(x^2+x+1) over F_2 have period 3") {
    auto d = laurent_digits(Poly(2, {1}), Poly(2, {1, 1, 1}), 30).digits;
    for (std::size_t i = 3; i < d.size(); ++i) CHECK(d[i] == d[i - 3]);
}
