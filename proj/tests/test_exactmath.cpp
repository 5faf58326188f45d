#include "doctest.h"

#include <random>

#include "rcap/exactmath.hpp"

using namespace rcap;

TEST_CASE("factor examples")
{
    CHECK(factor(Integer(1)).empty());
    CHECK(factor(Integer(360)) == std::vector<PrimePower>{{2, 3}, {3, 2}, {5, 1}});
    CHECK(factor(Integer(2147483647)) == std::vector<PrimePower>{{2147483647, 1}});
    CHECK(factor(Integer(-12)) == std::vector<PrimePower>{{2, 2}, {3, 1}});
    CHECK_THROWS_AS(factor(Integer(0)), std::invalid_argument);
}

TEST_CASE("factor inverts multiplication")
{
    std::mt19937_64 rng(7);
    for (int it = 0; it < 10000; ++it) {
        u64 a = rng() % 1000000 + 1, b = rng() % 1000000 + 1;
        Integer n = from_u64(a) * from_u64(b);
        Integer back = 1;
        u64 last = 0;
        for (auto const & pp : factor(n)) {
            REQUIRE(pp.p > last);
            REQUIRE(is_prime_u64(pp.p));
            last = pp.p;
            for (unsigned k = 0; k < pp.k; ++k)
                back *= from_u64(pp.p);
        }
        REQUIRE(back == n);
    }
}

TEST_CASE("large semiprime factors")
{
    Integer n = from_u64(4294967291ULL) * from_u64(4294967279ULL);
    auto f = factor(n);
    REQUIRE(f.size() == 2);
    CHECK(f[0].p == 4294967279ULL);
    CHECK(f[1].p == 4294967291ULL);
    Integer big = Integer(1) << 70;
    CHECK_THROWS_AS(is_prime(big), out_of_range_error);
}

TEST_CASE("primality against sieve")
{
    auto ps = primes_up_to(100000);
    size_t k = 0;
    for (u64 n = 0; n <= 100000; ++n) {
        bool sieve = k < ps.size() && ps[k] == n;
        if (sieve)
            ++k;
        REQUIRE(is_prime_u64(n) == sieve);
    }
    CHECK(is_prime_u64(18446744073709551557ULL));
    CHECK_FALSE(is_prime_u64(3215031751ULL));
}

TEST_CASE("primes in progression")
{
    CHECK(primes_in_progression(1, 4, 30) == std::vector<u64>{5, 13, 17, 29});
    CHECK(primes_in_progression(1, 8, 100) == std::vector<u64>{17, 41, 73, 89, 97});
    CHECK_THROWS_AS(primes_in_progression(2, 4, 100), std::invalid_argument);
}

TEST_CASE("segmented sieve matches plain sieve")
{
    std::vector<u64> seg;
    for_each_prime(999000, 1001000, [&](u64 p) {
        seg.push_back(p);
        return true;
    });
    std::vector<u64> plain;
    for (u64 p : primes_up_to(1001000))
        if (p >= 999000)
            plain.push_back(p);
    CHECK(seg == plain);
}

TEST_CASE("roots mod p examples")
{
    CHECK(roots_mod_p(PolyModP({1, 0, 1}, 5)) == std::vector<u64>{2, 3});
    CHECK(roots_mod_p(PolyModP({1, 0, 1}, 7)).empty());
    CHECK(roots_mod_p(PolyModP({11 - 3, 1}, 11)) == std::vector<u64>{3});
    CHECK_THROWS(roots_mod_p(PolyModP({}, 7)));
}

TEST_CASE("roots mod p agree with exhaustive evaluation")
{
    std::mt19937_64 rng(11);
    auto ps = primes_up_to(1000);
    for (int it = 0; it < 400; ++it) {
        u64 p = ps[rng() % ps.size()];
        int deg = 1 + rng() % 6;
        std::vector<u64> c(deg + 1);
        for (auto & x : c)
            x = rng() % p;
        c.back() = 1 + rng() % (p - 1);
        PolyModP f(c, p);
        std::vector<u64> brute;
        for (u64 x = 0; x < p; ++x)
            if (f(x) == 0)
                brute.push_back(x);
        REQUIRE(roots_mod_p(f) == brute);
    }
}

TEST_CASE("distinct degree factorization")
{
    /* x^4 + 1 mod 3 = (x^2 + x + 2)(x^2 + 2x + 2) */
    CHECK(factor_degrees(PolyModP({1, 0, 0, 0, 1}, 3)) == std::vector<int>{2, 2});
    /* x^3 - 2 mod 7: 2 is not a cube mod 7 */
    CHECK(factor_degrees(PolyModP({5, 0, 0, 1}, 7)) == std::vector<int>{3});
    CHECK(factor_degrees(PolyModP({6, 0, 1}, 5)) == std::vector<int>{1, 1});
}

TEST_CASE("modular helpers")
{
    for (u64 p : {3ULL, 5ULL, 13ULL, 17ULL, 1000003ULL, 998244353ULL}) {
        for (u64 a = 1; a < 50; ++a) {
            if (kronecker(Integer(static_cast<unsigned long>(a)), from_u64(p)) != 1)
                continue;
            u64 r = sqrt_mod_p(a, p);
            REQUIRE(mulmod(r, r, p) == a % p);
        }
    }
    CHECK(multiplicative_order(2, 17, 16) == 8);
    CHECK(multiplicative_order(3, 7, 6) == 6);
    CHECK(squarefree_part(Integer(-72)) == -2);
    CHECK(is_squarefree(Integer(34)));
    CHECK_FALSE(is_squarefree(Integer(12)));
    Integer r;
    CHECK(is_square(Integer(144), &r));
    CHECK(r == 12);
    CHECK(floor_div(Integer(-7), Integer(2)) == -4);
    CHECK(mod_floor(Integer(-7), Integer(3)) == 2);
}
