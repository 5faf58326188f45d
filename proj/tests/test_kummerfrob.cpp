#include "doctest.h"

#include <random>

#include "rcap/kummerfrob.hpp"

using namespace rcap;

TEST_CASE("cyclotomic splitting")
{
    CHECK(is_split_cyclotomic(17, 2, 3, false));
    /* -1 is an 8th power mod 17: (-1)^((17-1)/8) = 1 */
    CHECK(powmod(16, 2, 17) == 1);
    CHECK(is_split_cyclotomic(17, 2, 3, true));
    CHECK(is_split_cyclotomic(7, 3, 1, false));
    CHECK_FALSE(is_split_cyclotomic(13, 2, 3, false));
    CHECK_FALSE(is_split_cyclotomic(41, 2, 3, true));
    /* the unit radical condition agrees with -1 being a 2^n-th power */
    for (u64 p : primes_up_to(2000)) {
        if (p < 3)
            continue;
        for (unsigned n = 1; n <= 4; ++n) {
            u64 level = ipow(2, n);
            if (p % level != 1)
                continue;
            bool minus_one_power = powmod(p - 1, (p - 1) / level, p) == 1;
            CHECK(is_split_cyclotomic(p, 2, n, true) == minus_one_power);
        }
    }
}

TEST_CASE("residue characters")
{
    auto c1 = residue_character(Integer(1), 17, 2, 3);
    CHECK(c1.order == 1);
    auto c2 = residue_character(Integer(2), 17, 2, 3);
    CHECK(c2.value == 4);
    CHECK(c2.order == 4);

    auto K = make_quadratic(2);
    auto eps = K.from_xy(6, 2);   // 3 + 2 sqrt 2
    u64 r = root_choice(K, 41);
    CHECK(2 * r < 41);
    auto a = residue_character(K, eps, 41, 2, 3, r);
    auto b = residue_character(K, eps, 41, 2, 3, 41 - r);
    CHECK(a.order == b.order);
    CHECK(mulmod(a.value, b.value, 41) == 1);

    /* multiplicativity */
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        u64 p = 0;
        while (!is_prime_u64(p) || p % 8 != 1 || kronecker(K.D, from_u64(p)) != 1)
            p = 17 + rng() % 100000;
        u64 rr = root_choice(K, p);
        FieldElem x = K.from_xy(2 * (1 + rng() % 50), 2 * (rng() % 50));
        FieldElem y = K.from_xy(2 * (1 + rng() % 50), 2 * (rng() % 50));
        auto xy = K.field().mul(x, y);
        if (reduce_at_root(K, x, p, rr) == 0 || reduce_at_root(K, y, p, rr) == 0)
            continue;
        auto cx = residue_character(K, x, p, 2, 3, rr);
        auto cy = residue_character(K, y, p, 2, 3, rr);
        auto cxy = residue_character(K, xy, p, 2, 3, rr);
        CHECK(cxy.value == mulmod(cx.value, cy.value, p));
        CHECK(cxy.exponent == (cx.exponent + cy.exponent) % 8);
    }

    /* distribution: exactly phi(l^n) (p-1)/l^n residues have full order */
    for (u64 p : primes_up_to(500))
        for (u64 ell : {2ul, 3ul})
            for (unsigned n = 1; n <= 3; ++n) {
                u64 level = ipow(ell, n);
                if (p < 3 || (p - 1) % level != 0)
                    continue;
                u64 full = 0;
                for (u64 x = 1; x < p; ++x)
                    if (character_of_residue(x, p, ell, n).order == level)
                        ++full;
                u64 phi = level - level / ell;
                CHECK(full == phi * (p - 1) / level);
            }
}

TEST_CASE("root choice fixes the prime above p")
{
    for (long d : {2L, 5L, 34L, -23L, 13L}) {
        auto K = make_quadratic(d);
        for (u64 p : primes_up_to(300)) {
            if (p < 3 || kronecker(K.D, from_u64(p)) != 1)
                continue;
            u64 r = root_choice(K, p);
            auto P = prime_at_root(K, p, r);
            auto Q = prime_at_root(K, p, p - r);
            CHECK_FALSE(P == Q);
            /* elements of P vanish at r */
            for (auto const & v : P.ideal().basis())
                CHECK(reduce_at_root(K, K.field().to_power(v), p, r) == 0);
        }
    }
}

TEST_CASE("h_K constant")
{
    auto K = make_quadratic(34);
    auto b2 = h_K_constant(K, 2);
    CHECK(b2.m_K == 1);
    CHECK(b2.first_layer_unramified);
    CHECK(b2.h_K == 2);
    auto b3 = h_K_constant(K, 3);
    CHECK(b3.m_K == 0);
    CHECK(b3.h_K == 0);
    auto K5 = make_quadratic(5);
    CHECK(h_K_constant(K5, 2).h_K == 1);
    CHECK(h_K_constant(make_quadratic(-1), 2).m_K == 2);
    CHECK(h_K_constant(make_quadratic(-3), 3).m_K == 1);
    CHECK_THROWS(h_K_constant(K, 5));
}

TEST_CASE("condition checks")
{
    auto K = make_quadratic(34);
    auto R = ray_class_group(K, Modulus{});
    auto eps = aug_unit_mod_m(K, Modulus{});
    SearchParams P;
    P.ell = 2;
    P.n = 1;
    P.h = 0;
    P.h_override = true;
    finalize_params(K, P);
    GroupElement target = R.group.reduce({1});
    /* (34/13) = -1 */
    auto r13 = check_conditions(K, R, target, eps, 13, P);
    CHECK(r13.failed == Check::i_prime);
    CHECK(check_conditions(K, R, target, eps, 5, P).ok());
    auto r7 = check_conditions(K, R, target, eps, 7, P);
    CHECK(r7.failed == Check::i_prime);
    CHECK(check_conditions(K, R, target, eps, 17, P).failed == Check::precondition);
    for (u64 p : primes_up_to(2000)) {
        if (p < 3)
            continue;
        auto res = check_conditions(K, R, target, eps, p, P);
        if (res.ok()) {
            CHECK(res.cert.checks == std::array<bool, 4>{true, true, true, true});
            CHECK(res.cert.chi_eps.order == 2);
            /* re-verification is byte-for-byte stable */
            auto again = check_conditions(K, R, target, eps, p, P);
            CHECK(again.cert.p_K == res.cert.p_K);
            CHECK(again.cert.r == res.cert.r);
        }
    }
    SearchParams bad;
    bad.n = 1;
    CHECK_THROWS(finalize_params(K, bad));   // default h = h_K = 2 >= n
}
