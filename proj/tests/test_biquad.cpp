#include "doctest.h"

#include <random>

#include "rcap/biquad.hpp"
#include "rcap/capsearch.hpp"

using namespace rcap;

namespace {

Integer quad_disc(Integer const & d)
{
    Integer m = mod_floor(d, Integer(4));
    return m == 1 ? d : 4 * d;
}

} // namespace

TEST_CASE("biquadratic construction")
{
    for (auto [d, p] : {std::pair<long, long>{2, 5}, {34, 5}, {3, 7}, {-1, 5}, {6, 10}, {5, 13}}) {
        auto L = make_biquadratic(Integer(d), Integer(p));
        Integer s = squarefree_part(Integer(d * p));
        Integer prod = quad_disc(Integer(d)) * quad_disc(Integer(p)) * quad_disc(s);
        CHECK(abs(L.field().discriminant()) == abs(prod));
        CHECK(L.field().degree() == 4);
        /* subfield embeddings are ring maps */
        for (size_t i = 0; i < 3; ++i) {
            auto const & Ki = L.quads[i].field();
            FieldElem a = Ki.from_int(3), b = Ki.sqrt_radicand(0);
            FieldElem x = Ki.add(a, b);
            FieldElem y = Ki.mul(x, x);
            CHECK(L.embed(i, y) == L.field().mul(L.embed(i, x), L.embed(i, x)));
            CHECK(L.restrict_to(i, L.embed(i, x)) == x);
            CHECK(L.field().conj(L.embed(i, x), BiquadField::fixing_mask(i)) == L.embed(i, x));
        }
    }
    auto L25 = make_biquadratic(2, 5);
    CHECK(L25.field().discriminant() == 1600);
    CHECK_THROWS(make_biquadratic(2, 2));
    CHECK_THROWS(make_biquadratic(2, 8));
    CHECK_THROWS(make_biquadratic(3, 12));
}

TEST_CASE("prime decomposition in L / K")
{
    auto L = make_biquadratic(34, 5);
    auto const & K = L.quads[0];
    int checked = 0;
    for_each_prime(3, 600, [&](u64 q) {
        for (auto const & P : primes_above(K.field(), q)) {
            auto fac = extend_and_factor(L, 0, P);
            int s = 0;
            for (auto const & f : fac)
                s += f.exponent * f.P.f() / P.f();
            CHECK(s == 2);
            /* contraction recovers the prime below */
            for (auto const & f : fac)
                CHECK(L.contract(0, f.P.ideal()) == P.ideal());
            CHECK(L.contract(0, L.extend(0, P.ideal())) == P.ideal());
            ++checked;
        }
        /* no rational prime is inert in a biquadratic field */
        CHECK(primes_above(L.field(), q).size() + 0 >= 1);
        int sum = 0;
        for (auto const & Q : primes_above(L.field(), q))
            sum += Q.e() * Q.f();
        CHECK(sum == 4);
        for (auto const & Q : primes_above(L.field(), q))
            CHECK(Q.f() <= 2);
        return true;
    });
    CHECK(checked > 100);
}

TEST_CASE("unit groups")
{
    for (auto [d, p] : {std::pair<long, long>{2, 5}, {34, 5}, {2, 3}, {3, 7}, {5, 13}, {6, 10}, {2, 17}}) {
        auto L = make_biquadratic(Integer(d), Integer(p));
        auto U = unit_group(L);
        CHECK(U.gens.size() == 3);
        for (auto const & u : U.gens) {
            Rational N = L.field().norm(u);
            CHECK((N == 1 || N == -1));
            CHECK(L.field().is_integral(u));
            CHECK(L.field().is_integral(L.field().inverse(u)));
        }
        CHECK((U.index == 1 || U.index == 2 || U.index == 4 || U.index == 8));
        CHECK(U.regulator > 0);
    }
    /* Q(sqrt 2, sqrt 5): sqrt(eps_2 eps_5 eps_10) is a unit */
    auto U = unit_group(make_biquadratic(2, 5));
    CHECK(U.index == 2);
    /* Q(sqrt 2, sqrt 3): sqrt(eps_2 eps_6) and sqrt(eps_3 eps_6) ... index 4 */
    auto U23 = unit_group(make_biquadratic(2, 3));
    CHECK(U23.index == 4);
}

TEST_CASE("principal ideals round trip")
{
    std::mt19937_64 rng(5);
    int done = 0;
    for (auto [d, p] : {std::pair<long, long>{2, 5}, {34, 5}, {3, 7}, {5, 13}, {2, 3}}) {
        auto L = make_biquadratic(Integer(d), Integer(p));
        auto U = unit_group(L);
        auto const & nf = L.field();
        FPOptions serial;
        serial.jobs = 1;
        for (int k = 0; k < 40; ++k) {
            ZVec v(4);
            for (auto & c : v)
                c = static_cast<long>(rng() % 13) - 6;
            if (nf.norm(v) == 0)
                continue;
            Ideal I = principal_ideal(nf, v);
            auto r = is_principal(L, U, I);
            REQUIRE(r.status == PrincipalStatus::principal);
            CHECK(generates(nf, r.generator, I));
            auto s = fp_find_generator(nf, U.gens, I, serial);
            CHECK(s.status == FPStatus::found);
            ++done;
        }
    }
    CHECK(done > 150);
}

TEST_CASE("Hilbert 90 test agrees with enumeration")
{
    auto L = make_biquadratic(34, 5);
    auto U = unit_group(L);
    auto const & K = L.quads[0];
    int principal = 0, non = 0;
    for_each_prime(2, 120, [&](u64 q) {
        for (auto const & P : primes_above(K.field(), q)) {
            Ideal I = L.extend(0, P.ideal());
            auto a = is_principal_ambiguous(L, U, I);
            auto b = is_principal(L, U, I);
            CHECK(a.status == b.status);
            if (a.status == PrincipalStatus::principal) {
                CHECK(generates(L.field(), a.generator, I));
                ++principal;
            } else {
                ++non;
            }
            for (auto const & f : extend_and_factor(L, 0, P)) {
                if (f.exponent != 2)
                    continue;
                auto a2 = is_principal_ambiguous(L, U, f.P.ideal());
                auto b2 = is_principal(L, U, f.P.ideal());
                CHECK(a2.status == b2.status);
                if (a2.status == PrincipalStatus::not_principal)
                    ++non;
            }
        }
        return true;
    });
    /* Cl(K) = Z/2 capitulates in L: every extended ideal is principal */
    CHECK(principal > 0);
    CHECK(non > 0);
}

TEST_CASE("capitulation of the Q(sqrt 34) certificate")
{
    auto K = make_quadratic(34);
    auto R = ray_class_group(K, Modulus{});
    SearchParams P;
    P.n = 1;
    P.h = 0;
    P.h_override = true;
    P.bound = 1000;
    finalize_params(K, P);
    auto ctx = make_context(K, R, select_target(R.group, "auto-2"), aug_unit_mod_m(K, Modulus{}), P);
    auto res = find_principalizing_prime(ctx);
    REQUIRE(res.status == SearchStatus::found);
    auto rep = capitulates(*res.cert);
    CHECK(rep.conditions_ok);
    CHECK(rep.status == VerifyStatus::success);
    CHECK(rep.extended.ray_principal);
    CHECK(rep.extended.crosschecked);
    /* N(q_L) = p_K lies in the nontrivial class, so q_L cannot be principal */
    CHECK(!rep.q_L.principal);
    CHECK(rep.q_L.crosschecked);
    /* a tampered certificate is rejected by the re-check */
    auto bad = *res.cert;
    bad.p = 13;
    auto r2 = capitulates(bad);
    CHECK(r2.status == VerifyStatus::fail);
    CHECK(!r2.conditions_ok);
}
