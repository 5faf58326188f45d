#include "doctest.h"

#include <numeric>

#include "rcap/quadfield.hpp"

using namespace rcap;

namespace {

/* h(D) for D < 0 by brute-force counting of reduced forms ax^2+bxy+cy^2 */
long brute_h(long D)
{
    long h = 0;
    for (long a = 1; 3 * a * a <= -D; ++a)
        for (long b = -a + 1; b <= a; ++b) {
            long num = b * b - D;
            if (num % (4 * a))
                continue;
            long c = num / (4 * a);
            if (c < a || (c == a && b < 0))
                continue;
            long g = std::gcd(std::gcd(a, std::labs(b)), c);
            if (g == 1)
                ++h;
        }
    return h;
}

} // namespace

TEST_CASE("quadratic field basics")
{
    auto K = make_quadratic(-23);
    CHECK(K.D == -23);
    CHECK(K.t == 1);
    auto K2 = make_quadratic(2);
    CHECK(K2.D == 8);
    CHECK(K2.t == 0);
    CHECK_THROWS(make_quadratic(12));
    CHECK_THROWS(make_quadratic(1));
    auto [x, y] = K2.to_xy(K2.from_xy(6, 4));
    CHECK(x == 6);
    CHECK(y == 4);
}

TEST_CASE("prime decomposition in quadratic fields")
{
    auto K = make_quadratic(-1);
    CHECK(factor_prime(K, 2).kind == SplitKind::ramified);
    CHECK(factor_prime(K, 5).kind == SplitKind::split);
    CHECK(factor_prime(K, 3).kind == SplitKind::inert);
    auto K5 = make_quadratic(5);
    CHECK(factor_prime(K5, 5).kind == SplitKind::ramified);
    CHECK(factor_prime(K5, 11).kind == SplitKind::split);
    CHECK(factor_prime(K5, 2).kind == SplitKind::inert);
}

TEST_CASE("class numbers")
{
    CHECK(class_number(make_quadratic(-23)) == 3);
    CHECK(class_number(make_quadratic(-5)) == 2);
    CHECK(class_number(make_quadratic(-1)) == 1);
    CHECK(class_number(make_quadratic(-163)) == 1);
    CHECK(class_number(make_quadratic(2)) == 1);
    CHECK(class_number(make_quadratic(10)) == 2);
    CHECK(class_number(make_quadratic(34)) == 2);
    CHECK(class_number(make_quadratic(79)) == 3);
    CHECK(class_number(make_quadratic(229)) == 3);
    for (long d = -1; d >= -500; --d) {
        if (!is_squarefree(Integer(d)))
            continue;
        auto K = make_quadratic(d);
        CHECK(class_number(K) == brute_h(K.D.get_si()));
    }
    CHECK_THROWS_AS(class_number(make_quadratic(-1000003), 1000), bound_exceeded_error);
}

TEST_CASE("class groups")
{
    auto K = make_quadratic(-23);
    auto G = class_group(K);
    CHECK(G.group.describe() == "Z/3");
    auto K2 = make_quadratic(2);
    CHECK(class_group(K2).group.order() == 1);
    auto K34 = make_quadratic(34);
    CHECK(class_group(K34).group.describe() == "Z/2");
    auto K65 = make_quadratic(-65);
    auto G65 = class_group(K65);
    CHECK(G65.group.order() == 8);
    CHECK(G65.group.describe() == "Z/2 x Z/4");

    /* homomorphism on prime ideals */
    auto const & nf = K.field();
    for (u64 p : {2ul, 3ul, 13ul, 29ul}) {
        auto sd = factor_prime(K, p);
        for (auto const & P : sd.primes)
            for (u64 q : {3ul, 13ul}) {
                auto sq = factor_prime(K, q);
                auto const & Q = sq.primes[0];
                auto prod = ideal_mul(nf, P.ideal(), Q.ideal());
                CHECK(G.class_of(prod) == G.group.add(G.class_of(P.ideal()), G.class_of(Q.ideal())));
            }
    }
}

TEST_CASE("principal generators")
{
    auto K = make_quadratic(34);
    auto const & nf = K.field();
    for (u64 p : {3ul, 5ul, 11ul, 13ul}) {
        auto sd = factor_prime(K, p);
        for (auto const & P : sd.primes) {
            auto g = principal_generator(K, P.ideal());
            auto g2 = principal_generator(K, ideal_pow(nf, P.ideal(), 2));
            REQUIRE(g2);
            CHECK(generates(nf, *g2, ideal_pow(nf, P.ideal(), 2)));
            if (g)
                CHECK(generates(nf, *g, P.ideal()));
        }
    }
    auto Ki = make_quadratic(-5);
    auto P2 = factor_prime(Ki, 2).primes[0];
    CHECK_FALSE(principal_generator(Ki, P2.ideal()));
    auto g = principal_generator(Ki, ideal_pow(Ki.field(), P2.ideal(), 2));
    REQUIRE(g);
    CHECK(generates(Ki.field(), *g, ideal_pow(Ki.field(), P2.ideal(), 2)));
}

TEST_CASE("fundamental units")
{
    auto u2 = fundamental_unit(make_quadratic(2));
    CHECK(u2.x == 2);
    CHECK(u2.y == 1);   // 1 + sqrt 2 with D = 8
    CHECK(u2.norm == -1);
    auto u5 = fundamental_unit(make_quadratic(5));
    CHECK(u5.x == 1);
    CHECK(u5.y == 1);
    CHECK(u5.norm == -1);
    auto u34 = fundamental_unit(make_quadratic(34));
    CHECK(u34.x == 70);
    CHECK(u34.y == 6);   // 35 + 6 sqrt 34
    CHECK(u34.norm == 1);
    auto u94 = fundamental_unit(make_quadratic(94));
    CHECK(u94.x == 2 * 2143295);
    CHECK(u94.y == 221064);
    auto u3 = fundamental_unit(make_quadratic(3));
    CHECK(u3.x == 4);
    CHECK(u3.y == 1);
}

TEST_CASE("ray class groups")
{
    auto Ki = make_quadratic(-1);
    auto R = ray_class_group(Ki, modulus_from_integer(Ki, 3));
    CHECK(R.group.describe() == "Z/2");
    auto R5 = ray_class_group(Ki, modulus_from_integer(Ki, 5));
    CHECK(R5.order() == 4);   // (4*4)/4

    auto K = make_quadratic(-23);
    auto R7 = ray_class_group(K, modulus_from_integer(K, 7));
    /* 7 is inert: h * (49 - 1) / 2 */
    CHECK(R7.order() == 3 * 48 / 2);

    auto K2 = make_quadratic(2);
    auto m7 = modulus_from_integer(K2, 7);
    auto R27 = ray_class_group(K2, m7);
    CHECK(R27.order() * R27.unit_image_order == 36);

    /* order identity and homomorphism property on a real field with h = 2 */
    auto K34 = make_quadratic(34);
    auto m = modulus_from_integer(K34, 7);
    auto R34 = ray_class_group(K34, m);
    CHECK(R34.order() * R34.unit_image_order == 2 * R34.residues.order());
    auto const & nf = K34.field();
    std::vector<Ideal> ids;
    for (u64 p : {3ul, 5ul, 11ul, 13ul})
        for (auto const & P : factor_prime(K34, p).primes)
            ids.push_back(P.ideal());
    for (auto const & I : ids)
        for (auto const & J : ids)
            CHECK(R34.ray_class_of_ideal(ideal_mul(nf, I, J)) ==
                  R34.group.add(R34.ray_class_of_ideal(I), R34.ray_class_of_ideal(J)));
    /* principal elements: (x) class equals class_of_element */
    for (long a = 1; a < 6; ++a) {
        FieldElem x = K34.from_xy(2 * a, 2);
        auto I = principal_ideal(nf, nf.integral(x));
        if (!R34.residues.coprime(I))
            continue;
        CHECK(R34.ray_class_of_ideal(I) == R34.class_of_element(x));
    }
}

TEST_CASE("ray principal generators")
{
    auto K = make_quadratic(-23);
    auto m = modulus_from_integer(K, 7);
    auto R = ray_class_group(K, m);
    auto const & nf = K.field();
    int found = 0;
    for (u64 p = 2; p < 400 && found < 3; ++p) {
        if (!is_prime_u64(p) || p == 7)
            continue;
        for (auto const & P : factor_prime(K, p).primes) {
            auto gen = R.is_ray_principal(P.ideal());
            if (gen) {
                ++found;
                CHECK(generates(nf, *gen, P.ideal()));
                CHECK(R.residues.group().is_zero(R.residues.dlog(*gen)));
            }
        }
    }
    CHECK(found > 0);
}

TEST_CASE("augmented units")
{
    auto K2 = make_quadratic(2);
    auto e = aug_unit_mod_m(K2, Modulus{});
    CHECK(e.x == 6);
    CHECK(e.y == 2);   // 3 + 2 sqrt 2
    auto K34 = make_quadratic(34);
    auto e34 = aug_unit_mod_m(K34, Modulus{});
    CHECK(e34.x == 70);
    CHECK(e34.y == 6);
    auto m = modulus_from_integer(K2, 7);
    auto e7 = aug_unit_mod_m(K2, m);
    ResidueGroup RG(K2.field(), m.primes);
    CHECK(RG.group().is_zero(RG.dlog(e7.value)));
    CHECK(e7.norm == 1);
}
