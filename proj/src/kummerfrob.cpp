#include "rcap/kummerfrob.hpp"

#include <numeric>

namespace rcap {

u64 ipow(u64 b, unsigned e)
{
    u64 r = 1;
    while (e--)
        r *= b;
    return r;
}

u64 primitive_root(u64 p)
{
    if (p == 2)
        return 1;
    auto qs = prime_divisors(p - 1);
    for (u64 g = 2; g < p; ++g) {
        bool ok = true;
        for (u64 q : qs)
            if (powmod(g, (p - 1) / q, p) == 1) {
                ok = false;
                break;
            }
        if (ok)
            return g;
    }
    throw std::logic_error("no primitive root");
}

bool is_split_cyclotomic(u64 p, u64 ell, unsigned n, bool includes_sqrt_units)
{
    u64 level = ipow(ell, n);
    if (ell == 2 && includes_sqrt_units)
        level *= 2;
    return p % level == 1;
}

u64 root_choice(QuadraticField const & K, u64 p)
{
    Integer Dm = mod_floor(K.D, from_u64(p));
    u64 a = to_u64(Dm);
    if (a == 0 || kronecker(K.D, from_u64(p)) != 1)
        throw std::invalid_argument("p does not split in K");
    u64 r = sqrt_mod_p(a, p);
    return std::min(r, p - r);
}

namespace {

u64 reduce_rational(Rational const & q, u64 p)
{
    Integer P = from_u64(p);
    Integer den = mod_floor(q.get_den(), P);
    if (den == 0)
        throw std::invalid_argument("denominator divisible by p");
    u64 num = to_u64(mod_floor(q.get_num(), P));
    return mulmod(num, invmod(to_u64(den), p), p);
}

} // namespace

u64 reduce_at_root(QuadraticField const & K, FieldElem const & eta, u64 p, u64 r)
{
    u64 s = K.t == 1 ? r : mulmod(r, invmod(2, p), p);   // image of sqrt d
    u64 a0 = reduce_rational(eta[0], p), a1 = reduce_rational(eta[1], p);
    return (a0 + mulmod(a1, s, p)) % p;
}

PrimeIdeal prime_at_root(QuadraticField const & K, u64 p, u64 r)
{
    /* w = (t + sqrt D)/2 -> (t + r)/2 */
    u64 w0 = mulmod((static_cast<u64>(K.t) + r) % p, invmod(2, p), p);
    ZVec v{-from_u64(w0), 1};
    for (auto & P : primes_above(K.field(), p))
        if (P.contains(v))
            return P;
    throw std::invalid_argument("no prime above p matches the root");
}

ResidueCharacter character_of_residue(u64 x, u64 p, u64 ell, unsigned n)
{
    ResidueCharacter c;
    c.p = p;
    c.ell = ell;
    c.n = n;
    c.level = ipow(ell, n);
    if ((p - 1) % c.level != 0)
        throw std::invalid_argument("p is not 1 mod l^n");
    x %= p;
    if (x == 0)
        throw std::invalid_argument("element vanishes mod p");
    u64 k = (p - 1) / c.level;
    c.value = powmod(x, k, p);
    u64 zeta = powmod(primitive_root(p), k, p);
    auto e = bsgs_dlog(zeta, c.value, p, c.level);
    if (!e)
        throw std::logic_error("character value outside mu_{l^n}");
    c.exponent = *e;
    c.order = c.level / std::gcd(c.exponent, c.level);
    /* measured order by repeated l-th powers */
    u64 v = c.value, measured = 1;
    while (v != 1) {
        v = powmod(v, ell, p);
        measured *= ell;
    }
    if (measured != c.order)
        throw std::logic_error("character order mismatch");
    return c;
}

ResidueCharacter residue_character(Integer const & a, u64 p, u64 ell, unsigned n)
{
    return character_of_residue(to_u64(mod_floor(a, from_u64(p))), p, ell, n);
}

ResidueCharacter residue_character(QuadraticField const & K, FieldElem const & eta, u64 p, u64 ell, unsigned n,
                                   u64 r)
{
    if (kronecker(K.D, from_u64(p)) != 1)
        throw std::invalid_argument("p is not split in K");
    return character_of_residue(reduce_at_root(K, eta, p, r), p, ell, n);
}

HKBreakdown h_K_constant(QuadraticField const & K, u64 ell)
{
    if (ell != 2 && ell != 3)
        throw std::invalid_argument("only l = 2 and l = 3 are supported");
    HKBreakdown b;
    b.ell = ell;
    if (ell == 2)
        b.m_K = K.d == -1 ? 2 : 1;
    else
        b.m_K = K.d == -3 ? 1 : 0;
    if (ell == 2 && K.d != 2) {
        /* K(sqrt 2)/K is unramified at finite places iff disc(K(sqrt 2)) = disc(K)^2,
         * i.e. 8 |disc Q(sqrt 2d')| = |D_K| */
        Integer s = squarefree_part(2 * K.d);
        Integer D3 = mod_floor(s, 4) == 1 ? s : 4 * s;
        b.first_layer_unramified = 8 * abs(D3) == abs(K.D);
    }
    b.h_K = b.m_K + (b.first_layer_unramified ? 1 : 0);
    b.detail = "l^m_K = " + std::to_string(ipow(ell, b.m_K)) + ", [H_K cap K_inf : K] = " +
               (b.first_layer_unramified ? std::to_string(ell) : "1");
    return b;
}

void finalize_params(QuadraticField const & K, SearchParams & params)
{
    if (params.ell != 2 && params.ell != 3)
        throw std::invalid_argument("l must be 2 or 3");
    if (params.n == 0 || ipow(params.ell, params.n) > (1u << 20))
        throw std::invalid_argument("l^n out of the supported range");
    params.h_K = h_K_constant(K, params.ell).h_K;
    if (!params.h_override)
        params.h = params.h_K;
    if (params.h >= params.n)
        throw std::invalid_argument("need n > h (h = " + std::to_string(params.h) + ")");
}

std::string to_string(Check c)
{
    switch (c) {
    case Check::none:
        return "none";
    case Check::precondition:
        return "precondition";
    case Check::i_prime:
        return "i'";
    case Check::ii:
        return "ii";
    case Check::iii:
        return "iii";
    case Check::iv:
        return "iv";
    }
    return "?";
}

SearchContext make_context(QuadraticField const & K, RayClassGroup const & rcg, GroupElement const & target,
                           QuadUnit const & eps, SearchParams const & params)
{
    SearchContext ctx;
    ctx.K = &K;
    ctx.rcg = &rcg;
    ctx.target = rcg.group.reduce(target);
    ctx.eps = eps;
    ctx.params = params;
    ctx.excluded = 2 * from_u64(params.ell) * abs(K.D) * rcg.modulus.norm();
    ctx.iv = power_subgroup_contains(rcg.group, ctx.target, from_u64(ipow(params.ell, params.h)));
    return ctx;
}

CheckResult check_conditions(SearchContext const & ctx, u64 p)
{
    QuadraticField const & K = *ctx.K;
    SearchParams const & P = ctx.params;
    CheckResult res;
    CandidateCertificate & c = res.cert;
    c.d = K.d;
    c.modulus = modulus_spec(K, ctx.rcg->modulus);
    c.modulus_text = ctx.rcg->modulus.describe();
    c.group = ctx.rcg->group.describe();
    c.target = ctx.target;
    c.ell = P.ell;
    c.n = P.n;
    c.h = P.h;
    c.h_K = P.h_K;
    c.p = p;
    c.eps_x = ctx.eps.x;
    c.eps_y = ctx.eps.y;
    c.bound = P.bound;
    auto fail = [&](Check k, std::string why) {
        res.failed = k;
        res.reason = std::move(why);
        return res;
    };
    if (!is_prime_u64(p) || mpz_divisible_ui_p(ctx.excluded.get_mpz_t(), p))
        return fail(Check::precondition, "p must be a prime not dividing 2 l disc(K) N(m)");

    if (!is_split_cyclotomic(p, P.ell, P.n, true))
        return fail(Check::i_prime, "p is not 1 mod the cyclotomic level");
    if (kronecker(K.D, from_u64(p)) != 1)
        return fail(Check::i_prime, "p does not split in K");
    c.r = root_choice(K, p);
    c.checks[0] = true;

    PrimeIdeal pK = prime_at_root(K, p, c.r);
    c.p_K = pK.describe();
    c.chi_minus_one = residue_character(Integer(-1), p, P.ell, P.n);
    c.chi_eps = residue_character(K, ctx.eps.value, p, P.ell, P.n, c.r);

    if (!(ctx.rcg->ray_class_of_ideal(pK.ideal()) == ctx.target))
        return fail(Check::ii, "p_K is not in the target class");
    c.checks[1] = true;

    if (c.chi_eps.order != ipow(P.ell, P.n - P.h))
        return fail(Check::iii, "character of eps has order " + std::to_string(c.chi_eps.order));
    c.checks[2] = true;

    if (!ctx.iv)
        return fail(Check::iv, "target is not an l^h-th power in Cl^m_K");
    c.checks[3] = true;
    return res;
}

CheckResult check_conditions(QuadraticField const & K, RayClassGroup const & rcg, GroupElement const & target,
                             QuadUnit const & eps, u64 p, SearchParams const & params)
{
    return check_conditions(make_context(K, rcg, target, eps, params), p);
}

} // namespace rcap
