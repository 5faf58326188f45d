#include "rcap/ambigcheck.hpp"

#include <algorithm>
#include <numeric>

#include <omp.h>

namespace rcap {

namespace {

bool is_fundamental(Integer const & D)
{
    if (D == 0 || D == 1)
        return false;
    Integer r = mod_floor(D, Integer(4));
    if (r == 1)
        return is_squarefree(D);
    if (r != 0)
        return false;
    Integer d = D / 4;
    Integer s = mod_floor(d, Integer(4));
    return (s == 2 || s == 3) && is_squarefree(d);
}

Integer disc_of(Integer const & d)
{
    return mod_floor(d, Integer(4)) == 1 ? d : Integer(4 * d);
}

void validate_m(Integer const & m)
{
    if (m < 1 || !is_squarefree(m) || !fits_u64(m))
        throw std::invalid_argument("modulus must be a positive squarefree integer");
}

/* Full-rank exponent lattice of {v : prod gens^v = 1 mod^x primes}; rels are
 * the relations among gens. */
std::vector<ZVec> congruence_kernel(NumberField const & F, std::vector<PrimeIdeal> const & primes,
                                    std::vector<FieldElem> const & gens, std::vector<ZVec> const & rels)
{
    size_t k = gens.size();
    std::vector<ZVec> rows = rels;
    if (primes.empty()) {
        for (size_t i = 0; i < k; ++i) {
            ZVec e(k, 0);
            e[i] = 1;
            rows.push_back(e);
        }
        return hnf_lower(rows, k).to_rows();
    }
    ResidueGroup RG(F, primes);
    size_t r = primes.size();
    IntMatrix A(k + r, r);
    for (size_t i = 0; i < k; ++i) {
        ZVec dl = RG.raw_dlog(gens[i]);
        for (size_t j = 0; j < r; ++j)
            A(i, j) = dl[j];
    }
    for (size_t j = 0; j < r; ++j)
        A(k + j, j) = Integer(from_u64(primes[j].q() - 1));
    for (auto const & v : left_kernel(A))
        rows.push_back(ZVec(v.begin(), v.begin() + static_cast<long>(k)));
    return hnf_lower(rows, k).to_rows();
}

Integer lattice_det(std::vector<ZVec> const & rows, size_t n)
{
    IntMatrix H = hnf_lower(rows, n);
    Integer d = 1;
    for (size_t i = 0; i < n; ++i)
        d *= H(i, i);
    return abs(d);
}

/* Index of the image of the kernel lattice (rows over L-unit generators)
 * under the norm matrix, inside the K-lattice EK. */
Integer image_index(std::vector<ZVec> const & kernel, std::vector<ZVec> const & norm_rows,
                    std::vector<ZVec> const & EK, std::vector<ZVec> const & K_rels, size_t c)
{
    std::vector<ZVec> img = K_rels;
    for (auto const & v : kernel) {
        ZVec w(c, 0);
        for (size_t i = 0; i < v.size(); ++i)
            for (size_t j = 0; j < c; ++j)
                w[j] += v[i] * norm_rows[i][j];
        img.push_back(w);
    }
    Integer a = lattice_det(img, c), b = lattice_det(EK, c);
    if (a % b != 0)
        throw std::logic_error("norm image is not contained in E_K^m");
    return a / b;
}

std::vector<u64> rational_primes_of(Integer const & m)
{
    return prime_divisors(to_u64(m));
}

Modulus biquad_base_modulus(BiquadField const & L, Integer const & m)
{
    return modulus_from_integer(L.quads[0], m);
}

void require_supported_biquad(BiquadField const & L, Integer const & m)
{
    if (!L.totally_real())
        throw std::invalid_argument("biquadratic cases need a totally real L");
    if (gcd(m, L.field().discriminant()) != 1)
        throw std::invalid_argument("modulus must be prime to disc L");
}

/* Ambiguous subgroup of Cl^m_L for biquadratic L / K by closing the set of
 * generator classes under multiplication. */
class AmbiguousClasses
{
    BiquadField const & L_;
    BqUnitGroup const & U_;
    ResidueGroup const & RG_;

    public:

    AmbiguousClasses(BiquadField const & L, BqUnitGroup const & U, ResidueGroup const & RG) : L_(L), U_(U), RG_(RG) {}

    bool same_class(Ideal const & A, Ideal const & B) const
    {
        NumberField const & nf = L_.field();
        /* B^-1 = B (B^tau)^2 / N(B) for B fixed by Gal(L/K) */
        Ideal Bt = ideal_conj(nf, B, 1);
        Ideal C = ideal_mul(nf, ideal_mul(nf, A, B), ideal_mul(nf, Bt, Bt));
        auto r = is_principal_ambiguous(L_, U_, C);
        if (r.status != PrincipalStatus::principal)
            return false;
        FieldElem alpha = nf.scale(r.generator, Rational(1) / Rational(B.norm()));
        return ray_adjust(L_, U_, RG_, alpha).has_value();
    }

    size_t order(std::vector<Ideal> const & gens, size_t cap = 512) const
    {
        NumberField const & nf = L_.field();
        std::vector<Ideal> elems{unit_ideal(nf)};
        for (size_t i = 0; i < elems.size(); ++i)
            for (auto const & g : gens) {
                Ideal Y = ideal_mul(nf, elems[i], g);
                bool seen = false;
                for (auto const & E : elems)
                    if (same_class(Y, E)) {
                        seen = true;
                        break;
                    }
                if (!seen) {
                    elems.push_back(Y);
                    if (elems.size() > cap)
                        throw bound_exceeded_error("ambiguous subgroup larger than the enumeration cap");
                }
            }
        return elems.size();
    }
};

} // namespace

FiniteAbelianGroup rayclass_Q(Integer const & m)
{
    if (m < 1 || !fits_u64(m))
        throw std::invalid_argument("modulus must be a positive integer below 2^64");
    /* cyclic factors of (Z/m)^* with the image of -1 */
    std::vector<std::string> labels;
    std::vector<u64> orders, minus_one;
    for (auto const & pp : factor(m)) {
        u64 p = pp.p;
        u64 q = ipow(p, pp.k);
        if (p > 2) {
            labels.push_back("g" + std::to_string(q));
            orders.push_back(q / p * (p - 1));
            minus_one.push_back(orders.back() / 2);
        } else if (q == 4) {
            labels.push_back("-1 mod 4");
            orders.push_back(2);
            minus_one.push_back(1);
        } else if (q >= 8) {
            labels.push_back("-1 mod " + std::to_string(q));
            orders.push_back(2);
            minus_one.push_back(1);
            labels.push_back("5 mod " + std::to_string(q));
            orders.push_back(q / 4);
            minus_one.push_back(0);
        }
    }
    size_t n = orders.size();
    IntMatrix R(n + 1, n);
    for (size_t i = 0; i < n; ++i) {
        R(i, i) = static_cast<unsigned long>(orders[i]);
        R(n, i) = static_cast<unsigned long>(minus_one[i]);
    }
    return group_from_relations(labels, R);
}

AmbigCase quadratic_case(Integer const & disc, Integer const & m)
{
    if (!is_fundamental(disc))
        throw std::invalid_argument("not a fundamental discriminant: " + disc.get_str());
    validate_m(m);
    if (gcd(m, disc) != 1)
        throw std::invalid_argument("modulus must be prime to the discriminant");
    AmbigCase c;
    c.kind = AmbigCase::Kind::quadratic;
    c.d = mod_floor(disc, Integer(4)) == 1 ? disc : Integer(disc / 4);
    c.m = m;
    return c;
}

Integer norm_index_units(AmbigCase const & c)
{
    validate_m(c.m);
    switch (c.kind) {
    case AmbigCase::Kind::degenerate:
        return 1;
    case AmbigCase::Kind::quadratic: {
        auto L = make_quadratic(c.d);
        auto mL = modulus_from_integer(L, c.m);
        std::vector<FieldElem> gens;
        std::vector<ZVec> rels, norm_rows;
        if (L.real()) {
            auto eps = fundamental_unit(L);
            gens = {L.field().from_int(-1), eps.value};
            rels = {ZVec{2, 0}};
            norm_rows = {ZVec{0}, ZVec{eps.norm == -1 ? 1 : 0}};
        } else {
            auto [z, w] = torsion_generator(L);
            gens = {z};
            rels = {ZVec{w}};
            norm_rows = {ZVec{0}};
        }
        auto ker = congruence_kernel(L.field(), mL.primes, gens, rels);
        /* E_Q^m: -1 = 1 mod^x m only for m | 2 */
        std::vector<ZVec> EQ{ZVec{c.m <= 2 ? 1 : 2}};
        return image_index(ker, norm_rows, EQ, {ZVec{2}}, 1);
    }
    case AmbigCase::Kind::biquadratic: {
        auto L = make_biquadratic(c.d, c.p);
        require_supported_biquad(L, c.m);
        auto const & K = L.quads[0];
        auto mK = biquad_base_modulus(L, c.m);
        auto U = unit_group(L);
        auto mL = extend_modulus(L, mK);
        std::vector<FieldElem> gens{L.field().from_int(-1)};
        std::vector<ZVec> norm_rows{ZVec{0, 0}};   // coordinates (s, a) of the relative norm
        for (auto const & u : U.gens) {
            gens.push_back(u);
            auto [s, a] = quad_unit_coords(K, U.sub_units[0], L.relative_norm(0, u));
            norm_rows.push_back(ZVec{s, a});
        }
        ZVec rel(4, 0);
        rel[0] = 2;
        auto ker = congruence_kernel(L.field(), mL, gens, {rel});
        auto EK = congruence_kernel(K.field(), mK.primes, {K.field().from_int(-1), U.sub_units[0].value},
                                    {ZVec{2, 0}});
        return image_index(ker, norm_rows, EK, {ZVec{2, 0}}, 2);
    }
    }
    return 1;
}

AmbigReport ambiguous_count_formula(AmbigCase const & c)
{
    validate_m(c.m);
    AmbigReport r;
    r.m = c.m.get_str();
    switch (c.kind) {
    case AmbigCase::Kind::degenerate: {
        auto K = make_quadratic(c.d);
        auto R = ray_class_group(K, modulus_from_integer(K, c.m));
        r.L = r.K = "Q(sqrt " + c.d.get_str() + ")";
        r.degree = 1;
        r.cl_K_m = R.order();
        r.formula = r.cl_K_m;
        return r;
    }
    case AmbigCase::Kind::quadratic: {
        r.L = "Q(sqrt " + c.d.get_str() + ")";
        r.K = "Q";
        r.cl_K_m = rayclass_Q(c.m).order();
        r.inf_degrees = {c.d < 0 ? 2 : 1};
        Integer D = disc_of(c.d);
        for (u64 p : prime_divisors(to_u64(abs(D))))
            if (c.m % p != 0)
                r.ram_e.push_back(2);
        break;
    }
    case AmbigCase::Kind::biquadratic: {
        auto L = make_biquadratic(c.d, c.p);
        require_supported_biquad(L, c.m);
        auto const & K = L.quads[0];
        r.L = "Q(sqrt " + c.d.get_str() + ", sqrt " + c.p.get_str() + ")";
        r.K = "Q(sqrt " + c.d.get_str() + ")";
        r.cl_K_m = ray_class_group(K, biquad_base_modulus(L, c.m)).order();
        r.inf_degrees = {1, 1};
        for (u64 q : prime_divisors(to_u64(abs(L.field().discriminant())))) {
            if (c.m % q == 0)
                continue;
            for (auto const & P : factor_prime(K, q).primes) {
                auto fac = extend_and_factor(L, 0, P);
                if (fac.size() == 1 && fac[0].exponent == 2)
                    r.ram_e.push_back(2);
            }
        }
        break;
    }
    }
    r.degree = 2;
    r.unit_index = norm_index_units(c);
    Integer num = r.cl_K_m;
    for (int x : r.inf_degrees)
        num *= x;
    for (int e : r.ram_e)
        num *= e;
    Integer den = r.degree * r.unit_index;
    if (num % den != 0)
        throw std::logic_error("ambiguous class number formula is not integral");
    r.formula = num / den;
    return r;
}

Integer ambiguous_count_direct(AmbigCase const & c)
{
    validate_m(c.m);
    switch (c.kind) {
    case AmbigCase::Kind::degenerate: {
        auto K = make_quadratic(c.d);
        return ray_class_group(K, modulus_from_integer(K, c.m)).order();
    }
    case AmbigCase::Kind::quadratic: {
        auto L = make_quadratic(c.d);
        auto RL = ray_class_group(L, modulus_from_integer(L, c.m));
        std::vector<GroupElement> gens;
        for (u64 p : prime_divisors(to_u64(abs(L.D))))
            if (c.m % p != 0)
                gens.push_back(RL.ray_class_of_ideal(factor_prime(L, p).primes[0].ideal()));
        for (u64 q : rational_primes_of(c.m)) {
            if (q == 2)
                continue;
            u64 rest = to_u64(c.m) / q;
            u64 g = primitive_root(q);
            u64 t = mulmod((g + q - 1) % q, invmod(rest % q, q), q);
            Integer a = 1 + from_u64(rest) * from_u64(t);
            gens.push_back(RL.ray_class_of_ideal(rational_ideal(L.field(), a)));
        }
        return subgroup_order(RL.group, gens);
    }
    case AmbigCase::Kind::biquadratic: {
        auto L = make_biquadratic(c.d, c.p);
        require_supported_biquad(L, c.m);
        auto const & K = L.quads[0];
        auto mK = biquad_base_modulus(L, c.m);
        auto RK = ray_class_group(K, mK);
        auto U = unit_group(L);
        ResidueGroup RG(L.field(), extend_modulus(L, mK));
        std::vector<Ideal> gens;
        for (u64 q : prime_divisors(to_u64(abs(L.field().discriminant())))) {
            if (c.m % q == 0)
                continue;
            for (auto const & P : factor_prime(K, q).primes) {
                auto fac = extend_and_factor(L, 0, P);
                if (fac.size() == 1 && fac[0].exponent == 2)
                    gens.push_back(fac[0].P.ideal());
            }
        }
        for (size_t i = 0; i < RK.group.rank(); ++i) {
            GroupElement e = RK.group.zero();
            e[i] = 1;
            gens.push_back(L.extend(0, ideal_of_class(RK, e)));
        }
        AmbiguousClasses A(L, U, RG);
        return Integer(static_cast<unsigned long>(A.order(gens)));
    }
    }
    return 0;
}

AmbigReport ambig_report(AmbigCase const & c)
{
    AmbigReport r = ambiguous_count_formula(c);
    r.direct = ambiguous_count_direct(c);
    r.equal = r.formula == r.direct;
    return r;
}

namespace {

std::vector<Integer> fundamental_discs(long bound)
{
    std::vector<Integer> out;
    for (long a = 3; a <= bound; ++a)
        for (long s : {-1L, 1L}) {
            Integer D(s * a);
            if (is_fundamental(D))
                out.push_back(D);
        }
    return out;
}

std::vector<AmbigCase> corpus_quadratic()
{
    std::vector<AmbigCase> out;
    for (auto const & D : fundamental_discs(200))
        out.push_back(quadratic_case(D, 1));
    return out;
}

std::vector<AmbigCase> corpus_modulus()
{
    std::vector<Integer> ms;
    for (long m = 2; m <= 50; ++m)
        if (is_squarefree(Integer(m)))
            ms.push_back(m);
    std::vector<AmbigCase> out;
    size_t i = 0;
    for (auto const & D : fundamental_discs(60)) {
        int taken = 0;
        for (size_t k = 0; k < ms.size() && taken < 2; ++k) {
            Integer const & m = ms[(i * 7 + k) % ms.size()];
            if (gcd(m, D) == 1) {
                out.push_back(quadratic_case(D, m));
                ++taken;
            }
        }
        ++i;
    }
    return out;
}

std::vector<AmbigCase> corpus_imaginary()
{
    std::vector<AmbigCase> out;
    for (auto const & D : fundamental_discs(100))
        if (D < 0)
            for (long m : {3L, 7L, 21L})
                if (gcd(Integer(m), D) == 1)
                    out.push_back(quadratic_case(D, m));
    return out;
}

std::vector<AmbigCase> corpus_biquadratic()
{
    std::vector<AmbigCase> out;
    for (auto [d, p, m] : std::vector<std::array<long, 3>>{
             {34, 5, 1}, {2, 5, 1}, {5, 13, 1}, {3, 5, 1}, {10, 13, 1}, {6, 5, 1}, {3, 7, 1},
             {2, 5, 7}, {34, 5, 3}, {5, 2, 1}}) {
        AmbigCase c;
        c.kind = AmbigCase::Kind::biquadratic;
        c.d = d;
        c.p = p;
        c.m = m;
        out.push_back(c);
    }
    return out;
}

std::vector<AmbigCase> corpus_degenerate()
{
    std::vector<AmbigCase> out;
    for (auto [d, m] : std::vector<std::pair<long, long>>{{-5, 1}, {34, 1}, {-1, 3}, {2, 7}}) {
        AmbigCase c;
        c.kind = AmbigCase::Kind::degenerate;
        c.d = d;
        c.m = m;
        out.push_back(c);
    }
    return out;
}

} // namespace

std::vector<AmbigCase> ambig_corpus(std::string const & name)
{
    if (name == "quadratic")
        return corpus_quadratic();
    if (name == "modulus")
        return corpus_modulus();
    if (name == "imaginary")
        return corpus_imaginary();
    if (name == "biquadratic")
        return corpus_biquadratic();
    if (name == "degenerate")
        return corpus_degenerate();
    if (name == "default") {
        std::vector<AmbigCase> out;
        for (auto part : {corpus_quadratic(), corpus_modulus(), corpus_biquadratic(), corpus_degenerate()})
            out.insert(out.end(), part.begin(), part.end());
        return out;
    }
    throw std::invalid_argument("unknown corpus: " + name);
}

std::vector<AmbigReport> ambig_sweep(std::vector<AmbigCase> const & cases, int jobs)
{
    std::vector<AmbigReport> out(cases.size());
    int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long i = 0; i < static_cast<long>(cases.size()); ++i) {
        try {
            out[i] = ambig_report(cases[i]);
        } catch (std::exception const & e) {
            out[i].m = cases[i].m.get_str();
            out[i].L = "Q(sqrt " + cases[i].d.get_str() + ")";
            out[i].error = e.what();
            out[i].equal = false;
        }
    }
    return out;
}

} // namespace rcap
