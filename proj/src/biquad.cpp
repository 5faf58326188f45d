#include "rcap/biquad.hpp"

#include <algorithm>
#include <cmath>

namespace rcap {

namespace {

std::vector<Rational> solve_row(std::vector<std::vector<Rational>> const & Hinv, ZVec const & v)
{
    size_t n = v.size();
    std::vector<Rational> out(n, 0);
    for (size_t i = 0; i < n; ++i)
        if (v[i] != 0)
            for (size_t j = 0; j < n; ++j)
                out[j] += Rational(v[i]) * Hinv[i][j];
    return out;
}

std::vector<std::vector<Rational>> inverse(IntMatrix const & H)
{
    size_t n = H.rows();
    std::vector<std::vector<Rational>> A(n, std::vector<Rational>(2 * n, 0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j)
            A[i][j] = H(i, j);
        A[i][n + i] = 1;
    }
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && A[piv][c] == 0)
            ++piv;
        if (piv == n)
            throw std::logic_error("singular ideal basis");
        std::swap(A[c], A[piv]);
        Rational inv = 1 / A[c][c];
        for (auto & e : A[c])
            e *= inv;
        for (size_t r = 0; r < n; ++r)
            if (r != c && A[r][c] != 0) {
                Rational f = A[r][c];
                for (size_t k = 0; k < 2 * n; ++k)
                    A[r][k] -= f * A[c][k];
            }
    }
    std::vector<std::vector<Rational>> out(n, std::vector<Rational>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            out[i][j] = A[i][n + j];
    return out;
}

FieldElem unit_power(NumberField const & K, FieldElem const & u, Integer const & e)
{
    if (e >= 0)
        return K.pow(u, e);
    return K.pow(K.inverse(u), -e);
}

FieldElem product(NumberField const & K, std::vector<FieldElem> const & us, ZVec const & e)
{
    FieldElem x = K.one();
    for (size_t i = 0; i < us.size(); ++i)
        if (e[i] != 0)
            x = K.mul(x, unit_power(K, us[i], e[i]));
    return x;
}

/* LLL on the log vectors of a unit basis; returns the integer transform. */
std::vector<std::vector<long long>> reduce_logs(std::vector<std::vector<long double>> logs)
{
    size_t n = logs.size();
    std::vector<std::vector<long long>> T(n, std::vector<long long>(n, 0));
    for (size_t i = 0; i < n; ++i)
        T[i][i] = 1;
    auto dot = [](std::vector<long double> const & a, std::vector<long double> const & b) {
        long double s = 0;
        for (size_t i = 0; i < a.size(); ++i)
            s += a[i] * b[i];
        return s;
    };
    for (int guard = 0; guard < 1000; ++guard) {
        bool changed = false;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                if (i == j)
                    continue;
                long double mu = dot(logs[i], logs[j]) / dot(logs[j], logs[j]);
                long long r = std::llround(mu);
                if (r == 0)
                    continue;
                std::vector<long double> cand = logs[i];
                for (size_t c = 0; c < cand.size(); ++c)
                    cand[c] -= r * logs[j][c];
                if (dot(cand, cand) < dot(logs[i], logs[i]) * (1 - 1e-12L)) {
                    logs[i] = cand;
                    for (size_t c = 0; c < n; ++c)
                        T[i][c] -= r * T[j][c];
                    changed = true;
                }
            }
        if (!changed)
            break;
    }
    return T;
}

} // namespace

FieldElem BiquadField::embed(size_t i, FieldElem const & x) const
{
    FieldElem out(4, 0);
    out[0] = x[0];
    if (i == 0)
        out[1] = x[1];
    else if (i == 1)
        out[2] = x[1];
    else
        out[3] = x[1] / Rational(g);
    return out;
}

FieldElem BiquadField::restrict_to(size_t i, FieldElem const & x) const
{
    size_t keep = i == 0 ? 1 : i == 1 ? 2 : 3;
    for (size_t S = 1; S < 4; ++S)
        if (S != keep && x[S] != 0)
            throw std::domain_error("element does not lie in the subfield");
    FieldElem out{x[0], x[keep]};
    if (i == 2)
        out[1] *= Rational(g);
    return out;
}

Ideal BiquadField::extend(size_t i, Ideal const & I) const
{
    std::vector<ZVec> gens;
    for (auto const & v : I.basis())
        gens.push_back(nf->integral(embed(i, quads[i].field().to_power(v))));
    return ideal_from_generators(*nf, gens);
}

Ideal BiquadField::contract(size_t i, Ideal const & J) const
{
    auto Hinv = inverse(J.hnf());
    std::vector<std::vector<Rational>> M;
    for (auto const & e : quads[i].field().integral_basis())
        M.push_back(solve_row(Hinv, nf->integral(embed(i, e))));
    Integer den = 1;
    for (auto const & row : M)
        for (auto const & q : row)
            den = lcm(den, Integer(q.get_den()));
    IntMatrix A(6, 4);
    for (size_t r = 0; r < 2; ++r)
        for (size_t c = 0; c < 4; ++c)
            A(r, c) = Integer(M[r][c] * den);
    for (size_t c = 0; c < 4; ++c)
        A(2 + c, c) = den;
    std::vector<ZVec> rows;
    for (auto const & v : left_kernel(A))
        rows.push_back(ZVec{v[0], v[1]});
    return Ideal(hnf_lower(rows, 2));
}

FieldElem BiquadField::relative_norm(size_t i, FieldElem const & x) const
{
    return restrict_to(i, nf->mul(x, nf->conj(x, fixing_mask(i))));
}

BiquadField make_biquadratic(Integer const & d, Integer const & p)
{
    for (auto const & r : {d, p})
        if (r == 0 || r == 1 || !is_squarefree(r))
            throw std::invalid_argument("radicands must be squarefree and different from 0, 1");
    Integer s = squarefree_part(d * p);
    if (s == 1)
        throw std::invalid_argument("Q(sqrt d) and Q(sqrt p) coincide");
    BiquadField L;
    L.d = d;
    L.p = p;
    L.quads = {make_quadratic(d), make_quadratic(p), make_quadratic(s)};
    Integer sq = d * p / s;
    L.g = isqrt(sq);
    if (L.g * L.g != sq)
        throw std::logic_error("squarefree part mismatch");
    L.nf = std::make_shared<NumberField>(std::vector<Integer>{d, p});
    return L;
}

std::vector<PrimeFactor> extend_and_factor(BiquadField const & L, size_t i, PrimeIdeal const & q)
{
    NumberField const & nf = L.field();
    Ideal J = L.extend(i, q.ideal());
    std::vector<PrimeFactor> out;
    Ideal prod = unit_ideal(nf);
    int sum_ef = 0;
    for (auto & P : primes_above(nf, q.p())) {
        int e = ideal_valuation(nf, J, P);
        if (e > 0) {
            prod = ideal_mul(nf, prod, ideal_pow(nf, P.ideal(), e));
            sum_ef += e * P.f();
            out.push_back({P, e});
        }
    }
    if (!(prod == J) || sum_ef != 2 * q.f())
        throw std::logic_error("factorization of the extended ideal does not multiply back");
    return out;
}

BqUnitGroup unit_group(BiquadField const & L)
{
    if (!L.totally_real())
        throw std::domain_error("unit group only for totally real biquadratic fields");
    NumberField const & nf = L.field();
    BqUnitGroup U;
    std::vector<FieldElem> base;
    for (size_t i = 0; i < 3; ++i) {
        U.sub_units[i] = fundamental_unit(L.quads[i]);
        base.push_back(L.embed(i, U.sub_units[i].value));
    }
    std::vector<ZVec> lattice;
    for (size_t i = 0; i < 3; ++i) {
        ZVec v(3, 0);
        v[i] = 2;
        lattice.push_back(v);
    }
    static char const * names[] = {"u1", "u2", "u3"};
    for (unsigned mask = 1; mask < 8; ++mask) {
        ZVec v{mask & 1, mask >> 1 & 1, mask >> 2 & 1};
        FieldElem w = product(nf, base, v);
        for (int sgn : {1, -1}) {
            FieldElem x = sgn > 0 ? w : nf.neg(w);
            if (nf.sqrt(x)) {
                std::string s = sgn > 0 ? "sqrt(" : "sqrt(-";
                bool first = true;
                for (size_t i = 0; i < 3; ++i)
                    if (v[i] != 0) {
                        s += (first ? "" : "*") + std::string(names[i]);
                        first = false;
                    }
                U.refinements.push_back(s + ")");
                lattice.push_back(v);
            }
        }
    }
    IntMatrix H = hnf_lower(lattice, 3);
    Integer det = H(0, 0) * H(1, 1) * H(2, 2);
    U.index = static_cast<int>(Integer(Integer(8) / det).get_si());
    std::vector<FieldElem> gens;
    std::vector<ZVec> halves;
    for (size_t k = 0; k < 3; ++k) {
        ZVec h = H.row(k);
        bool even = std::all_of(h.begin(), h.end(), [](Integer const & x) { return mpz_even_p(x.get_mpz_t()); });
        FieldElem u;
        if (even) {
            ZVec h2(3);
            for (size_t i = 0; i < 3; ++i)
                h2[i] = h[i] / 2;
            u = product(nf, base, h2);
        } else {
            FieldElem w = product(nf, base, h);
            auto r = nf.sqrt(w);
            if (!r)
                r = nf.sqrt(nf.neg(w));
            if (!r)
                throw std::logic_error("lattice vector without a square root");
            u = *r;
        }
        gens.push_back(u);
        halves.push_back(h);
    }
    std::vector<std::vector<long double>> logs;
    for (auto const & u : gens) {
        std::vector<long double> l(4);
        for (unsigned s = 0; s < 4; ++s)
            l[s] = log_abs_embedding(nf, u, s);
        logs.push_back(l);
    }
    auto T = reduce_logs(logs);
    for (size_t k = 0; k < 3; ++k) {
        ZVec e(3), hv(3, 0);
        for (size_t j = 0; j < 3; ++j) {
            e[j] = static_cast<long>(T[k][j]);
            for (size_t i = 0; i < 3; ++i)
                hv[i] += e[j] * halves[j][i];
        }
        U.gens.push_back(product(nf, gens, e));
        U.half_exponents.push_back(hv);
    }
    for (auto const & u : U.gens) {
        Rational N = nf.norm(u);
        if (N != 1 && N != -1)
            throw std::logic_error("unit generator with norm different from +-1");
    }
    long double m[3][3];
    for (size_t k = 0; k < 3; ++k)
        for (unsigned s = 0; s < 3; ++s)
            m[k][s] = log_abs_embedding(nf, U.gens[k], s);
    long double det3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    U.regulator = std::fabs(det3);
    if (!(U.regulator > 0))
        throw std::logic_error("unit generators are dependent");
    return U;
}

std::string to_string(PrincipalStatus s)
{
    switch (s) {
    case PrincipalStatus::principal:
        return "principal";
    case PrincipalStatus::not_principal:
        return "not_principal";
    case PrincipalStatus::budget:
        return "budget";
    }
    return "?";
}

PrincipalResult is_principal(BiquadField const & L, BqUnitGroup const & U, Ideal const & I, FPOptions const & opts)
{
    auto r = fp_find_generator(L.field(), U.gens, I, opts);
    PrincipalResult out;
    out.method = "lattice";
    out.nodes = r.nodes;
    if (r.status == FPStatus::found) {
        out.status = PrincipalStatus::principal;
        out.generator = L.field().to_power(r.alpha);
        if (!generates(L.field(), out.generator, I))
            throw std::logic_error("enumeration returned a non-generator");
    } else {
        out.status = r.status == FPStatus::absent ? PrincipalStatus::not_principal : PrincipalStatus::budget;
    }
    return out;
}

std::pair<int, Integer> quad_unit_coords(QuadraticField const & K, QuadUnit const & eps, FieldElem const & x)
{
    NumberField const & F = K.field();
    long long a = std::llround(log_abs_embedding(F, x, 0) / log_abs_embedding(F, eps.value, 0));
    Integer e(static_cast<long>(a));
    FieldElem y = unit_power(F, eps.value, e);
    if (y == x)
        return {0, e};
    if (F.neg(y) == x)
        return {1, e};
    throw std::logic_error("element is not +- a power of the fundamental unit");
}

namespace {

/* Units of L with relative norm 1 to K: (-1, w_1, w_2). */
std::vector<FieldElem> norm_one_units(BiquadField const & L, BqUnitGroup const & U)
{
    NumberField const & nf = L.field();
    IntMatrix A(4, 2);
    for (size_t k = 0; k < 3; ++k) {
        auto [s, a] = quad_unit_coords(L.quads[0], U.sub_units[0], L.relative_norm(0, U.gens[k]));
        A(k, 0) = a;
        A(k, 1) = s;
    }
    A(3, 1) = 2;
    std::vector<ZVec> rows;
    for (auto const & v : left_kernel(A))
        rows.push_back(ZVec{v[0], v[1], v[2]});
    std::vector<FieldElem> out{nf.from_int(-1)};
    for (auto const & h : rows) {
        bool zero = std::all_of(h.begin(), h.end(), [](Integer const & x) { return x == 0; });
        if (zero)
            continue;
        FieldElem w = product(nf, U.gens, h);
        if (L.relative_norm(0, w) != L.quads[0].field().one())
            throw std::logic_error("norm-one unit check failed");
        out.push_back(w);
    }
    return out;
}

} // namespace

PrincipalResult is_principal_ambiguous(BiquadField const & L, BqUnitGroup const & U, Ideal const & I)
{
    NumberField const & nf = L.field();
    if (!(ideal_conj(nf, I, BiquadField::fixing_mask(0)) == I))
        throw std::invalid_argument("ideal is not invariant under Gal(L/K)");
    QuadraticField const & K = L.quads[0];
    auto U1 = norm_one_units(L, U);
    size_t const r = U1.size();
    PrincipalResult out;
    out.method = "hilbert90";
    out.status = PrincipalStatus::not_principal;
    FieldElem sqrt_p = nf.sqrt_radicand(1);
    for (unsigned mask = 0; mask < (1u << r); ++mask) {
        FieldElem eta = nf.one();
        for (size_t k = 0; k < r; ++k)
            if (mask >> k & 1)
                eta = nf.mul(eta, U1[k]);
        FieldElem beta = nf.add(nf.one(), eta);
        if (nf.is_zero(beta))
            beta = sqrt_p;
        Ideal J = ideal_mul(nf, I, principal_ideal(nf, nf.integral(beta)));
        Ideal j = L.contract(0, J);
        if (!(L.extend(0, j) == J))
            continue;
        auto gamma = principal_generator(K, j);
        if (!gamma)
            continue;
        FieldElem alpha = nf.div(L.embed(0, *gamma), beta);
        if (!generates(nf, alpha, I))
            throw std::logic_error("Hilbert 90 generator failed verification");
        out.status = PrincipalStatus::principal;
        out.generator = alpha;
        return out;
    }
    return out;
}

std::optional<FieldElem> ray_adjust(BiquadField const & L, BqUnitGroup const & U, ResidueGroup const & RG,
                                    FieldElem const & alpha)
{
    NumberField const & nf = L.field();
    if (RG.primes().empty())
        return alpha;
    auto const & G = RG.group();
    std::vector<FieldElem> units{nf.from_int(-1)};
    for (auto const & u : U.gens)
        units.push_back(u);
    std::vector<GroupElement> imgs;
    for (auto const & u : units)
        imgs.push_back(RG.dlog(u));
    auto sol = solve_in_group(G, imgs, G.neg(RG.dlog(alpha)));
    if (!sol)
        return std::nullopt;
    FieldElem a = alpha;
    for (size_t k = 0; k < units.size(); ++k) {
        Integer e = mod_floor((*sol)[k], G.order_of(imgs[k]));
        if (e != 0)
            a = nf.mul(a, nf.pow(units[k], e));
    }
    if (!G.is_zero(RG.dlog(a)))
        throw std::logic_error("unit adjustment failed");
    return a;
}

std::vector<PrimeIdeal> extend_modulus(BiquadField const & L, Modulus const & m)
{
    std::vector<PrimeIdeal> out;
    for (auto const & P : m.primes)
        for (auto const & f : extend_and_factor(L, 0, P))
            if (std::find(out.begin(), out.end(), f.P) == out.end())
                out.push_back(f.P);
    return out;
}

std::string to_string(VerifyStatus s)
{
    switch (s) {
    case VerifyStatus::success:
        return "success";
    case VerifyStatus::fail:
        return "fail";
    case VerifyStatus::budget:
        return "budget";
    case VerifyStatus::unverified:
        return "unverified_composite";
    }
    return "?";
}

namespace {

IdealVerdict decide(BiquadField const & L, BqUnitGroup const & U, ResidueGroup const & RG, Ideal const & I,
                    FPOptions const & opts)
{
    IdealVerdict v;
    v.ideal = I.key();
    auto r = is_principal_ambiguous(L, U, I);
    v.method = r.method;
    v.principal = r.status == PrincipalStatus::principal;
    if (v.principal) {
        auto a = ray_adjust(L, U, RG, r.generator);
        v.ray_principal = a.has_value();
        v.generator = a ? *a : r.generator;
    }
    FPOptions small = opts;
    small.max_cells = std::min<u64>(opts.max_cells, 20000);
    small.max_nodes = std::min<u64>(opts.max_nodes, 50000000);
    auto fp = fp_find_generator(L.field(), U.gens, I, small);
    if (fp.status != FPStatus::budget) {
        bool agree = (fp.status == FPStatus::found) == v.principal;
        if (!agree)
            throw std::logic_error("lattice enumeration disagrees with the Hilbert 90 test");
        v.crosschecked = true;
    }
    return v;
}

} // namespace

VerificationReport capitulates(CandidateCertificate const & cert, FPOptions const & opts)
{
    VerificationReport rep;
    auto K = make_quadratic(cert.d);
    auto m = modulus_from_spec(K, cert.modulus);
    auto R = ray_class_group(K, m);
    auto eps = aug_unit_mod_m(K, m);
    SearchParams P;
    P.ell = cert.ell;
    P.n = cert.n;
    P.h = cert.h;
    P.h_override = true;
    P.bound = cert.bound;
    finalize_params(K, P);
    if (eps.x != cert.eps_x || eps.y != cert.eps_y) {
        rep.reason = "recorded unit does not match the recomputed eps";
        return rep;
    }
    if (cert.target.size() != R.group.rank()) {
        rep.reason = "target vector does not fit Cl^m_K = " + R.group.describe();
        return rep;
    }
    auto chk = check_conditions(K, R, cert.target, eps, cert.p, P);
    if (!chk.ok()) {
        rep.failed_condition = to_string(chk.failed);
        rep.reason = "condition (" + to_string(chk.failed) + ") fails on re-check: " + chk.reason;
        return rep;
    }
    if (chk.cert.r != cert.r || chk.cert.p_K != cert.p_K || cert.p > cert.bound) {
        rep.reason = "certificate fields do not match the re-check";
        return rep;
    }
    rep.conditions_ok = true;
    if (ipow(cert.ell, cert.n) != 2) {
        rep.status = VerifyStatus::unverified;
        rep.reason = "l^n > 2: composite arithmetic not automated";
        return rep;
    }
    auto L = make_biquadratic(cert.d, from_u64(cert.p));
    rep.L = "Q(sqrt " + L.d.get_str() + ", sqrt " + L.p.get_str() + ")";
    NumberField const & nf = L.field();
    auto U = unit_group(L);
    auto mL = extend_modulus(L, m);
    for (auto const & Q : mL)
        rep.m_L += (rep.m_L.empty() ? "" : "*") + Q.describe();
    if (rep.m_L.empty())
        rep.m_L = "1";
    ResidueGroup RG(nf, mL);
    auto pK = prime_at_root(K, cert.p, cert.r);
    auto fac = extend_and_factor(L, 0, pK);
    if (fac.size() != 1 || fac[0].exponent != 2) {
        rep.reason = "p_K does not ramify in L/K";
        return rep;
    }
    Ideal const & qL = fac[0].P.ideal();
    try {
        rep.q_L = decide(L, U, RG, qL, opts);
        rep.extended = decide(L, U, RG, L.extend(0, pK.ideal()), opts);
    } catch (std::logic_error const & e) {
        rep.reason = e.what();
        return rep;
    }
    for (auto const * v : {&rep.q_L, &rep.extended})
        if (v->ray_principal && !generates(nf, *v->generator, v == &rep.q_L ? qL : L.extend(0, pK.ideal())))
            throw std::logic_error("generator re-verification failed");
    if (rep.extended.ray_principal) {
        rep.status = VerifyStatus::success;
        rep.reason = rep.q_L.principal ? "p_K O_L and q_L are ray-principal"
                                       : "p_K O_L = q_L^2 is ray-principal";
    } else {
        rep.status = VerifyStatus::fail;
        rep.reason = rep.extended.principal ? "p_K O_L is principal but no generator is 1 mod^x m_L"
                                            : "p_K O_L is not principal";
    }
    return rep;
}

} // namespace rcap
