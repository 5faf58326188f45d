#include "rcap/capsearch.hpp"

#include <exception>
#include <sstream>

#include <omp.h>

namespace rcap {

namespace {

using Period = std::vector<Integer>;   // coordinates on eta_0 .. eta_{m-1}

struct PeriodRing {
    u64 m;
    std::vector<Period> T;   // T[b] = eta_0 * eta_b

    Period mul_eta(u64 k, Period const & v) const
    {
        Period out(m, 0);
        for (u64 i = 0; i < m; ++i) {
            if (v[i] == 0)
                continue;
            Period const & t = T[(i + m - k) % m];
            for (u64 c = 0; c < m; ++c)
                if (t[c] != 0)
                    out[(c + k) % m] += v[i] * t[c];
        }
        return out;
    }
};

PeriodRing period_ring(u64 p, u64 m)
{
    u64 f = (p - 1) / m;
    u64 g = primitive_root(p);
    std::vector<std::uint32_t> ind(p, 0);
    u64 x = 1;
    for (u64 k = 0; k + 1 < p; ++k) {
        ind[x] = static_cast<std::uint32_t>(k % m);
        x = mulmod(x, g, p);
    }
    PeriodRing R;
    R.m = m;
    R.T.assign(m, Period(m, 0));
    for (u64 b = 0; b < m; ++b) {
        std::vector<long long> cnt(m, 0);
        /* z runs over C_b = g^(b + m j) */
        u64 z = powmod(g, b, p), step = powmod(g, m, p);
        bool has_minus_one = false;
        for (u64 j = 0; j < f; ++j) {
            u64 s = (z + 1) % p;
            if (s == 0)
                has_minus_one = true;
            else
                ++cnt[ind[s]];
            z = mulmod(z, step, p);
        }
        for (u64 c = 0; c < m; ++c)
            R.T[b][c] = static_cast<long>(cnt[c] - (has_minus_one ? static_cast<long long>(f) : 0));
    }
    return R;
}

} // namespace

std::vector<Integer> gaussian_period_min_poly(u64 p, u64 m)
{
    if (!is_prime_u64(p) || p < 3)
        throw std::invalid_argument("p must be an odd prime");
    if (m == 0 || (p - 1) % m != 0)
        throw std::invalid_argument("m must divide p - 1");
    PeriodRing R = period_ring(p, m);
    /* 1 = -(eta_0 + ... + eta_{m-1}) */
    std::vector<Period> P{Period(m, -1)};
    for (u64 k = 0; k < m; ++k) {
        std::vector<Period> Q(P.size() + 1, Period(m, 0));
        for (size_t j = 0; j < P.size(); ++j) {
            for (u64 c = 0; c < m; ++c)
                Q[j + 1][c] += P[j][c];
            Period e = R.mul_eta(k, P[j]);
            for (u64 c = 0; c < m; ++c)
                Q[j][c] -= e[c];
        }
        P = std::move(Q);
    }
    std::vector<Integer> out;
    for (auto const & v : P) {
        for (u64 c = 1; c < m; ++c)
            if (v[c] != v[0])
                throw std::logic_error("Gaussian period coefficient is not rational");
        out.push_back(-v[0]);
    }
    return out;
}

CyclicFieldDesc cyclic_field(u64 p, u64 degree)
{
    CyclicFieldDesc F;
    F.p = p;
    F.degree = degree;
    F.poly = gaussian_period_min_poly(p, degree);
    mpz_ui_pow_ui(F.discriminant.get_mpz_t(), p, degree - 1);
    return F;
}

GroupElement select_target(FiniteAbelianGroup const & G, std::string const & selector)
{
    if (selector == "identity")
        return G.zero();
    if (selector.rfind("auto-", 0) == 0) {
        Integer k(selector.substr(5));
        for (auto const & x : G.elements())
            if (G.order_of(x) == k)
                return x;
        throw std::invalid_argument("no element of order " + k.get_str() + " in " + G.describe());
    }
    ZVec v;
    std::stringstream ss(selector);
    std::string tok;
    while (std::getline(ss, tok, ','))
        v.push_back(Integer(tok));
    if (v.size() != G.rank())
        throw std::invalid_argument("class vector length does not match the group rank");
    return G.reduce(v);
}

std::string to_string(SearchStatus s)
{
    switch (s) {
    case SearchStatus::found:
        return "found";
    case SearchStatus::not_found:
        return "not_found";
    case SearchStatus::blocked_iv:
        return "blocked_iv";
    }
    return "?";
}

PowerHint power_adjustment_hint(QuadraticField const & K, u64 ell, unsigned h)
{
    PowerHint H;
    H.ell = ell;
    H.h = h;
    H.degree = ipow(ell, h);
    H.conductor = ell == 2 ? ipow(2, h + 2) : ipow(ell, h + 1);
    H.field = "cyclic subfield of degree " + std::to_string(H.degree) + " of Q(zeta_" + std::to_string(H.conductor) +
              ")^+";
    H.requirement = "auxiliary prime q totally split in Q(sqrt " + K.d.get_str() + ", zeta_" +
                    std::to_string(H.conductor) + ") and outside the excluded set; compose K with F_0 first";
    return H;
}

namespace {

struct ChunkResult {
    std::optional<u64> winner;
    std::optional<CheckResult> cert;
    SearchStats stats;
    std::exception_ptr error;
};

void bump(SearchStats & s, std::string const & key) { ++s.rejected[key]; }

ChunkResult scan_range(SearchContext const & ctx, u64 lo, u64 hi)
{
    ChunkResult out;
    SearchParams const & P = ctx.params;
    Integer const D = ctx.K->D;
    for_each_prime(lo, hi, [&](u64 p) {
        ++out.stats.scanned;
        if (mpz_divisible_ui_p(ctx.excluded.get_mpz_t(), p)) {
            bump(out.stats, "precondition");
            return true;
        }
        if (!is_split_cyclotomic(p, P.ell, P.n, true) || kronecker(D, from_u64(p)) != 1) {
            bump(out.stats, "i'");
            return true;
        }
        auto res = check_conditions(ctx, p);
        if (!res.ok()) {
            bump(out.stats, to_string(res.failed));
            return true;
        }
        out.winner = p;
        out.cert = std::move(res);
        return false;
    });
    return out;
}

void merge(SearchStats & into, SearchStats const & s)
{
    into.scanned += s.scanned;
    for (auto const & [k, v] : s.rejected)
        into.rejected[k] += v;
}

SearchResult prepare(SearchContext const & ctx)
{
    SearchResult R;
    R.bound = ctx.params.bound;
    auto const & G = ctx.rcg->group;
    Integer ord = G.order_of(ctx.target);
    Integer l = from_u64(ctx.params.ell);
    while (ord > 1 && mpz_divisible_p(ord.get_mpz_t(), l.get_mpz_t()))
        ord /= l;
    if (ord != 1)
        throw std::invalid_argument("target order is not a power of l");
    if (!ctx.iv)
        R.status = SearchStatus::blocked_iv;
    return R;
}

void finish(SearchResult & R, CheckResult const & res)
{
    R.status = SearchStatus::found;
    R.cert = res.cert;
    R.field = cyclic_field(res.cert.p, ipow(res.cert.ell, res.cert.n));
}

} // namespace

SearchResult find_principalizing_prime_serial(SearchContext const & ctx)
{
    SearchResult R = prepare(ctx);
    if (R.status == SearchStatus::blocked_iv)
        return R;
    auto c = scan_range(ctx, 2, ctx.params.bound);
    R.stats = c.stats;
    if (c.winner)
        finish(R, *c.cert);
    return R;
}

SearchResult find_principalizing_prime(SearchContext const & ctx, int jobs)
{
    if (jobs == 1)
        return find_principalizing_prime_serial(ctx);
    SearchResult R = prepare(ctx);
    if (R.status == SearchStatus::blocked_iv)
        return R;
    if (jobs <= 0)
        jobs = omp_get_max_threads();
    u64 const bound = ctx.params.bound;
    u64 const chunk = 1 << 14;
    size_t const batch = static_cast<size_t>(jobs) * 4;
    for (u64 base = 2; base <= bound;) {
        std::vector<std::pair<u64, u64>> ranges;
        for (size_t i = 0; i < batch && base <= bound; ++i) {
            u64 hi = std::min(bound, base + chunk - 1);
            ranges.push_back({base, hi});
            base = hi + 1;
        }
        std::vector<ChunkResult> results(ranges.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
        for (size_t i = 0; i < ranges.size(); ++i) {
            try {
                results[i] = scan_range(ctx, ranges[i].first, ranges[i].second);
            } catch (...) {
                results[i].error = std::current_exception();
            }
        }
        for (auto & c : results) {
            if (c.error)
                std::rethrow_exception(c.error);
            merge(R.stats, c.stats);
            if (c.winner) {
                finish(R, *c.cert);
                return R;
            }
        }
    }
    return R;
}

} // namespace rcap
