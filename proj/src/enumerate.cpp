#include "rcap/enumerate.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <omp.h>

namespace rcap {

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

struct precision_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

size_t bit_size(FieldElem const & x)
{
    size_t b = 0;
    for (auto const & c : x)
        b = std::max(b, mpz_sizeinbase(c.get_num_mpz_t(), 2) + mpz_sizeinbase(c.get_den_mpz_t(), 2));
    return b;
}

/* sigma_mask(x) as a GMP float with enough bits to survive cancellation */
mpf_class embed_mpf(NumberField const & K, FieldElem const & x, unsigned mask)
{
    mp_bitcnt_t prec = 4 * bit_size(x) + 256;
    auto const & rad = K.radicands();
    mpf_class v(0, prec);
    for (unsigned S = 0; S < x.size(); ++S) {
        if (x[S] == 0)
            continue;
        Integer prod = 1;
        for (size_t i = 0; i < rad.size(); ++i)
            if (S >> i & 1)
                prod *= rad[i];
        if (prod < 0)
            throw std::domain_error("embedding requested for a field that is not totally real");
        mpf_class r(prod, prec);
        r = sqrt(r);
        mpf_class c(x[S], prec);
        mpf_class term(c * r, prec);
        if (__builtin_popcount(mask & S) % 2)
            v -= term;
        else
            v += term;
    }
    return v;
}

template <typename T>
T from_mpf(mpf_class const & v)
{
    if (v == 0)
        return T(0);
    mp_exp_t e;
    std::string digits = v.get_str(e, 10, 60);
    bool neg = digits[0] == '-';
    if (neg)
        digits.erase(0, 1);
    std::string s = (neg ? "-0." : "0.") + digits + "e" + std::to_string(e);
    if constexpr (std::is_same_v<T, long double>)
        return std::stold(s);
    else
        return T(s);
}

template <typename T>
T from_integer(Integer const & n)
{
    if constexpr (std::is_same_v<T, long double>)
        return std::stold(n.get_str());
    else
        return T(n.get_str());
}

template <typename T>
struct Lattice {
    size_t n = 0;
    std::vector<std::vector<T>> b;            // weighted rows
    std::vector<std::vector<long long>> U;    // rows of the transform
};

template <typename T>
T dot(std::vector<T> const & a, std::vector<T> const & b)
{
    T s = 0;
    for (size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

long long checked_round(long double r)
{
    if (!(std::fabs(r) < 1e15L))
        throw precision_error("LLL multiplier out of range");
    return std::llround(r);
}

template <typename T>
long long round_ll(T const & r)
{
    if constexpr (std::is_same_v<T, long double>)
        return checked_round(r);
    else
        return checked_round(static_cast<long double>(r));
}

/* textbook LLL with delta = 0.99 on the rows */
template <typename T>
void lll(Lattice<T> & L)
{
    size_t const n = L.n;
    auto & b = L.b;
    std::vector<std::vector<T>> bs(n, std::vector<T>(b[0].size())), mu(n, std::vector<T>(n, 0));
    std::vector<T> Bn(n);
    auto gso = [&]() {
        for (size_t i = 0; i < n; ++i) {
            bs[i] = b[i];
            for (size_t j = 0; j < i; ++j) {
                mu[i][j] = dot(b[i], bs[j]) / Bn[j];
                for (size_t c = 0; c < bs[i].size(); ++c)
                    bs[i][c] -= mu[i][j] * bs[j][c];
            }
            Bn[i] = dot(bs[i], bs[i]);
            if (!(Bn[i] > 0))
                throw precision_error("degenerate Gram-Schmidt");
        }
    };
    gso();
    size_t k = 1, guard = 0;
    while (k < n) {
        if (++guard > 100000)
            throw precision_error("LLL did not converge");
        for (size_t j = k; j-- > 0;) {
            long long r = round_ll(mu[k][j]);
            if (r != 0) {
                for (size_t c = 0; c < b[k].size(); ++c)
                    b[k][c] -= T(r) * b[j][c];
                for (size_t c = 0; c < n; ++c)
                    L.U[k][c] -= r * L.U[j][c];
                gso();
            }
        }
        if (Bn[k] >= (T(0.99) - mu[k][k - 1] * mu[k][k - 1]) * Bn[k - 1]) {
            ++k;
        } else {
            std::swap(b[k], b[k - 1]);
            std::swap(L.U[k], L.U[k - 1]);
            gso();
            k = std::max<size_t>(k - 1, 1);
        }
    }
}

struct Shared {
    std::atomic<u64> nodes{0};
    std::atomic<size_t> best{std::numeric_limits<size_t>::max()};
    u64 max_nodes = 0;
};

struct CellOutcome {
    bool found = false;
    bool budget = false;
    bool precision = false;
    ZVec alpha;
};

template <typename T>
struct CellSearch {
    NumberField const & K;
    std::vector<ZVec> const & rows;   // basis of I, integral coordinates
    Integer const & normI;
    Shared & shared;
    size_t cell;
    Lattice<T> L;
    std::vector<std::vector<T>> q;
    std::vector<long long> y;
    T bound;
    CellOutcome out;
    u64 local_nodes = 0;

    bool leaf()
    {
        size_t n = L.n;
        size_t last = n;
        for (size_t i = n; i-- > 0;)
            if (y[i] != 0) {
                last = i;
                break;
            }
        if (last == n || y[last] < 0)
            return false;
        ZVec x(n, 0);
        for (size_t k = 0; k < n; ++k)
            if (y[k] != 0)
                for (size_t c = 0; c < n; ++c)
                    x[c] += Integer(static_cast<long>(y[k])) * Integer(static_cast<long>(L.U[k][c]));
        ZVec a(n, 0);
        for (size_t c = 0; c < n; ++c)
            if (x[c] != 0)
                for (size_t t = 0; t < n; ++t)
                    a[t] += x[c] * rows[c][t];
        if (abs(K.norm(a)) == normI) {
            out.found = true;
            out.alpha = a;
            return true;
        }
        return false;
    }

    /* returns true to stop */
    bool recurse(int i, T remaining)
    {
        if ((++local_nodes & 1023) == 0) {
            if (shared.nodes.fetch_add(1024) > shared.max_nodes) {
                out.budget = true;
                return true;
            }
            if (shared.best.load() < cell)
                return true;
        }
        size_t n = L.n;
        T c = 0;
        for (size_t j = i + 1; j < n; ++j)
            c -= q[i][j] * T(y[j]);
        T w = remaining / q[i][i];
        if (w < 0)
            return false;
        using std::ceil;
        using std::floor;
        using std::sqrt;
        T r = sqrt(w);
        T lo = ceil(c - r), hi = floor(c + r);
        long long a = round_ll(lo), z = round_ll(hi);
        for (long long v = a; v <= z; ++v) {
            y[i] = v;
            T d = T(v) - c;
            T rem = remaining - q[i][i] * d * d;
            if (rem < 0)
                continue;
            if (i == 0) {
                if (leaf())
                    return true;
            } else if (recurse(i - 1, rem)) {
                return true;
            }
        }
        y[i] = 0;
        return false;
    }

    void run()
    {
        lll(L);
        size_t n = L.n;
        q.assign(n, std::vector<T>(n, 0));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                q[i][j] = dot(L.b[i], L.b[j]);
        for (size_t i = 0; i < n; ++i) {
            if (!(q[i][i] > 0))
                throw precision_error("Gram matrix not positive");
            for (size_t j = i + 1; j < n; ++j) {
                q[j][i] = q[i][j];
                q[i][j] /= q[i][i];
            }
            for (size_t k = i + 1; k < n; ++k)
                for (size_t l = k; l < n; ++l)
                    q[k][l] -= q[k][i] * q[i][l];
        }
        y.assign(n, 0);
        recurse(static_cast<int>(n) - 1, bound);
    }
};

template <typename T>
FPResult fp_pass(NumberField const & K, std::vector<std::vector<long double>> const & logs, Ideal const & I,
                 FPOptions const & opts, bool & precision_trouble)
{
    size_t const n = K.degree();
    auto rows = I.basis();
    Integer const normI = I.norm();
    std::vector<std::vector<T>> emb(n, std::vector<T>(n));
    for (size_t k = 0; k < n; ++k) {
        FieldElem x = K.to_power(rows[k]);
        for (unsigned s = 0; s < n; ++s)
            emb[k][s] = from_mpf<T>(embed_mpf(K, x, s));
    }
    size_t const r = logs.size();
    std::vector<u64> kdiv(r);
    u64 cells = 1;
    for (size_t j = 0; j < r; ++j) {
        long double mx = 0;
        for (auto v : logs[j])
            mx = std::max(mx, std::fabs(v));
        kdiv[j] = std::max<u64>(1, static_cast<u64>(std::ceil(3 * mx / (2 * opts.delta))));
        cells *= kdiv[j];
        if (cells > opts.max_cells)
            return FPResult{FPStatus::budget, {}, 0, cells, 0};
    }
    using std::exp;
    using std::sqrt;
    T const R2 = T(4) * sqrt(from_integer<T>(normI)) * exp(T(2 * opts.delta)) * T(1.01);
    Shared shared;
    shared.max_nodes = opts.max_nodes;
    std::vector<CellOutcome> outcomes(cells);
    int jobs = opts.jobs <= 0 ? omp_get_max_threads() : opts.jobs;
    auto do_cell = [&](size_t idx) {
        if (shared.best.load() < idx)
            return;
        std::vector<long double> c(n, 0);
        u64 rest = idx;
        for (size_t j = 0; j < r; ++j) {
            u64 a = rest % kdiv[j];
            rest /= kdiv[j];
            long double t = (a + 0.5L) / kdiv[j];
            for (size_t i = 0; i < n; ++i)
                c[i] += t * logs[j][i];
        }
        CellSearch<T> cs{K, rows, normI, shared, idx, {}, {}, {}, R2, {}, 0};
        cs.L.n = n;
        cs.L.b.assign(n, std::vector<T>(n));
        cs.L.U.assign(n, std::vector<long long>(n, 0));
        for (size_t k = 0; k < n; ++k) {
            cs.L.U[k][k] = 1;
            for (size_t i = 0; i < n; ++i) {
                using std::exp;
                cs.L.b[k][i] = emb[k][i] * exp(T(-c[i]));
            }
        }
        try {
            cs.run();
        } catch (precision_error const &) {
            cs.out.precision = true;
        }
        outcomes[idx] = std::move(cs.out);
        if (outcomes[idx].found) {
            size_t cur = shared.best.load();
            while (idx < cur && !shared.best.compare_exchange_weak(cur, idx)) {
            }
        }
    };
    if (jobs == 1) {
        for (size_t idx = 0; idx < cells; ++idx)
            do_cell(idx);
    } else {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
        for (size_t idx = 0; idx < cells; ++idx)
            do_cell(idx);
    }
    FPResult res;
    res.cells = cells;
    res.nodes = shared.nodes.load();
    for (size_t idx = 0; idx < cells; ++idx) {
        auto const & o = outcomes[idx];
        if (o.found) {
            res.status = FPStatus::found;
            res.alpha = o.alpha;
            return res;
        }
        if (o.budget) {
            res.status = FPStatus::budget;
            return res;
        }
        if (o.precision)
            precision_trouble = true;
    }
    res.status = FPStatus::absent;
    return res;
}

} // namespace

long double log_abs_embedding(NumberField const & K, FieldElem const & x, unsigned mask)
{
    mpf_class v = embed_mpf(K, x, mask);
    if (v == 0)
        throw std::domain_error("log of zero");
    long e;
    double m = mpf_get_d_2exp(&e, v.get_mpf_t());
    return std::log(std::fabs(static_cast<long double>(m))) + e * std::log(2.0L);
}

FPResult fp_find_generator(NumberField const & K, std::vector<FieldElem> const & unit_gens, Ideal const & I,
                           FPOptions const & opts)
{
    if (!K.totally_real())
        throw std::domain_error("generator search needs a totally real field");
    size_t const n = K.degree();
    if (unit_gens.size() + 1 != n)
        throw std::invalid_argument("unit generators must have rank degree - 1");
    if (I.norm() == 1) {
        FPResult r;
        r.status = FPStatus::found;
        r.alpha = K.integral(K.one());
        return r;
    }
    std::vector<std::vector<long double>> logs;
    for (auto const & u : unit_gens) {
        std::vector<long double> l(n);
        for (unsigned s = 0; s < n; ++s)
            l[s] = log_abs_embedding(K, u, s);
        logs.push_back(l);
    }
    bool trouble = false;
    FPResult r = fp_pass<long double>(K, logs, I, opts, trouble);
    r.digits = 18;
    if (r.status != FPStatus::absent)
        return r;
    bool trouble2 = false;
    FPResult r2 = fp_pass<Big>(K, logs, I, opts, trouble2);
    r2.digits = 50;
    r2.nodes += r.nodes;
    if (r2.status == FPStatus::absent && trouble2)
        r2.status = FPStatus::budget;
    return r2;
}

} // namespace rcap
