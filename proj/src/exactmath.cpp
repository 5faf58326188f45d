#include "rcap/exactmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rcap {

u64 powmod(u64 base, u64 e, u64 m)
{
    if (m == 1)
        return 0;
    u64 r = 1;
    base %= m;
    while (e) {
        if (e & 1)
            r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        e >>= 1;
    }
    return r;
}

u64 gcd_u64(u64 a, u64 b) { return std::gcd(a, b); }

u64 invmod(u64 a, u64 m)
{
    Integer r;
    Integer A = from_u64(a % m), M = from_u64(m);
    if (mpz_invert(r.get_mpz_t(), A.get_mpz_t(), M.get_mpz_t()) == 0)
        throw std::domain_error("invmod: not invertible");
    return to_u64(r);
}

bool fits_u64(Integer const & n)
{
    return sgn(n) >= 0 && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64;
}

u64 to_u64(Integer const & n)
{
    if (!fits_u64(n))
        throw out_of_range_error("value does not fit in 64 bits: " + n.get_str());
    u64 v = 0;
    mpz_export(&v, nullptr, -1, sizeof(v), 0, 0, n.get_mpz_t());
    return v;
}

Integer from_u64(u64 v)
{
    Integer r;
    mpz_import(r.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
    return r;
}

bool is_prime_u64(u64 n)
{
    if (n < 2)
        return false;
    for (u64 q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % q == 0)
            return n == q;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    /* witness set valid for all n < 2^64 */
    for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
        u64 x = powmod(a % n, d, n);
        if (a % n == 0 || x == 1 || x == n - 1)
            continue;
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp)
            return false;
    }
    return true;
}

bool is_prime(Integer const & n)
{
    if (sgn(n) <= 0)
        return false;
    return is_prime_u64(to_u64(n));
}

namespace {

u64 pollard_brent(u64 n)
{
    if (n % 2 == 0)
        return 2;
    for (u64 c = 1;; ++c) {
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        u64 const m = 128;
        u64 r = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i)
                y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n)
            return g;
    }
}

void factor_rec(u64 n, std::vector<u64> & out)
{
    if (n == 1)
        return;
    if (is_prime_u64(n)) {
        out.push_back(n);
        return;
    }
    u64 d = pollard_brent(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

} // namespace

std::vector<PrimePower> factor(Integer const & n)
{
    if (sgn(n) == 0)
        throw std::invalid_argument("factor: zero has no factorization");
    Integer a = abs(n);
    u64 v = to_u64(a);
    std::vector<u64> ps;
    for (u64 q = 2; q < 1000 && q * q <= v; ++q) {
        while (v % q == 0) {
            ps.push_back(q);
            v /= q;
        }
    }
    factor_rec(v, ps);
    std::sort(ps.begin(), ps.end());
    std::vector<PrimePower> out;
    for (u64 q : ps) {
        if (!out.empty() && out.back().p == q)
            ++out.back().k;
        else
            out.push_back({q, 1});
    }
    return out;
}

std::vector<u64> prime_divisors(u64 n)
{
    std::vector<u64> r;
    for (auto const & pp : factor(from_u64(n)))
        r.push_back(pp.p);
    return r;
}

std::vector<u64> primes_up_to(u64 limit)
{
    std::vector<u64> r;
    if (limit < 2)
        return r;
    std::vector<bool> comp(limit + 1, false);
    for (u64 i = 2; i <= limit; ++i) {
        if (comp[i])
            continue;
        r.push_back(i);
        for (u64 j = i * i; j <= limit; j += i)
            comp[j] = true;
    }
    return r;
}

void for_each_prime(u64 lo, u64 hi, std::function<bool(u64)> const & fn)
{
    if (hi < 2 || lo > hi)
        return;
    lo = std::max<u64>(lo, 2);
    u64 const root = static_cast<u64>(std::sqrt(static_cast<long double>(hi))) + 1;
    auto const small = primes_up_to(root);
    u64 const seg = 1 << 18;
    for (u64 base = lo; base <= hi; base += seg) {
        u64 const top = std::min(hi, base + seg - 1);
        std::vector<bool> comp(top - base + 1, false);
        for (u64 q : small) {
            if (q * q > top)
                break;
            u64 start = std::max(q * q, (base + q - 1) / q * q);
            for (u64 j = start; j <= top; j += q)
                comp[j - base] = true;
        }
        for (u64 x = base; x <= top; ++x) {
            if (!comp[x - base] && !fn(x))
                return;
        }
        if (top == hi)
            break;
    }
}

std::vector<u64> primes_in_progression(u64 a, u64 m, u64 limit)
{
    if (m == 0 || std::gcd(a % m, m) != 1)
        throw std::invalid_argument("primes_in_progression: gcd(a, m) != 1");
    std::vector<u64> r;
    a %= m;
    for_each_prime(2, limit, [&](u64 p) {
        if (p % m == a)
            r.push_back(p);
        return true;
    });
    return r;
}

int kronecker(Integer const & a, Integer const & n)
{
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

u64 sqrt_mod_p(u64 a, u64 p)
{
    a %= p;
    if (p == 2 || a == 0)
        return a;
    if (powmod(a, (p - 1) / 2, p) != 1)
        throw std::domain_error("sqrt_mod_p: not a quadratic residue");
    u64 q = p - 1;
    int s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    u64 z = 2;
    while (powmod(z, (p - 1) / 2, p) != p - 1)
        ++z;
    u64 m = s, c = powmod(z, q, p), t = powmod(a, q, p), r = powmod(a, (q + 1) / 2, p);
    while (t != 1) {
        u64 i = 0, t2 = t;
        while (t2 != 1) {
            t2 = mulmod(t2, t2, p);
            ++i;
        }
        u64 b = c;
        for (u64 j = 0; j + i + 1 < m; ++j)
            b = mulmod(b, b, p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    return r;
}

u64 multiplicative_order(u64 a, u64 m, u64 group_order)
{
    a %= m;
    if (std::gcd(a, m) != 1)
        throw std::domain_error("multiplicative_order: not a unit");
    u64 ord = group_order;
    for (auto const & pp : factor(from_u64(group_order))) {
        for (unsigned i = 0; i < pp.k; ++i) {
            if (powmod(a, ord / pp.p, m) == 1)
                ord /= pp.p;
            else
                break;
        }
    }
    return ord;
}

Integer isqrt(Integer const & n)
{
    if (sgn(n) < 0)
        throw std::domain_error("isqrt of negative");
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

bool is_square(Integer const & n, Integer * root)
{
    if (sgn(n) < 0)
        return false;
    if (!mpz_perfect_square_p(n.get_mpz_t()))
        return false;
    if (root)
        *root = isqrt(n);
    return true;
}

bool is_square(Rational const & q, Rational * root)
{
    Integer a, b;
    if (!is_square(q.get_num(), &a) || !is_square(q.get_den(), &b))
        return false;
    if (root) {
        *root = Rational(a, b);
        root->canonicalize();
    }
    return true;
}

bool is_squarefree(Integer const & n)
{
    if (sgn(n) == 0)
        return false;
    if (abs(n) == 1)
        return true;
    for (auto const & pp : factor(n))
        if (pp.k > 1)
            return false;
    return true;
}

Integer squarefree_part(Integer const & n)
{
    Integer r = sgn(n) < 0 ? -1 : 1;
    for (auto const & pp : factor(n))
        if (pp.k % 2)
            r *= from_u64(pp.p);
    return r;
}

Integer floor_div(Integer const & a, Integer const & b)
{
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

Integer mod_floor(Integer const & a, Integer const & m)
{
    Integer r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

std::string to_string(Integer const & n) { return n.get_str(); }

/* ---- PolyModP ---- */

PolyModP::PolyModP(std::vector<u64> coeffs, u64 p) : c_(std::move(coeffs)), p_(p)
{
    for (auto & x : c_)
        x %= p_;
    trim();
}

void PolyModP::trim()
{
    while (!c_.empty() && c_.back() == 0)
        c_.pop_back();
}

PolyModP PolyModP::x_power(u64 k, u64 p)
{
    std::vector<u64> c(k + 1, 0);
    c[k] = 1;
    return PolyModP(std::move(c), p);
}

PolyModP PolyModP::from_integers(std::vector<Integer> const & coeffs, u64 p)
{
    std::vector<u64> c;
    Integer P = from_u64(p);
    for (auto const & x : coeffs)
        c.push_back(to_u64(mod_floor(x, P)));
    return PolyModP(std::move(c), p);
}

u64 PolyModP::operator()(u64 x) const
{
    u64 r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
        r = (mulmod(r, x, p_) + *it) % p_;
    return r;
}

PolyModP PolyModP::operator+(PolyModP const & o) const
{
    std::vector<u64> r(std::max(c_.size(), o.c_.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        u64 a = i < c_.size() ? c_[i] : 0, b = i < o.c_.size() ? o.c_[i] : 0;
        r[i] = (a + b) % p_;
    }
    return PolyModP(std::move(r), p_);
}

PolyModP PolyModP::operator-(PolyModP const & o) const
{
    std::vector<u64> r(std::max(c_.size(), o.c_.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        u64 a = i < c_.size() ? c_[i] : 0, b = i < o.c_.size() ? o.c_[i] : 0;
        r[i] = (a + p_ - b) % p_;
    }
    return PolyModP(std::move(r), p_);
}

PolyModP PolyModP::operator*(PolyModP const & o) const
{
    if (is_zero() || o.is_zero())
        return PolyModP({}, p_);
    std::vector<u64> r(c_.size() + o.c_.size() - 1, 0);
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j)
            r[i + j] = (r[i + j] + mulmod(c_[i], o.c_[j], p_)) % p_;
    return PolyModP(std::move(r), p_);
}

PolyModP PolyModP::monic() const
{
    if (is_zero())
        return *this;
    u64 inv = invmod(lead(), p_);
    std::vector<u64> r = c_;
    for (auto & x : r)
        x = mulmod(x, inv, p_);
    return PolyModP(std::move(r), p_);
}

PolyModP PolyModP::derivative() const
{
    std::vector<u64> r;
    for (size_t i = 1; i < c_.size(); ++i)
        r.push_back(mulmod(c_[i], i % p_, p_));
    return PolyModP(std::move(r), p_);
}

std::pair<PolyModP, PolyModP> PolyModP::divmod(PolyModP const & d) const
{
    if (d.is_zero())
        throw std::domain_error("polynomial division by zero");
    std::vector<u64> r = c_;
    int const dd = d.degree();
    if (degree() < dd)
        return {PolyModP({}, p_), *this};
    std::vector<u64> q(degree() - dd + 1, 0);
    u64 const inv = invmod(d.lead(), p_);
    for (int i = degree(); i >= dd; --i) {
        u64 coef = mulmod(r[i], inv, p_);
        q[i - dd] = coef;
        if (coef == 0)
            continue;
        for (int j = 0; j <= dd; ++j)
            r[i - dd + j] = (r[i - dd + j] + p_ - mulmod(coef, d.c_[j], p_)) % p_;
    }
    r.resize(dd);
    return {PolyModP(std::move(q), p_), PolyModP(std::move(r), p_)};
}

PolyModP PolyModP::powmod(PolyModP const & base, Integer const & e) const
{
    PolyModP result({1}, p_), b = base % *this;
    Integer k = e;
    size_t bits = mpz_sizeinbase(k.get_mpz_t(), 2);
    for (size_t i = bits; i-- > 0;) {
        result = (result * result) % *this;
        if (mpz_tstbit(k.get_mpz_t(), i))
            result = (result * b) % *this;
    }
    return result % *this;
}

PolyModP gcd(PolyModP a, PolyModP b)
{
    while (!b.is_zero()) {
        PolyModP r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

namespace {

void split_roots(PolyModP const & f, std::vector<u64> & out)
{
    /* f monic, product of distinct linear factors */
    u64 const p = f.modulus();
    if (f.degree() <= 0)
        return;
    if (f.degree() == 1) {
        out.push_back((p - f.coeffs()[0]) % p);
        return;
    }
    if (p == 2) {
        for (u64 x = 0; x < 2; ++x)
            if (f(x) == 0)
                out.push_back(x);
        return;
    }
    /* deterministic Cantor-Zassenhaus: gcd(f, (x+a)^((p-1)/2) - 1) for a = 0, 1, ... */
    for (u64 a = 0;; ++a) {
        PolyModP xa({a, 1}, p);
        PolyModP h = f.powmod(xa, from_u64((p - 1) / 2)) - PolyModP({1}, p);
        PolyModP g = gcd(f, h);
        if (g.degree() > 0 && g.degree() < f.degree()) {
            split_roots(g, out);
            split_roots((f / g).monic(), out);
            return;
        }
    }
}

} // namespace

std::vector<u64> roots_mod_p(PolyModP const & f)
{
    if (f.is_zero())
        throw std::invalid_argument("roots_mod_p: zero polynomial");
    u64 const p = f.modulus();
    std::vector<u64> out;
    if (f.degree() == 0)
        return out;
    PolyModP fm = f.monic();
    PolyModP x = PolyModP::x_power(1, p);
    PolyModP xp = fm.powmod(x, from_u64(p));
    PolyModP g = gcd(fm, xp - x);
    split_roots(g, out);
    std::sort(out.begin(), out.end());
    return out;
}

bool is_squarefree(PolyModP const & f)
{
    if (f.degree() <= 0)
        return true;
    return gcd(f, f.derivative()).degree() == 0;
}

std::vector<int> factor_degrees(PolyModP const & f)
{
    if (!is_squarefree(f))
        throw std::invalid_argument("factor_degrees: polynomial is not squarefree");
    u64 const p = f.modulus();
    std::vector<int> out;
    PolyModP rest = f.monic();
    PolyModP x = PolyModP::x_power(1, p);
    PolyModP h = x;
    for (int d = 1; rest.degree() >= 2 * d; ++d) {
        h = rest.powmod(h, from_u64(p));
        PolyModP g = gcd(rest, h - x);
        if (g.degree() > 0) {
            for (int i = 0; i < g.degree() / d; ++i)
                out.push_back(d);
            rest = (rest / g).monic();
            h = h % rest;
        }
    }
    if (rest.degree() > 0)
        out.push_back(rest.degree());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace rcap
