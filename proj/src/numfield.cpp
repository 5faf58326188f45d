#include "rcap/numfield.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace rcap {

namespace {

/* Power-basis arithmetic, parameterized by the radicand list so that it also
 * serves the subfield recursions of sign_at and sqrt. */

FieldElem pmul(FieldElem const & x, FieldElem const & y, std::vector<Integer> const & rads)
{
    size_t const n = x.size();
    FieldElem z(n, 0);
    for (size_t s = 0; s < n; ++s) {
        if (x[s] == 0)
            continue;
        for (size_t t = 0; t < n; ++t) {
            if (y[t] == 0)
                continue;
            Rational c = x[s] * y[t];
            size_t both = s & t;
            for (size_t i = 0; both; ++i, both >>= 1)
                if (both & 1)
                    c *= rads[i];
            z[s ^ t] += c;
        }
    }
    return z;
}

FieldElem pconj(FieldElem const & x, unsigned mask)
{
    FieldElem y = x;
    for (size_t s = 0; s < x.size(); ++s)
        if (std::popcount(static_cast<unsigned>(s) & mask) & 1)
            y[s] = -y[s];
    return y;
}

FieldElem pconj_product(FieldElem const & x, std::vector<Integer> const & rads)
{
    /* product of all conjugates other than x itself */
    size_t const n = x.size();
    FieldElem y(n, 0);
    y[0] = 1;
    for (unsigned mask = 1; mask < n; ++mask)
        y = pmul(y, pconj(x, mask), rads);
    return y;
}

Rational pnorm(FieldElem const & x, std::vector<Integer> const & rads)
{
    return pmul(x, pconj_product(x, rads), rads)[0];
}

FieldElem pinv(FieldElem const & x, std::vector<Integer> const & rads)
{
    FieldElem y = pconj_product(x, rads);
    Rational N = pmul(x, y, rads)[0];
    if (N == 0)
        throw std::domain_error("inverse of zero");
    for (auto & c : y)
        c /= N;
    return y;
}

bool pzero(FieldElem const & x)
{
    return std::all_of(x.begin(), x.end(), [](Rational const & c) { return c == 0; });
}

int psign(FieldElem const & x, std::vector<Integer> const & rads, unsigned mask)
{
    size_t const n = x.size();
    if (n == 1)
        return sgn(x[0]);
    size_t const h = n / 2;
    size_t const k = rads.size() - 1;
    std::vector<Integer> sub(rads.begin(), rads.end() - 1);
    FieldElem A(x.begin(), x.begin() + h), B(x.begin() + h, x.end());
    if ((mask >> k) & 1)
        for (auto & c : B)
            c = -c;
    int sa = psign(A, sub, mask), sb = psign(B, sub, mask);
    if (sa == 0)
        return sb;
    if (sb == 0 || sa == sb)
        return sa;
    FieldElem A2 = pmul(A, A, sub), B2 = pmul(B, B, sub);
    for (size_t i = 0; i < h; ++i)
        A2[i] -= B2[i] * rads[k];
    int s = psign(A2, sub, mask);
    return s > 0 ? sa : (s < 0 ? -sa : 0);
}

std::optional<FieldElem> psqrt(FieldElem const & x, std::vector<Integer> const & rads)
{
    size_t const n = x.size();
    if (n == 1) {
        Rational r;
        if (x[0] < 0 || !is_square(x[0], &r))
            return std::nullopt;
        return FieldElem{r};
    }
    if (pzero(x))
        return x;
    size_t const h = n / 2;
    Integer const & rk = rads.back();
    std::vector<Integer> sub(rads.begin(), rads.end() - 1);
    FieldElem A(x.begin(), x.begin() + h), B(x.begin() + h, x.end());
    auto join = [&](FieldElem const & C, FieldElem const & E) {
        FieldElem y(n);
        std::copy(C.begin(), C.end(), y.begin());
        std::copy(E.begin(), E.end(), y.begin() + h);
        return y;
    };
    auto check = [&](FieldElem const & y) { return pmul(y, y, rads) == x; };
    if (pzero(B)) {
        if (auto c = psqrt(A, sub)) {
            auto y = join(*c, FieldElem(h, 0));
            if (check(y))
                return y;
        }
        FieldElem Ar = A;
        for (auto & c : Ar)
            c /= rk;
        if (auto e = psqrt(Ar, sub)) {
            auto y = join(FieldElem(h, 0), *e);
            if (check(y))
                return y;
        }
        return std::nullopt;
    }
    FieldElem N = pmul(A, A, sub), B2 = pmul(B, B, sub);
    for (size_t i = 0; i < h; ++i)
        N[i] -= B2[i] * rk;
    auto nr = psqrt(N, sub);
    if (!nr)
        return std::nullopt;
    for (int s : {1, -1}) {
        FieldElem C2(h);
        for (size_t i = 0; i < h; ++i)
            C2[i] = (A[i] + s * (*nr)[i]) / 2;
        auto C = psqrt(C2, sub);
        if (!C || pzero(*C))
            continue;
        FieldElem E = pmul(B, pinv(*C, sub), sub);
        for (auto & c : E)
            c /= 2;
        auto y = join(*C, E);
        if (check(y))
            return y;
    }
    return std::nullopt;
}

/* Rational matrix inverse by Gauss-Jordan. */
std::vector<FieldElem> rat_inverse(std::vector<FieldElem> M)
{
    size_t const n = M.size();
    std::vector<FieldElem> I(n, FieldElem(n, 0));
    for (size_t i = 0; i < n; ++i)
        I[i][i] = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        while (p < n && M[p][c] == 0)
            ++p;
        if (p == n)
            throw std::domain_error("singular basis matrix");
        std::swap(M[p], M[c]);
        std::swap(I[p], I[c]);
        Rational inv = 1 / M[c][c];
        for (size_t j = 0; j < n; ++j) {
            M[c][j] *= inv;
            I[c][j] *= inv;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == c || M[r][c] == 0)
                continue;
            Rational f = M[r][c];
            for (size_t j = 0; j < n; ++j) {
                M[r][j] -= f * M[c][j];
                I[r][j] -= f * I[c][j];
            }
        }
    }
    return I;
}

Integer quad_disc(Integer const & c)
{
    return mod_floor(c, 4) == 1 ? c : 4 * c;
}

Integer lcm_den(FieldElem const & x)
{
    Integer L = 1;
    for (auto const & c : x)
        L = lcm(L, Integer(c.get_den()));
    return L;
}

} // namespace

NumberField::NumberField(std::vector<Integer> radicands) : rad_(std::move(radicands))
{
    if (rad_.empty() || rad_.size() > 2)
        throw std::invalid_argument("NumberField: supports 1 or 2 radicands");
    for (auto const & r : rad_) {
        if (r == 0 || r == 1 || !is_squarefree(r))
            throw std::invalid_argument("NumberField: radicand must be squarefree and not 0 or 1: " + r.get_str());
    }
    if (rad_.size() == 2 && rad_[0] == rad_[1])
        throw std::invalid_argument("NumberField: radicands define the same quadratic field");
    n_ = size_t(1) << rad_.size();
    build_integral_basis();
}

void NumberField::build_integral_basis()
{
    size_t const n = n_;
    /* quadratic subfield generators */
    std::vector<FieldElem> omegas;
    for (size_t S = 1; S < n; ++S) {
        Integer P = 1;
        for (size_t i = 0; i < rad_.size(); ++i)
            if ((S >> i) & 1)
                P *= rad_[i];
        Integer c = squarefree_part(P);
        Integer g;
        if (!is_square(Integer(P / c), &g))
            throw std::logic_error("squarefree part mismatch");
        FieldElem w(n, 0);
        if (mod_floor(c, 4) == 1) {
            w[0] = Rational(1, 2);
            w[S] = Rational(1, 2 * g);
        } else {
            w[S] = Rational(1, g);
        }
        w[S].canonicalize();
        omegas.push_back(w);
    }
    std::vector<FieldElem> gens;
    for (size_t sub = 0; sub < (size_t(1) << omegas.size()); ++sub) {
        FieldElem x(n, 0);
        x[0] = 1;
        for (size_t i = 0; i < omegas.size(); ++i)
            if ((sub >> i) & 1)
                x = pmul(x, omegas[i], rad_);
        gens.push_back(x);
    }

    auto rebuild = [&](std::vector<FieldElem> const & g) {
        Integer L = 1;
        for (auto const & x : g)
            L = lcm(L, lcm_den(x));
        std::vector<ZVec> rows;
        for (auto const & x : g) {
            ZVec v(n);
            for (size_t j = 0; j < n; ++j) {
                Rational s = x[j] * L;
                v[j] = s.get_num();
            }
            rows.push_back(v);
        }
        IntMatrix H = hnf_lower(rows, n);
        basis_.assign(n, FieldElem(n, 0));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                basis_[i][j] = Rational(H(i, j), L);
                basis_[i][j].canonicalize();
            }
        basis_inv_ = rat_inverse(basis_);
    };

    auto in_lattice = [&](FieldElem const & x) {
        for (size_t j = 0; j < n; ++j) {
            Rational s = 0;
            for (size_t k = 0; k < n; ++k)
                s += x[k] * basis_inv_[k][j];
            if (s.get_den() != 1)
                return false;
        }
        return true;
    };

    auto is_alg_integer = [&](FieldElem const & x) {
        /* characteristic polynomial from the conjugates */
        std::vector<FieldElem> poly{FieldElem(n, 0)};
        poly[0][0] = 1;
        for (unsigned mask = 0; mask < n; ++mask) {
            FieldElem c = pconj(x, mask);
            std::vector<FieldElem> next(poly.size() + 1, FieldElem(n, 0));
            for (size_t i = 0; i < poly.size(); ++i) {
                for (size_t j = 0; j < n; ++j)
                    next[i + 1][j] += poly[i][j];
                FieldElem t = pmul(poly[i], c, rad_);
                for (size_t j = 0; j < n; ++j)
                    next[i][j] -= t[j];
            }
            poly = std::move(next);
        }
        for (auto const & co : poly) {
            if (co[0].get_den() != 1)
                return false;
            for (size_t j = 1; j < n; ++j)
                if (co[j] != 0)
                    throw std::logic_error("characteristic polynomial not rational");
        }
        return true;
    };

    rebuild(gens);
    for (bool grown = true; grown;) {
        grown = false;
        for (size_t i = 0; i < n && !grown; ++i)
            for (size_t j = i; j < n && !grown; ++j) {
                FieldElem pr = pmul(basis_[i], basis_[j], rad_);
                if (!in_lattice(pr)) {
                    gens = basis_;
                    gens.push_back(pr);
                    rebuild(gens);
                    grown = true;
                }
            }
    }

    auto compute_disc = [&]() {
        Rational det = 1;
        std::vector<FieldElem> G(n, FieldElem(n, 0));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                G[i][j] = pmul(basis_[i], basis_[j], rad_)[0] * static_cast<long>(n);
        /* Gaussian elimination determinant */
        for (size_t c = 0; c < n; ++c) {
            size_t p = c;
            while (p < n && G[p][c] == 0)
                ++p;
            if (p == n)
                return Rational(0);
            if (p != c) {
                std::swap(G[p], G[c]);
                det = -det;
            }
            det *= G[c][c];
            for (size_t r = c + 1; r < n; ++r) {
                Rational f = G[r][c] / G[c][c];
                for (size_t j = c; j < n; ++j)
                    G[r][j] -= f * G[c][j];
            }
        }
        return det;
    };

    Integer target = 1;
    for (size_t S = 1; S < n; ++S) {
        Integer P = 1;
        for (size_t i = 0; i < rad_.size(); ++i)
            if ((S >> i) & 1)
                P *= rad_[i];
        target *= quad_disc(squarefree_part(P));
    }

    for (;;) {
        Rational d = compute_disc();
        if (d.get_den() != 1)
            throw std::logic_error("non-integral discriminant");
        disc_ = d.get_num();
        if (disc_ == target)
            break;
        Integer ratio = disc_ / target, idx;
        if (disc_ % target != 0 || !is_square(abs(ratio), &idx))
            throw std::logic_error("order discriminant inconsistent with field discriminant");
        bool found = false;
        for (auto const & pp : factor(idx)) {
            u64 const p = pp.p;
            std::vector<u64> v(n, 0);
            for (;;) {
                size_t pos = 0;
                while (pos < n && ++v[pos] == p)
                    v[pos++] = 0;
                if (pos == n)
                    break;
                FieldElem x(n, 0);
                for (size_t i = 0; i < n; ++i)
                    for (size_t j = 0; j < n; ++j)
                        x[j] += basis_[i][j] * Rational(from_u64(v[i]), from_u64(p));
                if (in_lattice(x) || !is_alg_integer(x))
                    continue;
                gens = basis_;
                gens.push_back(x);
                rebuild(gens);
                found = true;
                break;
            }
            if (found)
                break;
        }
        if (!found)
            throw std::logic_error("integral basis enlargement failed");
    }

    mult_.assign(n, std::vector<ZVec>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            mult_[i][j] = integral(pmul(basis_[i], basis_[j], rad_));
    aut_.clear();
    for (unsigned mask = 0; mask < n; ++mask) {
        IntMatrix A(n, n);
        for (size_t i = 0; i < n; ++i) {
            ZVec r = integral(pconj(basis_[i], mask));
            for (size_t j = 0; j < n; ++j)
                A(i, j) = r[j];
        }
        aut_.push_back(std::move(A));
    }
}

bool NumberField::totally_real() const
{
    return std::all_of(rad_.begin(), rad_.end(), [](Integer const & r) { return r > 0; });
}

FieldElem NumberField::one() const
{
    return from_int(1);
}

FieldElem NumberField::from_int(Integer const & a) const
{
    FieldElem x(n_, 0);
    x[0] = a;
    return x;
}

FieldElem NumberField::sqrt_radicand(size_t i) const
{
    FieldElem x(n_, 0);
    x[size_t(1) << i] = 1;
    return x;
}

FieldElem NumberField::to_power(ZVec const & v) const
{
    FieldElem x(n_, 0);
    for (size_t i = 0; i < n_; ++i) {
        if (v[i] == 0)
            continue;
        for (size_t j = 0; j < n_; ++j)
            x[j] += basis_[i][j] * v[i];
    }
    return x;
}

FieldElem NumberField::integral_coords(FieldElem const & x) const
{
    FieldElem v(n_, 0);
    for (size_t j = 0; j < n_; ++j)
        for (size_t k = 0; k < n_; ++k)
            if (x[k] != 0)
                v[j] += x[k] * basis_inv_[k][j];
    return v;
}

std::optional<ZVec> NumberField::to_integral(FieldElem const & x) const
{
    FieldElem c = integral_coords(x);
    ZVec v(n_);
    for (size_t j = 0; j < n_; ++j) {
        if (c[j].get_den() != 1)
            return std::nullopt;
        v[j] = c[j].get_num();
    }
    return v;
}

ZVec NumberField::integral(FieldElem const & x) const
{
    auto v = to_integral(x);
    if (!v)
        throw std::domain_error("element is not integral: " + format(x));
    return *v;
}

FieldElem NumberField::add(FieldElem const & x, FieldElem const & y) const
{
    FieldElem z(n_);
    for (size_t i = 0; i < n_; ++i)
        z[i] = x[i] + y[i];
    return z;
}

FieldElem NumberField::sub(FieldElem const & x, FieldElem const & y) const
{
    FieldElem z(n_);
    for (size_t i = 0; i < n_; ++i)
        z[i] = x[i] - y[i];
    return z;
}

FieldElem NumberField::mul(FieldElem const & x, FieldElem const & y) const { return pmul(x, y, rad_); }

FieldElem NumberField::scale(FieldElem const & x, Rational const & c) const
{
    FieldElem z = x;
    for (auto & a : z)
        a *= c;
    return z;
}

FieldElem NumberField::neg(FieldElem const & x) const { return scale(x, -1); }

FieldElem NumberField::pow(FieldElem const & x, Integer const & e) const
{
    if (e < 0)
        return pow(inverse(x), -e);
    FieldElem r = one(), b = x;
    size_t const bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (size_t i = 0; i < bits; ++i) {
        if (mpz_tstbit(e.get_mpz_t(), i))
            r = mul(r, b);
        if (i + 1 < bits)
            b = mul(b, b);
    }
    return r;
}

FieldElem NumberField::inverse(FieldElem const & x) const { return pinv(x, rad_); }

FieldElem NumberField::conj(FieldElem const & x, unsigned mask) const { return pconj(x, mask); }

Rational NumberField::norm(FieldElem const & x) const { return pnorm(x, rad_); }

Rational NumberField::trace(FieldElem const & x) const { return x[0] * static_cast<long>(n_); }

bool NumberField::is_zero(FieldElem const & x) const { return pzero(x); }

bool NumberField::is_rational(FieldElem const & x) const
{
    return std::all_of(x.begin() + 1, x.end(), [](Rational const & c) { return c == 0; });
}

bool NumberField::is_integral(FieldElem const & x) const { return to_integral(x).has_value(); }

ZVec NumberField::mul(ZVec const & x, ZVec const & y) const
{
    ZVec z(n_, 0);
    for (size_t i = 0; i < n_; ++i) {
        if (x[i] == 0)
            continue;
        for (size_t j = 0; j < n_; ++j) {
            if (y[j] == 0)
                continue;
            Integer c = x[i] * y[j];
            auto const & m = mult_[i][j];
            for (size_t k = 0; k < n_; ++k)
                if (m[k] != 0)
                    z[k] += c * m[k];
        }
    }
    return z;
}

ZVec NumberField::conj(ZVec const & x, unsigned mask) const
{
    ZVec z(n_, 0);
    auto const & A = aut_[mask];
    for (size_t i = 0; i < n_; ++i)
        if (x[i] != 0)
            for (size_t j = 0; j < n_; ++j)
                z[j] += x[i] * A(i, j);
    return z;
}

Integer NumberField::norm(ZVec const & x) const
{
    Rational N = norm(to_power(x));
    return N.get_num();
}

IntMatrix NumberField::mult_matrix(ZVec const & x) const
{
    IntMatrix M(n_, n_);
    for (size_t i = 0; i < n_; ++i) {
        ZVec ei(n_, 0);
        ei[i] = 1;
        ZVec r = mul(x, ei);
        for (size_t j = 0; j < n_; ++j)
            M(i, j) = r[j];
    }
    return M;
}

IntMatrix NumberField::trace_gram() const
{
    IntMatrix G(n_, n_);
    for (size_t i = 0; i < n_; ++i)
        for (size_t j = 0; j < n_; ++j) {
            Rational t = trace(pmul(basis_[i], basis_[j], rad_));
            G(i, j) = t.get_num();
        }
    return G;
}

std::vector<std::complex<long double>> NumberField::embed(FieldElem const & x) const
{
    std::vector<std::complex<long double>> roots;
    for (auto const & r : rad_) {
        long double v = std::sqrt(std::fabs(r.get_d()));
        roots.push_back(r > 0 ? std::complex<long double>(v, 0) : std::complex<long double>(0, v));
    }
    std::vector<std::complex<long double>> out;
    for (unsigned mask = 0; mask < n_; ++mask) {
        std::complex<long double> s = 0;
        for (size_t S = 0; S < n_; ++S) {
            if (x[S] == 0)
                continue;
            std::complex<long double> b = 1;
            for (size_t i = 0; i < rad_.size(); ++i)
                if ((S >> i) & 1)
                    b *= ((mask >> i) & 1) ? -roots[i] : roots[i];
            s += static_cast<long double>(x[S].get_d()) * b;
        }
        out.push_back(s);
    }
    return out;
}

std::vector<long double> NumberField::embed_real(FieldElem const & x) const
{
    if (!totally_real())
        throw std::domain_error("embed_real on a field with complex places");
    std::vector<long double> out;
    for (auto const & z : embed(x))
        out.push_back(z.real());
    return out;
}

int NumberField::sign_at(FieldElem const & x, unsigned mask) const
{
    if (!totally_real())
        throw std::domain_error("sign_at on a field with complex places");
    return psign(x, rad_, mask);
}

std::optional<FieldElem> NumberField::sqrt(FieldElem const & x) const { return psqrt(x, rad_); }

std::string NumberField::format(FieldElem const & x) const
{
    std::ostringstream os;
    bool first = true;
    for (size_t S = 0; S < n_; ++S) {
        if (x[S] == 0)
            continue;
        Rational c = x[S];
        if (!first)
            os << (c < 0 ? " - " : " + ");
        else if (c < 0)
            os << "-";
        Rational a = abs(c);
        std::string mon;
        for (size_t i = 0; i < rad_.size(); ++i)
            if ((S >> i) & 1)
                mon += (mon.empty() ? "" : "*") + std::string("sqrt(") + rad_[i].get_str() + ")";
        if (mon.empty())
            os << a.get_str();
        else if (a == 1)
            os << mon;
        else
            os << a.get_str() << "*" << mon;
        first = false;
    }
    return first ? "0" : os.str();
}

/* ---- ideals ---- */

Integer Ideal::norm() const
{
    Integer N = 1;
    for (size_t i = 0; i < H_.rows(); ++i)
        N *= H_(i, i);
    return N;
}

bool Ideal::contains(ZVec const & v) const { return hnf_solve(H_, v).has_value(); }

bool Ideal::operator<(Ideal const & o) const
{
    for (size_t i = 0; i < H_.rows(); ++i)
        for (size_t j = 0; j <= i; ++j)
            if (H_(i, j) != o.H_(i, j))
                return H_(i, j) < o.H_(i, j);
    return false;
}

std::string Ideal::key() const
{
    std::string s;
    for (size_t i = 0; i < H_.rows(); ++i)
        for (size_t j = 0; j <= i; ++j)
            s += H_(i, j).get_str() + ",";
    return s;
}

Ideal ideal_from_generators(NumberField const & K, std::vector<ZVec> const & gens)
{
    size_t const n = K.degree();
    Integer D = 0;
    std::vector<ZVec> rows;
    for (auto const & g : gens) {
        Integer N = abs(K.norm(g));
        if (N == 0)
            continue;
        D = D == 0 ? N : gcd(D, N);
        IntMatrix M = K.mult_matrix(g);
        for (size_t i = 0; i < n; ++i)
            rows.push_back(M.row(i));
    }
    if (D == 0)
        throw std::domain_error("zero ideal");
    return Ideal(hnf_lower(rows, n, &D));
}

Ideal principal_ideal(NumberField const & K, ZVec const & g) { return ideal_from_generators(K, {g}); }

Ideal rational_ideal(NumberField const & K, Integer const & a)
{
    ZVec v(K.degree(), 0);
    v[0] = a;
    return principal_ideal(K, v);
}

Ideal unit_ideal(NumberField const & K) { return Ideal(IntMatrix::identity(K.degree())); }

Ideal ideal_mul(NumberField const & K, Ideal const & I, Ideal const & J)
{
    size_t const n = K.degree();
    Integer D = I.norm() * J.norm();
    std::vector<ZVec> rows;
    auto const a = I.basis(), b = J.basis();
    for (auto const & x : a)
        for (auto const & y : b)
            rows.push_back(K.mul(x, y));
    return Ideal(hnf_lower(rows, n, &D));
}

Ideal ideal_add(NumberField const & K, Ideal const & I, Ideal const & J)
{
    Integer D = gcd(I.norm(), J.norm());
    auto rows = I.basis();
    for (auto const & r : J.basis())
        rows.push_back(r);
    return Ideal(hnf_lower(rows, K.degree(), &D));
}

Ideal ideal_pow(NumberField const & K, Ideal const & I, unsigned e)
{
    Ideal r = unit_ideal(K), b = I;
    while (e) {
        if (e & 1)
            r = ideal_mul(K, r, b);
        e >>= 1;
        if (e)
            b = ideal_mul(K, b, b);
    }
    return r;
}

Ideal ideal_conj(NumberField const & K, Ideal const & I, unsigned mask)
{
    Integer D = I.norm();
    std::vector<ZVec> rows;
    for (auto const & r : I.basis())
        rows.push_back(K.conj(r, mask));
    return Ideal(hnf_lower(rows, K.degree(), &D));
}

std::optional<Ideal> ideal_div(NumberField const & K, Ideal const & I, Ideal const & J)
{
    Integer const NJ = J.norm();
    if (!mpz_divisible_p(I.norm().get_mpz_t(), NJ.get_mpz_t()))
        return std::nullopt;
    Ideal X = I;
    for (unsigned mask = 1; mask < K.degree(); ++mask)
        X = ideal_mul(K, X, ideal_conj(K, J, mask));
    auto rows = X.basis();
    for (auto & r : rows)
        for (auto & c : r) {
            if (!mpz_divisible_p(c.get_mpz_t(), NJ.get_mpz_t()))
                return std::nullopt;
            c /= NJ;
        }
    Ideal Q(hnf_lower(rows, K.degree()));
    if (!(ideal_mul(K, Q, J) == I))
        return std::nullopt;
    return Q;
}

bool generates(NumberField const & K, FieldElem const & x, Ideal const & I)
{
    auto v = K.to_integral(x);
    if (!v || !I.contains(*v))
        return false;
    return abs(K.norm(x)) == Rational(I.norm());
}

/* ---- prime ideals and residue fields ---- */

namespace {

struct ResidueData {
    std::once_flag once;
    u64 one = 0;
    u64 gen = 0;
    std::vector<u64> factors;
    std::vector<u64> exp, log;                   // full tables for small q
    std::unordered_map<u64, u64> baby;           // BSGS otherwise
    u64 step = 0, giant = 0;
};

u64 const kTableLimit = u64(1) << 18;

} // namespace

PrimeIdeal::PrimeIdeal(NumberField const & K, u64 p, int e, int f, Ideal P)
    : K_(&K), p_(p), e_(e), f_(f), P_(std::move(P))
{
    q_ = to_u64(P_.norm());
}

ZVec PrimeIdeal::canonical(ZVec v) const
{
    auto const & H = P_.hnf();
    size_t const n = H.rows();
    for (size_t j = n; j-- > 0;) {
        Integer q = floor_div(v[j], H(j, j));
        if (q != 0)
            for (size_t k = 0; k <= j; ++k)
                v[k] -= q * H(j, k);
    }
    return v;
}

u64 PrimeIdeal::index(ZVec const & v) const
{
    auto const & H = P_.hnf();
    ZVec c = canonical(v);
    u64 idx = 0, radix = 1;
    for (size_t j = 0; j < H.rows(); ++j) {
        idx += to_u64(c[j]) * radix;
        radix *= to_u64(H(j, j));
    }
    return idx;
}

ZVec PrimeIdeal::element(u64 idx) const
{
    auto const & H = P_.hnf();
    ZVec v(H.rows(), 0);
    for (size_t j = 0; j < H.rows(); ++j) {
        u64 h = to_u64(H(j, j));
        v[j] = from_u64(idx % h);
        idx /= h;
    }
    return v;
}

u64 PrimeIdeal::mul(u64 a, u64 b) const
{
    if (f_ == 1 && P_.hnf()(0, 0) == from_u64(q_))
        return mulmod(a, b, q_);
    return index(K_->mul(element(a), element(b)));
}

u64 PrimeIdeal::pow(u64 a, Integer e) const
{
    if (e < 0)
        throw std::invalid_argument("negative residue exponent");
    Integer const Q1 = from_u64(q_ - 1);
    if (a != 0 && e >= Q1)
        e = mod_floor(e, Q1);
    u64 r = index(K_->integral(K_->one())), b = a;
    size_t const bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (size_t i = 0; i < bits; ++i) {
        if (mpz_tstbit(e.get_mpz_t(), i))
            r = mul(r, b);
        if (i + 1 < bits)
            b = mul(b, b);
    }
    return r;
}

u64 PrimeIdeal::residue(ZVec const & v) const { return index(v); }

u64 PrimeIdeal::residue(FieldElem const & x) const
{
    NumberField const & K = *K_;
    size_t const n = K.degree();
    /* x = v / den with v integral */
    Integer den = 1;
    for (auto const & c : K.integral_coords(x))
        den = lcm(den, Integer(c.get_den()));
    ZVec v = K.integral(K.scale(x, den));
    Integer const P = from_u64(p_);
    if (!mpz_divisible_p(den.get_mpz_t(), P.get_mpz_t())) {
        u64 num = index(v);
        u64 d = index(K.integral(K.from_int(den)));
        if (num == 0)
            throw std::domain_error("element is not a unit at the prime");
        return mul(num, pow(d, from_u64(q_ - 2)));
    }
    /* find c outside P with c x integral: c A = 0 mod den where A = mult_matrix(v) */
    IntMatrix A = K.mult_matrix(v);
    IntMatrix M(2 * n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            M(i, j) = A(i, j);
    for (size_t i = 0; i < n; ++i)
        M(n + i, i) = den;
    std::vector<ZVec> cands;
    for (auto const & k : left_kernel(M))
        cands.push_back(ZVec(k.begin(), k.begin() + n));
    for (auto const & c : cands) {
        if (P_.contains(c))
            continue;
        ZVec cv = K.mul(c, v);
        for (auto & a : cv) {
            if (!mpz_divisible_p(a.get_mpz_t(), den.get_mpz_t()))
                throw std::logic_error("denominator clearing failed");
            a /= den;
        }
        u64 num = index(cv), dc = index(c);
        if (num == 0)
            throw std::domain_error("element is not a unit at the prime");
        return mul(num, pow(dc, from_u64(q_ - 2)));
    }
    /* all kernel generators lie in P: try sums */
    for (size_t i = 0; i < cands.size(); ++i)
        for (size_t j = i + 1; j < cands.size(); ++j) {
            ZVec c(n);
            for (size_t k = 0; k < n; ++k)
                c[k] = cands[i][k] + cands[j][k];
            if (P_.contains(c))
                continue;
            ZVec cv = K.mul(c, v);
            for (auto & a : cv)
                a /= den;
            u64 num = index(cv), dc = index(c);
            if (num == 0)
                throw std::domain_error("element is not a unit at the prime");
            return mul(num, pow(dc, from_u64(q_ - 2)));
        }
    throw std::domain_error("element has negative valuation at the prime");
}

namespace {

std::mutex g_residue_mutex;
std::map<std::string, std::shared_ptr<ResidueData>> g_residue_cache;

std::string field_key(NumberField const & K)
{
    std::string s;
    for (auto const & r : K.radicands())
        s += r.get_str() + ";";
    return s;
}

} // namespace

static ResidueData & residue_data(NumberField const & K, PrimeIdeal const & P)
{
    std::shared_ptr<ResidueData> data;
    {
        std::lock_guard<std::mutex> lock(g_residue_mutex);
        auto & slot = g_residue_cache[field_key(K) + "|" + P.ideal().key()];
        if (!slot)
            slot = std::make_shared<ResidueData>();
        data = slot;
    }
    std::call_once(data->once, [&]() {
        u64 const q = P.q();
        data->one = P.index(K.integral(K.one()));
        u64 const order = q - 1;
        if (order > 1)
            data->factors = prime_divisors(order);
        for (u64 g = 1; g < q; ++g) {
            bool ok = true;
            for (u64 l : data->factors)
                if (P.pow(g, from_u64(order / l)) == data->one) {
                    ok = false;
                    break;
                }
            if (ok) {
                data->gen = g;
                break;
            }
        }
        if (q <= kTableLimit) {
            data->exp.resize(order);
            data->log.assign(q, 0);
            u64 cur = data->one;
            for (u64 k = 0; k < order; ++k) {
                data->exp[k] = cur;
                data->log[cur] = k;
                cur = P.mul(cur, data->gen);
            }
        } else {
            u64 const s = static_cast<u64>(std::ceil(std::sqrt(static_cast<long double>(order))));
            u64 cur = data->one;
            for (u64 j = 0; j < s; ++j) {
                data->baby.emplace(cur, j);
                cur = P.mul(cur, data->gen);
            }
            data->step = s;
            data->giant = P.pow(data->gen, from_u64(order - s % order));
        }
    });
    /* keep the shared state alive for the lifetime of the cache */
    return *data;
}

u64 PrimeIdeal::one() const { return residue_data(*K_, *this).one; }

u64 PrimeIdeal::generator() const { return residue_data(*K_, *this).gen; }

u64 PrimeIdeal::dlog(u64 idx) const
{
    if (idx == 0)
        throw std::domain_error("discrete log of zero residue");
    ResidueData * data = &residue_data(*K_, *this);
    if (!data->log.empty())
        return data->log[idx];
    u64 const order = q_ - 1;
    u64 y = idx;
    for (u64 i = 0; i <= order / data->step; ++i) {
        auto it = data->baby.find(y);
        if (it != data->baby.end())
            return (i * data->step + it->second) % order;
        y = mul(y, data->giant);
    }
    throw std::logic_error("discrete log failed in residue field");
}

std::string PrimeIdeal::describe() const
{
    std::ostringstream os;
    os << "P(" << p_ << ";e=" << e_ << ",f=" << f_ << ";hnf=" << P_.key() << ")";
    return os.str();
}

std::vector<PrimeIdeal> primes_above(NumberField const & K, u64 p)
{
    if (!is_prime_u64(p))
        throw std::invalid_argument("primes_above: not a prime");
    size_t const n = K.degree();
    auto const & rad = K.radicands();
    Integer const P = from_u64(p);
    ZVec pv(n, 0);
    pv[0] = P;
    /* generator sets of the primes above p in each quadratic subfield */
    std::vector<std::vector<std::vector<ZVec>>> per_sub;
    for (size_t S = 1; S < n; ++S) {
        Integer prod = 1;
        for (size_t i = 0; i < rad.size(); ++i)
            if ((S >> i) & 1)
                prod *= rad[i];
        Integer c = squarefree_part(prod), g;
        is_square(Integer(prod / c), &g);
        int const t = mod_floor(c, 4) == 1 ? 1 : 0;
        FieldElem w(n, 0);
        if (t) {
            w[0] = Rational(1, 2);
            w[S] = Rational(1, 2 * g);
        } else {
            w[S] = Rational(1, g);
        }
        w[S].canonicalize();
        ZVec wz = K.integral(w);
        Integer D = t ? c : 4 * c;
        Integer c0 = (t - D) / 4;   // omega^2 = t omega - c0
        PolyModP f = PolyModP::from_integers({c0, Integer(-t), Integer(1)}, p);
        auto roots = roots_mod_p(f);
        std::vector<std::vector<ZVec>> sets;
        if (roots.empty()) {
            sets.push_back({pv});
        } else {
            for (u64 r : roots) {
                ZVec x = wz;
                x[0] -= from_u64(r);
                sets.push_back({pv, x});
            }
        }
        per_sub.push_back(std::move(sets));
    }
    std::vector<Ideal> found;
    std::vector<size_t> choice(per_sub.size(), 0);
    for (;;) {
        std::vector<ZVec> gens;
        for (size_t s = 0; s < per_sub.size(); ++s)
            for (auto const & g : per_sub[s][choice[s]])
                gens.push_back(g);
        Ideal I = ideal_from_generators(K, gens);
        if (I.norm() > 1 && std::find(found.begin(), found.end(), I) == found.end())
            found.push_back(I);
        size_t pos = 0;
        while (pos < choice.size() && ++choice[pos] == per_sub[pos].size())
            choice[pos++] = 0;
        if (pos == choice.size())
            break;
    }
    std::sort(found.begin(), found.end());
    size_t const g = found.size();
    int f = 0;
    for (Integer N = found.at(0).norm(); N > 1; N /= P)
        ++f;
    for (auto const & I : found)
        if (I.norm() != found[0].norm())
            throw std::domain_error("primes above p with different residue degrees");
    if (n % (g * f) != 0)
        throw std::domain_error("inconsistent splitting data");
    int const e = static_cast<int>(n / (g * f));
    Ideal prod = unit_ideal(K);
    for (auto const & I : found)
        prod = ideal_mul(K, prod, ideal_pow(K, I, e));
    if (!(prod == rational_ideal(K, P)))
        throw std::domain_error("unsupported decomposition of " + std::to_string(p) +
                                " (inertia group not cyclic)");
    std::vector<PrimeIdeal> out;
    for (auto & I : found)
        out.emplace_back(K, p, e, f, std::move(I));
    return out;
}

int ideal_valuation(NumberField const & K, Ideal const & I, PrimeIdeal const & P)
{
    int v = 0;
    Ideal cur = I;
    while (mpz_divisible_p(cur.norm().get_mpz_t(), P.ideal().norm().get_mpz_t())) {
        auto q = ideal_div(K, cur, P.ideal());
        if (!q)
            break;
        cur = *q;
        ++v;
    }
    return v;
}

ResidueGroup::ResidueGroup(NumberField const & K, std::vector<PrimeIdeal> primes) : K_(&K), primes_(std::move(primes))
{
    size_t const s = primes_.size();
    std::vector<std::string> labels;
    IntMatrix R(s, s);
    for (size_t j = 0; j < s; ++j) {
        labels.push_back("res" + std::to_string(j));
        R(j, j) = from_u64(primes_[j].q() - 1);
        for (size_t i = 0; i < j; ++i)
            if (primes_[i] == primes_[j])
                throw std::invalid_argument("modulus primes must be distinct");
    }
    G_ = group_from_relations(labels, R);
}

ZVec ResidueGroup::raw_dlog(FieldElem const & x) const
{
    ZVec out;
    for (auto const & P : primes_)
        out.push_back(from_u64(P.dlog(P.residue(x))));
    return out;
}

Integer ResidueGroup::norm() const
{
    Integer N = 1;
    for (auto const & P : primes_)
        N *= from_u64(P.q());
    return N;
}

bool ResidueGroup::coprime(Ideal const & I) const
{
    for (auto const & P : primes_)
        if (ideal_add(*K_, I, P.ideal()).norm() != 1)
            return false;
    return true;
}

} // namespace rcap
