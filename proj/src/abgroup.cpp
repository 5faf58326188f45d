#include "rcap/abgroup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace rcap {

IntMatrix IntMatrix::identity(size_t n)
{
    IntMatrix m(n, n);
    for (size_t i = 0; i < n; ++i)
        m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(std::vector<ZVec> const & rows, size_t cols)
{
    IntMatrix m(rows.size(), cols);
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols)
            throw std::invalid_argument("IntMatrix::from_rows: ragged rows");
        for (size_t j = 0; j < cols; ++j)
            m(i, j) = rows[i][j];
    }
    return m;
}

ZVec IntMatrix::row(size_t i) const
{
    return ZVec(a_.begin() + i * c_, a_.begin() + (i + 1) * c_);
}

std::vector<ZVec> IntMatrix::to_rows() const
{
    std::vector<ZVec> out;
    for (size_t i = 0; i < r_; ++i)
        out.push_back(row(i));
    return out;
}

IntMatrix IntMatrix::operator*(IntMatrix const & o) const
{
    if (c_ != o.r_)
        throw std::invalid_argument("IntMatrix: dimension mismatch");
    IntMatrix m(r_, o.c_);
    for (size_t i = 0; i < r_; ++i)
        for (size_t k = 0; k < c_; ++k) {
            if ((*this)(i, k) == 0)
                continue;
            for (size_t j = 0; j < o.c_; ++j)
                m(i, j) += (*this)(i, k) * o(k, j);
        }
    return m;
}

IntMatrix IntMatrix::transpose() const
{
    IntMatrix m(c_, r_);
    for (size_t i = 0; i < r_; ++i)
        for (size_t j = 0; j < c_; ++j)
            m(j, i) = (*this)(i, j);
    return m;
}

bool IntMatrix::is_zero() const
{
    return std::all_of(a_.begin(), a_.end(), [](Integer const & x) { return x == 0; });
}

Integer IntMatrix::det() const
{
    if (r_ != c_)
        throw std::invalid_argument("det of non-square matrix");
    size_t const n = r_;
    if (n == 0)
        return 1;
    IntMatrix m = *this;
    Integer prev = 1;
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            size_t s = k + 1;
            while (s < n && m(s, k) == 0)
                ++s;
            if (s == n)
                return 0;
            m.swap_rows(k, s);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j) {
                Integer t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                m(i, j) = t;
            }
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

void IntMatrix::swap_rows(size_t i, size_t j)
{
    if (i == j)
        return;
    for (size_t k = 0; k < c_; ++k)
        std::swap((*this)(i, k), (*this)(j, k));
}

void IntMatrix::swap_cols(size_t i, size_t j)
{
    if (i == j)
        return;
    for (size_t k = 0; k < r_; ++k)
        std::swap((*this)(k, i), (*this)(k, j));
}

void IntMatrix::add_row(size_t dst, size_t src, Integer const & k)
{
    if (k == 0)
        return;
    for (size_t j = 0; j < c_; ++j)
        (*this)(dst, j) += k * (*this)(src, j);
}

void IntMatrix::add_col(size_t dst, size_t src, Integer const & k)
{
    if (k == 0)
        return;
    for (size_t i = 0; i < r_; ++i)
        (*this)(i, dst) += k * (*this)(i, src);
}

void IntMatrix::negate_row(size_t i)
{
    for (size_t j = 0; j < c_; ++j)
        (*this)(i, j) = -(*this)(i, j);
}

void IntMatrix::negate_col(size_t j)
{
    for (size_t i = 0; i < r_; ++i)
        (*this)(i, j) = -(*this)(i, j);
}

namespace {

Integer fdiv_round(Integer const & a, Integer const & b)
{
    /* quotient minimizing |a - q b| */
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    Integer r = a - q * b;
    if (2 * abs(r) > abs(b))
        q += 1;
    return q;
}

} // namespace

SnfResult snf(IntMatrix const & M)
{
    size_t const R = M.rows(), C = M.cols();
    IntMatrix S = M, U = IntMatrix::identity(R), V = IntMatrix::identity(C);
    size_t const lim = std::min(R, C);
    for (size_t t = 0; t < lim; ++t) {
        for (;;) {
            /* smallest nonzero entry of the trailing block becomes the pivot */
            size_t pi = R, pj = C;
            if (S(t, t) != 0) {
                pi = t;
                pj = t;
            }
            for (size_t i = t; i < R; ++i)
                for (size_t j = t; j < C; ++j)
                    if (S(i, j) != 0 && (pi == R || abs(S(i, j)) < abs(S(pi, pj)))) {
                        pi = i;
                        pj = j;
                    }
            if (pi == R)
                goto done;
            S.swap_rows(t, pi);
            U.swap_rows(t, pi);
            S.swap_cols(t, pj);
            V.swap_cols(t, pj);
            bool clean = true;
            for (size_t i = t + 1; i < R; ++i) {
                if (S(i, t) == 0)
                    continue;
                Integer q = fdiv_round(S(i, t), S(t, t));
                S.add_row(i, t, -q);
                U.add_row(i, t, -q);
                if (S(i, t) != 0)
                    clean = false;
            }
            for (size_t j = t + 1; j < C; ++j) {
                if (S(t, j) == 0)
                    continue;
                Integer q = fdiv_round(S(t, j), S(t, t));
                S.add_col(j, t, -q);
                V.add_col(j, t, -q);
                if (S(t, j) != 0)
                    clean = false;
            }
            if (!clean)
                continue;
            bool divides = true;
            for (size_t i = t + 1; i < R && divides; ++i)
                for (size_t j = t + 1; j < C; ++j)
                    if (!mpz_divisible_p(S(i, j).get_mpz_t(), S(t, t).get_mpz_t())) {
                        S.add_row(t, i, 1);
                        U.add_row(t, i, 1);
                        divides = false;
                        break;
                    }
            if (divides)
                break;
        }
        if (S(t, t) < 0) {
            S.negate_row(t);
            U.negate_row(t);
        }
    }
done:
    return {std::move(U), std::move(S), std::move(V)};
}

EchelonResult echelon(IntMatrix const & M)
{
    size_t const R = M.rows(), C = M.cols();
    IntMatrix H = M, T = IntMatrix::identity(R);
    size_t r = 0;
    std::vector<size_t> pivots;
    for (size_t j = 0; j < C && r < R; ++j) {
        for (;;) {
            size_t best = R;
            for (size_t i = r; i < R; ++i)
                if (H(i, j) != 0 && (best == R || abs(H(i, j)) < abs(H(best, j))))
                    best = i;
            if (best == R)
                break;
            H.swap_rows(r, best);
            T.swap_rows(r, best);
            bool clean = true;
            for (size_t i = r + 1; i < R; ++i) {
                if (H(i, j) == 0)
                    continue;
                Integer q = fdiv_round(H(i, j), H(r, j));
                H.add_row(i, r, -q);
                T.add_row(i, r, -q);
                if (H(i, j) != 0)
                    clean = false;
            }
            if (clean)
                break;
        }
        if (r < R && H(r, j) != 0) {
            if (H(r, j) < 0) {
                H.negate_row(r);
                T.negate_row(r);
            }
            for (size_t i = 0; i < r; ++i) {
                Integer q = floor_div(H(i, j), H(r, j));
                H.add_row(i, r, -q);
                T.add_row(i, r, -q);
            }
            pivots.push_back(j);
            ++r;
        }
    }
    return {std::move(H), std::move(T), r};
}

std::vector<ZVec> left_kernel(IntMatrix const & M)
{
    auto e = echelon(M);
    std::vector<ZVec> out;
    for (size_t i = e.rank; i < M.rows(); ++i)
        out.push_back(e.T.row(i));
    return out;
}

IntMatrix hnf_lower(std::vector<ZVec> rows, size_t n, Integer const * D)
{
    auto reduce_mod = [&](ZVec & v) {
        if (!D)
            return;
        for (auto & x : v)
            x = mod_floor(x, *D);
    };
    for (auto & v : rows) {
        if (v.size() != n)
            throw std::invalid_argument("hnf_lower: wrong row length");
        reduce_mod(v);
    }
    IntMatrix H(n, n);
    std::vector<ZVec> pool = std::move(rows);
    for (size_t jj = n; jj-- > 0;) {
        /* D e_jj lies in the part of the lattice supported on columns <= jj */
        if (D) {
            ZVec v(n, 0);
            v[jj] = *D;
            pool.push_back(std::move(v));
        }
        /* gcd-combine column jj down to a single nonzero row */
        for (;;) {
            size_t best = pool.size();
            size_t nonzero = 0;
            for (size_t i = 0; i < pool.size(); ++i)
                if (pool[i][jj] != 0) {
                    ++nonzero;
                    if (best == pool.size() || abs(pool[i][jj]) < abs(pool[best][jj]))
                        best = i;
                }
            if (best == pool.size())
                throw std::domain_error("hnf_lower: lattice not of full rank");
            if (nonzero == 1) {
                std::swap(pool[best], pool.back());
                break;
            }
            for (size_t i = 0; i < pool.size(); ++i) {
                if (i == best || pool[i][jj] == 0)
                    continue;
                Integer q = floor_div(pool[i][jj], pool[best][jj]);
                for (size_t k = 0; k <= jj; ++k)
                    pool[i][k] -= q * pool[best][k];
                reduce_mod(pool[i]);
            }
        }
        ZVec piv = std::move(pool.back());
        pool.pop_back();
        if (piv[jj] < 0)
            for (auto & x : piv)
                x = -x;
        for (size_t k = 0; k < n; ++k)
            H(jj, k) = piv[k];
        pool.erase(std::remove_if(pool.begin(), pool.end(),
                                  [](ZVec const & v) {
                                      return std::all_of(v.begin(), v.end(), [](Integer const & x) { return x == 0; });
                                  }),
                   pool.end());
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j-- > 0;) {
            Integer q = floor_div(H(i, j), H(j, j));
            if (q != 0)
                for (size_t k = 0; k <= j; ++k)
                    H(i, k) -= q * H(j, k);
        }
    return H;
}

std::optional<ZVec> hnf_solve(IntMatrix const & H, ZVec const & v)
{
    size_t const n = H.rows();
    ZVec rem = v, c(n, 0);
    for (size_t j = n; j-- > 0;) {
        if (!mpz_divisible_p(rem[j].get_mpz_t(), H(j, j).get_mpz_t()))
            return std::nullopt;
        c[j] = rem[j] / H(j, j);
        for (size_t k = 0; k <= j; ++k)
            rem[k] -= c[j] * H(j, k);
    }
    return c;
}

/* ---- FiniteAbelianGroup ---- */

FiniteAbelianGroup::FiniteAbelianGroup(ZVec invariants, std::vector<std::string> labels, IntMatrix images,
                                       IntMatrix express)
    : inv_(std::move(invariants)), labels_(std::move(labels)), images_(std::move(images)), express_(std::move(express))
{
    for (size_t i = 0; i < inv_.size(); ++i) {
        if (inv_[i] <= 1)
            throw std::invalid_argument("invariant factors must exceed 1");
        if (i + 1 < inv_.size() && !mpz_divisible_p(inv_[i + 1].get_mpz_t(), inv_[i].get_mpz_t()))
            throw std::invalid_argument("invariant factors must form a divisibility chain");
    }
}

FiniteAbelianGroup FiniteAbelianGroup::from_invariants(ZVec const & invariants)
{
    ZVec inv;
    for (auto const & d : invariants)
        if (d != 1)
            inv.push_back(d);
    std::vector<std::string> labels;
    for (size_t i = 0; i < inv.size(); ++i)
        labels.push_back("g" + std::to_string(i));
    return FiniteAbelianGroup(inv, labels, IntMatrix::identity(inv.size()), IntMatrix::identity(inv.size()));
}

Integer FiniteAbelianGroup::order() const
{
    Integer o = 1;
    for (auto const & d : inv_)
        o *= d;
    return o;
}

std::string FiniteAbelianGroup::describe() const
{
    if (inv_.empty())
        return "trivial";
    std::ostringstream os;
    for (size_t i = 0; i < inv_.size(); ++i)
        os << (i ? " x " : "") << "Z/" << inv_[i].get_str();
    return os.str();
}

GroupElement FiniteAbelianGroup::reduce(ZVec v) const
{
    if (v.size() != inv_.size())
        throw std::invalid_argument("group element has wrong length");
    for (size_t i = 0; i < v.size(); ++i)
        v[i] = mod_floor(v[i], inv_[i]);
    return v;
}

GroupElement FiniteAbelianGroup::from_original(ZVec const & coeffs) const
{
    if (coeffs.size() != images_.rows())
        throw std::invalid_argument("wrong number of generator exponents");
    ZVec v(inv_.size(), 0);
    for (size_t j = 0; j < coeffs.size(); ++j)
        if (coeffs[j] != 0)
            for (size_t i = 0; i < inv_.size(); ++i)
                v[i] += coeffs[j] * images_(j, i);
    return reduce(std::move(v));
}

GroupElement FiniteAbelianGroup::add(GroupElement const & x, GroupElement const & y) const
{
    ZVec v(inv_.size());
    for (size_t i = 0; i < v.size(); ++i)
        v[i] = x[i] + y[i];
    return reduce(std::move(v));
}

GroupElement FiniteAbelianGroup::neg(GroupElement const & x) const
{
    ZVec v(inv_.size());
    for (size_t i = 0; i < v.size(); ++i)
        v[i] = -x[i];
    return reduce(std::move(v));
}

GroupElement FiniteAbelianGroup::mul(GroupElement const & x, Integer const & k) const
{
    ZVec v(inv_.size());
    for (size_t i = 0; i < v.size(); ++i)
        v[i] = x[i] * k;
    return reduce(std::move(v));
}

bool FiniteAbelianGroup::is_zero(GroupElement const & x) const
{
    auto r = reduce(x);
    return std::all_of(r.begin(), r.end(), [](Integer const & a) { return a == 0; });
}

Integer FiniteAbelianGroup::order_of(GroupElement const & x) const
{
    Integer o = 1;
    for (size_t i = 0; i < inv_.size(); ++i) {
        Integer g = gcd(Integer(mod_floor(x[i], inv_[i])), inv_[i]);
        Integer oi = inv_[i] / g;
        o = lcm(o, oi);
    }
    return o;
}

std::vector<GroupElement> FiniteAbelianGroup::elements() const
{
    std::vector<GroupElement> out;
    GroupElement cur = zero();
    if (order() > 1000000)
        throw std::domain_error("group too large to enumerate");
    for (;;) {
        out.push_back(cur);
        size_t i = inv_.size();
        while (i-- > 0) {
            cur[i] += 1;
            if (cur[i] < inv_[i])
                break;
            cur[i] = 0;
        }
        if (i == static_cast<size_t>(-1))
            break;
    }
    return out;
}

FiniteAbelianGroup group_from_relations(std::vector<std::string> const & labels, IntMatrix const & relations)
{
    size_t const n = labels.size();
    if (relations.cols() != n)
        throw std::invalid_argument("relation matrix width differs from generator count");
    if (n == 0)
        return FiniteAbelianGroup({}, {}, IntMatrix(0, 0), IntMatrix(0, 0));
    auto [U, S, V] = snf(relations);
    ZVec inv;
    std::vector<size_t> keep;
    for (size_t i = 0; i < n; ++i) {
        Integer d = i < S.rows() ? S(i, i) : Integer(0);
        if (d == 0)
            throw infinite_group_error("relations do not have full rank: quotient is infinite");
        if (d != 1) {
            inv.push_back(d);
            keep.push_back(i);
        }
    }
    /* x -> x V; the inverse of V expresses the new generators */
    IntMatrix Vinv = IntMatrix::identity(n);
    {
        /* V is unimodular: invert via echelon of V (T V = I) */
        auto e = echelon(V);
        Vinv = e.T;
        if (!(e.H == IntMatrix::identity(n)))
            throw std::logic_error("snf transform is not unimodular");
    }
    IntMatrix images(n, keep.size()), express(keep.size(), n);
    for (size_t j = 0; j < n; ++j)
        for (size_t k = 0; k < keep.size(); ++k)
            images(j, k) = mod_floor(V(j, keep[k]), inv[k]);
    for (size_t k = 0; k < keep.size(); ++k)
        for (size_t j = 0; j < n; ++j)
            express(k, j) = Vinv(keep[k], j);
    return FiniteAbelianGroup(inv, labels, images, express);
}

bool power_subgroup_contains(FiniteAbelianGroup const & A, GroupElement const & x, Integer const & k)
{
    auto const & inv = A.invariants();
    auto r = A.reduce(x);
    for (size_t i = 0; i < inv.size(); ++i) {
        Integer g = gcd(k, inv[i]);
        if (!mpz_divisible_p(r[i].get_mpz_t(), g.get_mpz_t()))
            return false;
    }
    return true;
}

std::optional<ZVec> solve_in_group(FiniteAbelianGroup const & A, std::vector<GroupElement> const & gens,
                                   GroupElement const & target)
{
    size_t const r = A.rank(), k = gens.size();
    /* rows: generators, then the invariant relations; find x with x M = target */
    IntMatrix M(k + r, r);
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < r; ++j)
            M(i, j) = gens[i][j];
    for (size_t j = 0; j < r; ++j)
        M(k + j, j) = A.invariants()[j];
    if (r == 0)
        return ZVec(k, 0);
    auto [U, S, V] = snf(M);
    /* x M = t  <=>  (x U^-1) S = t V */
    ZVec tv(r, 0);
    auto t = A.reduce(target);
    for (size_t j = 0; j < r; ++j)
        for (size_t i = 0; i < r; ++i)
            tv[j] += t[i] * V(i, j);
    ZVec y(k + r, 0);
    for (size_t j = 0; j < r; ++j) {
        Integer const & s = S(j, j);
        if (s == 0) {
            if (tv[j] != 0)
                return std::nullopt;
            continue;
        }
        if (!mpz_divisible_p(tv[j].get_mpz_t(), s.get_mpz_t()))
            return std::nullopt;
        y[j] = tv[j] / s;
    }
    ZVec x(k, 0);
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k + r; ++j)
            x[i] += y[j] * U(j, i);
    return x;
}

Integer subgroup_order(FiniteAbelianGroup const & A, std::vector<GroupElement> const & gens)
{
    size_t const r = A.rank(), k = gens.size();
    if (r == 0)
        return 1;
    IntMatrix M(k + r, r);
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < r; ++j)
            M(i, j) = gens[i][j];
    for (size_t j = 0; j < r; ++j)
        M(k + j, j) = A.invariants()[j];
    auto e = echelon(M);
    Integer idx = 1;
    for (size_t i = 0; i < r; ++i)
        idx *= e.H(i, i);
    return A.order() / idx;
}

std::vector<GroupElement> cyclic_complement(FiniteAbelianGroup const & A, GroupElement const & c)
{
    auto const & inv = A.invariants();
    auto x = A.reduce(c);
    if (A.is_zero(x))
        throw std::invalid_argument("cyclic_complement: c must be nonzero");
    if (inv.empty())
        throw std::invalid_argument("cyclic_complement: trivial group");
    auto fac = factor(inv.back());
    if (fac.size() != 1)
        throw std::invalid_argument("cyclic_complement: group is not an l-group");
    Integer const l = from_u64(fac[0].p);
    /* i0 maximizes n_i - m_i, i.e. the component where c has its full order */
    size_t i0 = 0;
    long best = -1;
    for (size_t i = 0; i < inv.size(); ++i) {
        if (x[i] == 0)
            continue;
        long ni = 0, mi = 0;
        for (Integer t = inv[i]; t > 1; t /= l)
            ++ni;
        for (Integer t = x[i]; mpz_divisible_p(t.get_mpz_t(), l.get_mpz_t()); t /= l)
            ++mi;
        if (ni - mi > best) {
            best = ni - mi;
            i0 = i;
        }
    }
    std::vector<GroupElement> B;
    for (size_t j = 0; j < inv.size(); ++j) {
        if (j == i0)
            continue;
        auto e = A.zero();
        e[j] = 1;
        B.push_back(e);
    }
    return B;
}

std::optional<u64> bsgs_dlog(u64 g, u64 x, u64 m, u64 n)
{
    g %= m;
    x %= m;
    if (n == 0)
        return std::nullopt;
    u64 const s = static_cast<u64>(std::ceil(std::sqrt(static_cast<long double>(n))));
    std::unordered_map<u64, u64> baby;
    baby.reserve(s * 2);
    u64 cur = 1 % m;
    for (u64 j = 0; j < s; ++j) {
        baby.emplace(cur, j);
        cur = mulmod(cur, g, m);
    }
    u64 const step = invmod(powmod(g, s, m), m);
    u64 y = x;
    for (u64 i = 0; i <= n / s; ++i) {
        auto it = baby.find(y);
        if (it != baby.end()) {
            u64 e = i * s + it->second;
            if (e < n)
                return e;
        }
        y = mulmod(y, step, m);
    }
    return std::nullopt;
}

} // namespace rcap
