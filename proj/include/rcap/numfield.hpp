#ifndef RCAP_NUMFIELD_HPP
#define RCAP_NUMFIELD_HPP

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rcap/abgroup.hpp"

namespace rcap {

/* Multiquadratic fields Q(sqrt r_1, ..., sqrt r_k), degree n = 2^k (k = 1 or 2).
 * Power basis: b_S = prod_{i in S} sqrt r_i for bitmasks S; FieldElem holds
 * rational coordinates in that basis. ZVec holds integer coordinates in the
 * integral basis e_0 = 1, e_1, ..., e_{n-1}. */

using FieldElem = std::vector<Rational>;

class NumberField
{
    std::vector<Integer> rad_;
    size_t n_ = 0;
    std::vector<FieldElem> basis_;       // e_i in the power basis
    std::vector<FieldElem> basis_inv_;   // b_S in the integral basis (rational)
    std::vector<std::vector<ZVec>> mult_;
    std::vector<IntMatrix> aut_;         // aut_[mask]: row i = image of e_i
    Integer disc_;

    void build_integral_basis();

    public:

    explicit NumberField(std::vector<Integer> radicands);

    std::vector<Integer> const & radicands() const { return rad_; }
    size_t degree() const { return n_; }
    Integer const & discriminant() const { return disc_; }
    std::vector<FieldElem> const & integral_basis() const { return basis_; }
    bool totally_real() const;

    FieldElem zero() const { return FieldElem(n_, 0); }
    FieldElem one() const;
    FieldElem from_int(Integer const & a) const;
    FieldElem sqrt_radicand(size_t i) const;

    FieldElem to_power(ZVec const & v) const;
    std::optional<ZVec> to_integral(FieldElem const & x) const;
    /// Rational coordinates in the integral basis.
    FieldElem integral_coords(FieldElem const & x) const;
    ZVec integral(FieldElem const & x) const;   // throws when not integral

    FieldElem add(FieldElem const & x, FieldElem const & y) const;
    FieldElem sub(FieldElem const & x, FieldElem const & y) const;
    FieldElem mul(FieldElem const & x, FieldElem const & y) const;
    FieldElem scale(FieldElem const & x, Rational const & c) const;
    FieldElem neg(FieldElem const & x) const;
    FieldElem pow(FieldElem const & x, Integer const & e) const;
    FieldElem inverse(FieldElem const & x) const;
    FieldElem div(FieldElem const & x, FieldElem const & y) const { return mul(x, inverse(y)); }
    /// sqrt r_i -> (-1)^{bit i of mask} sqrt r_i
    FieldElem conj(FieldElem const & x, unsigned mask) const;
    Rational norm(FieldElem const & x) const;
    Rational trace(FieldElem const & x) const;
    bool is_zero(FieldElem const & x) const;
    bool is_rational(FieldElem const & x) const;
    bool is_integral(FieldElem const & x) const;

    ZVec mul(ZVec const & x, ZVec const & y) const;
    ZVec conj(ZVec const & x, unsigned mask) const;
    Integer norm(ZVec const & x) const;
    IntMatrix const & automorphism(unsigned mask) const { return aut_[mask]; }
    /// Rows: x * e_i in integral coordinates.
    IntMatrix mult_matrix(ZVec const & x) const;
    /// Gram matrix of the trace form on the integral basis.
    IntMatrix trace_gram() const;

    /// Complex embeddings indexed by masks (sqrt r_i -> (-1)^{bit i} sqrt r_i).
    std::vector<std::complex<long double>> embed(FieldElem const & x) const;
    std::vector<long double> embed_real(FieldElem const & x) const;

    /// Exact sign of the real embedding `mask` of x (totally real fields).
    int sign_at(FieldElem const & x, unsigned mask) const;

    /// Square root in the field, if x is a square.
    std::optional<FieldElem> sqrt(FieldElem const & x) const;

    std::string format(FieldElem const & x) const;
};

/* Integral ideals as lower-triangular HNF lattices in the integral basis. */
class Ideal
{
    IntMatrix H_;

    public:

    Ideal() = default;
    explicit Ideal(IntMatrix H) : H_(std::move(H)) {}
    IntMatrix const & hnf() const { return H_; }
    Integer norm() const;
    bool contains(ZVec const & v) const;
    bool is_unit() const { return norm() == 1; }
    bool operator==(Ideal const & o) const { return H_ == o.H_; }
    bool operator<(Ideal const & o) const;
    /// The least positive integer in the ideal.
    Integer min_integer() const { return H_(0, 0); }
    std::vector<ZVec> basis() const { return H_.to_rows(); }
    std::string key() const;
};

Ideal ideal_from_generators(NumberField const & K, std::vector<ZVec> const & gens);
Ideal principal_ideal(NumberField const & K, ZVec const & g);
Ideal rational_ideal(NumberField const & K, Integer const & a);
Ideal unit_ideal(NumberField const & K);
Ideal ideal_mul(NumberField const & K, Ideal const & I, Ideal const & J);
Ideal ideal_add(NumberField const & K, Ideal const & I, Ideal const & J);
Ideal ideal_pow(NumberField const & K, Ideal const & I, unsigned e);
Ideal ideal_conj(NumberField const & K, Ideal const & I, unsigned mask);
/// Exact quotient I / J when J divides I (checked), else nullopt.
std::optional<Ideal> ideal_div(NumberField const & K, Ideal const & I, Ideal const & J);
/// Does the element x (nonzero) generate I?
bool generates(NumberField const & K, FieldElem const & x, Ideal const & I);

/* A prime ideal with its residue field F_q, q = p^f. Residues are encoded as
 * indices in [0, q) of canonical representatives modulo the HNF. */
class PrimeIdeal
{
    NumberField const * K_ = nullptr;
    u64 p_ = 0;
    int e_ = 0, f_ = 0;
    Ideal P_;
    u64 q_ = 0;

    public:

    PrimeIdeal() = default;
    PrimeIdeal(NumberField const & K, u64 p, int e, int f, Ideal P);

    u64 p() const { return p_; }
    int e() const { return e_; }
    int f() const { return f_; }
    u64 q() const { return q_; }
    Ideal const & ideal() const { return P_; }
    bool operator==(PrimeIdeal const & o) const { return p_ == o.p_ && P_ == o.P_; }

    ZVec canonical(ZVec v) const;
    u64 index(ZVec const & v) const;
    ZVec element(u64 idx) const;
    u64 mul(u64 a, u64 b) const;
    u64 pow(u64 a, Integer e) const;
    u64 one() const;
    u64 generator() const;
    /// Residue index of an integral element.
    u64 residue(ZVec const & v) const;
    /// Residue of x in K with v_P(x) = 0. Throws when x is not a P-unit.
    u64 residue(FieldElem const & x) const;
    /// Discrete log base generator() of a nonzero residue.
    u64 dlog(u64 idx) const;
    bool contains(ZVec const & v) const { return P_.contains(v); }
    std::string describe() const;
};

/// Prime ideals above the rational prime p, sorted by HNF; e, f, g verified.
std::vector<PrimeIdeal> primes_above(NumberField const & K, u64 p);

/// Valuation of an integral ideal at a prime.
int ideal_valuation(NumberField const & K, Ideal const & I, PrimeIdeal const & P);

/* (O/m)^* for a squarefree modulus m = prod P_j. */
class ResidueGroup
{
    NumberField const * K_ = nullptr;
    std::vector<PrimeIdeal> primes_;
    FiniteAbelianGroup G_;

    public:

    ResidueGroup() = default;
    ResidueGroup(NumberField const & K, std::vector<PrimeIdeal> primes);
    FiniteAbelianGroup const & group() const { return G_; }
    std::vector<PrimeIdeal> const & primes() const { return primes_; }
    Integer order() const { return G_.order(); }
    /// Raw exponent vector (one discrete log per prime).
    ZVec raw_dlog(FieldElem const & x) const;
    GroupElement dlog(FieldElem const & x) const { return G_.from_original(raw_dlog(x)); }
    /// Product of the norms of the primes.
    Integer norm() const;
    /// Is the ideal coprime to every prime of the modulus?
    bool coprime(Ideal const & I) const;
};

} // namespace rcap

#endif
