#ifndef RCAP_EXACTMATH_HPP
#define RCAP_EXACTMATH_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace rcap {

using Integer = mpz_class;
using Rational = mpq_class;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

/* Thrown when an input lies outside the range where results are
 * unconditional (primality and factoring are deterministic below 2^64). */
struct out_of_range_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct PrimePower {
    u64 p;
    unsigned k;
    bool operator==(PrimePower const &) const = default;
};

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }
u64 powmod(u64 base, u64 e, u64 m);
u64 invmod(u64 a, u64 m);
u64 gcd_u64(u64 a, u64 b);

bool fits_u64(Integer const & n);
u64 to_u64(Integer const & n);
Integer from_u64(u64 v);

/// Deterministic Miller-Rabin; exact for every 64-bit input.
bool is_prime_u64(u64 n);
/// Throws out_of_range_error above 2^64.
bool is_prime(Integer const & n);

/// Prime factorization of |n| (primes ascending). n must be nonzero and |n| < 2^64.
std::vector<PrimePower> factor(Integer const & n);
std::vector<u64> prime_divisors(u64 n);

/// All primes p <= limit with p = a mod m, ascending. Rejects gcd(a, m) != 1.
std::vector<u64> primes_in_progression(u64 a, u64 m, u64 limit);
std::vector<u64> primes_up_to(u64 limit);
/// Calls fn for every prime in [lo, hi] in ascending order (segmented sieve).
/// Stops early when fn returns false.
void for_each_prime(u64 lo, u64 hi, std::function<bool(u64)> const & fn);

int kronecker(Integer const & a, Integer const & n);
/// Square root of a modulo an odd prime p (or p = 2); a must be a square.
u64 sqrt_mod_p(u64 a, u64 p);
/// Multiplicative order of a modulo m, using the factorization of the group order.
u64 multiplicative_order(u64 a, u64 m, u64 group_order);

Integer isqrt(Integer const & n);
bool is_square(Integer const & n, Integer * root = nullptr);
bool is_square(Rational const & q, Rational * root = nullptr);
bool is_squarefree(Integer const & n);
Integer squarefree_part(Integer const & n);
Integer mod_floor(Integer const & a, Integer const & m);
Integer floor_div(Integer const & a, Integer const & b);

/* Polynomials over F_p, coefficients low to high. */
class PolyModP
{
    std::vector<u64> c_;
    u64 p_;

    void trim();

    public:

    PolyModP(std::vector<u64> coeffs, u64 p);
    static PolyModP x_power(u64 k, u64 p);
    static PolyModP from_integers(std::vector<Integer> const & coeffs, u64 p);

    u64 modulus() const { return p_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }
    std::vector<u64> const & coeffs() const { return c_; }
    u64 lead() const { return c_.back(); }
    u64 operator()(u64 x) const;

    PolyModP operator+(PolyModP const & o) const;
    PolyModP operator-(PolyModP const & o) const;
    PolyModP operator*(PolyModP const & o) const;
    PolyModP monic() const;
    PolyModP derivative() const;
    std::pair<PolyModP, PolyModP> divmod(PolyModP const & d) const;
    PolyModP operator%(PolyModP const & d) const { return divmod(d).second; }
    PolyModP operator/(PolyModP const & d) const { return divmod(d).first; }
    bool operator==(PolyModP const & o) const { return p_ == o.p_ && c_ == o.c_; }

    /// base^e mod this
    PolyModP powmod(PolyModP const & base, Integer const & e) const;
};

PolyModP gcd(PolyModP a, PolyModP b);

/// Distinct roots of f in [0, p), ascending.
std::vector<u64> roots_mod_p(PolyModP const & f);
bool is_squarefree(PolyModP const & f);
/// Degrees of the irreducible factors of a squarefree f (with repetition), ascending.
std::vector<int> factor_degrees(PolyModP const & f);

std::string to_string(Integer const & n);

} // namespace rcap

#endif
