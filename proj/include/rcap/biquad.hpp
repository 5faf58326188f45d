#ifndef RCAP_BIQUAD_HPP
#define RCAP_BIQUAD_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rcap/enumerate.hpp"
#include "rcap/kummerfrob.hpp"

namespace rcap {

/* L = Q(sqrt d, sqrt p). Subfield 0 is K = Q(sqrt d), subfield 1 is Q(sqrt p),
 * subfield 2 is Q(sqrt dp'), dp' the squarefree part of dp. Automorphism
 * masks flip sqrt d (bit 0) and sqrt p (bit 1); subfield i is fixed by
 * fixing_mask(i). */
class BiquadField
{
    public:

    Integer d, p;
    std::array<QuadraticField, 3> quads;
    std::shared_ptr<NumberField> nf;
    Integer g;   // dp = g^2 * radicand of subfield 2

    NumberField const & field() const { return *nf; }
    bool totally_real() const { return d > 0 && p > 0; }
    static unsigned fixing_mask(size_t i) { return i == 0 ? 2u : i == 1 ? 1u : 3u; }

    FieldElem embed(size_t i, FieldElem const & x) const;
    /// Inverse of embed for elements fixed by fixing_mask(i).
    FieldElem restrict_to(size_t i, FieldElem const & x) const;
    Ideal extend(size_t i, Ideal const & I) const;
    /// J intersected with the ring of integers of subfield i.
    Ideal contract(size_t i, Ideal const & J) const;
    /// Relative norm to subfield i.
    FieldElem relative_norm(size_t i, FieldElem const & x) const;
};

/// Second radicand: squarefree, different field from Q(sqrt d).
BiquadField make_biquadratic(Integer const & d, Integer const & p);

struct PrimeFactor {
    PrimeIdeal P;
    int exponent = 0;
};
/// q O_L as a product of primes of L (e and f verified).
std::vector<PrimeFactor> extend_and_factor(BiquadField const & L, size_t i, PrimeIdeal const & q);

struct BqUnitGroup {
    std::array<QuadUnit, 3> sub_units;
    std::vector<FieldElem> gens;          // basis modulo {+-1}, LLL-reduced logs
    std::vector<ZVec> half_exponents;     // gens[k]^2 = +- prod sub_units^(v_k)
    std::vector<std::string> refinements; // square roots found
    int index = 1;                        // [E_L : <-1, u_1, u_2, u_3>]
    long double regulator = 0;
};
BqUnitGroup unit_group(BiquadField const & L);

/// A unit x of a real quadratic field as (s, a) with x = (-1)^s eps^a.
std::pair<int, Integer> quad_unit_coords(QuadraticField const & K, QuadUnit const & eps, FieldElem const & x);

enum class PrincipalStatus { principal, not_principal, budget };
std::string to_string(PrincipalStatus s);

struct PrincipalResult {
    PrincipalStatus status = PrincipalStatus::not_principal;
    FieldElem generator;
    std::string method;
    u64 nodes = 0;
};

/// Lattice enumeration test (any ideal of a totally real L).
PrincipalResult is_principal(BiquadField const & L, BqUnitGroup const & U, Ideal const & I,
                             FPOptions const & opts = {});
/// Exact test for ideals invariant under Gal(L/K), K = subfield 0, through
/// Hilbert 90 and the class group of K.
PrincipalResult is_principal_ambiguous(BiquadField const & L, BqUnitGroup const & U, Ideal const & I);

/// Multiply a generator by a unit so that it becomes 1 mod^x m (primes of L).
std::optional<FieldElem> ray_adjust(BiquadField const & L, BqUnitGroup const & U, ResidueGroup const & RG,
                                    FieldElem const & alpha);

/// All primes of L above the primes of a modulus of K.
std::vector<PrimeIdeal> extend_modulus(BiquadField const & L, Modulus const & m);

enum class VerifyStatus { success, fail, budget, unverified };
std::string to_string(VerifyStatus s);

struct IdealVerdict {
    std::string ideal;
    bool principal = false;
    bool ray_principal = false;
    std::optional<FieldElem> generator;   // ray-adjusted when ray_principal
    std::string method;
    bool crosschecked = false;            // lattice enumeration agreed
};

struct VerificationReport {
    VerifyStatus status = VerifyStatus::fail;
    std::string reason;
    bool conditions_ok = false;
    std::string failed_condition;
    std::string L;
    std::string m_L;
    IdealVerdict q_L;        // p_K O_L = q_L^2
    IdealVerdict extended;   // p_K O_L itself
};

/// Re-check the certificate, build L, and decide ray-principality of q_L
/// and of p_K O_L.
VerificationReport capitulates(CandidateCertificate const & cert, FPOptions const & opts = {});

} // namespace rcap

#endif
