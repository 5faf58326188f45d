#ifndef RCAP_KUMMERFROB_HPP
#define RCAP_KUMMERFROB_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rcap/quadfield.hpp"

namespace rcap {

/* eta^((p-1)/l^n) in the cyclic group mu_{l^n} of F_p^*, written as a power
 * of zeta = g^((p-1)/l^n) for the least primitive root g mod p. */
struct ResidueCharacter {
    u64 p = 0;
    u64 ell = 0;
    unsigned n = 0;
    u64 level = 1;      // l^n
    u64 value = 1;      // residue in F_p
    u64 exponent = 0;   // value = zeta^exponent
    u64 order = 1;      // exact order, a power of l
};

u64 primitive_root(u64 p);
u64 ipow(u64 b, unsigned e);

/// p = 1 mod l^n, and for l = 2 with the unit radical also p = 1 mod 2^(n+1).
bool is_split_cyclotomic(u64 p, u64 ell, unsigned n, bool includes_sqrt_units);

/// The smaller square root r of D mod p (0 < r < p/2); p must split in K.
u64 root_choice(QuadraticField const & K, u64 p);
/// Image of eta under O_K -> F_p, sqrt D -> r.
u64 reduce_at_root(QuadraticField const & K, FieldElem const & eta, u64 p, u64 r);
/// The prime above p that is the kernel of sqrt D -> r.
PrimeIdeal prime_at_root(QuadraticField const & K, u64 p, u64 r);

ResidueCharacter character_of_residue(u64 x, u64 p, u64 ell, unsigned n);
ResidueCharacter residue_character(Integer const & a, u64 p, u64 ell, unsigned n);
ResidueCharacter residue_character(QuadraticField const & K, FieldElem const & eta, u64 p, u64 ell, unsigned n,
                                   u64 r);

struct HKBreakdown {
    u64 ell = 2;
    unsigned m_K = 0;                    // l^m_K = order of the l-part of mu_K
    bool first_layer_unramified = false; // K(first cyclotomic l-layer)/K unramified
    unsigned h_K = 0;
    std::string detail;
};
HKBreakdown h_K_constant(QuadraticField const & K, u64 ell);

struct SearchParams {
    u64 ell = 2;
    unsigned n = 1;
    unsigned h = 0;
    bool h_override = false;
    unsigned h_K = 0;
    u64 bound = 1000000;
};
/// Fill h_K and, unless overridden, h; validate n > h and l^n range.
void finalize_params(QuadraticField const & K, SearchParams & params);

enum class Check { none, precondition, i_prime, ii, iii, iv };
std::string to_string(Check c);

struct CandidateCertificate {
    Integer d;
    std::vector<std::pair<u64, int>> modulus;
    std::string modulus_text;
    std::string group;              // invariant factors of Cl^m_K
    GroupElement target;
    u64 ell = 2;
    unsigned n = 1, h = 0, h_K = 0;
    u64 p = 0, r = 0;
    std::string p_K;                // the chosen prime above p
    Integer eps_x, eps_y;           // eps = (x + y sqrt D)/2
    ResidueCharacter chi_eps, chi_minus_one;
    std::array<bool, 4> checks{};   // i', ii, iii, iv
    u64 bound = 0;
};

struct CheckResult {
    Check failed = Check::none;
    std::string reason;
    CandidateCertificate cert;
    bool ok() const { return failed == Check::none; }
};

/// Shared per-field context for repeated condition checks.
struct SearchContext {
    QuadraticField const * K = nullptr;
    RayClassGroup const * rcg = nullptr;
    GroupElement target;
    QuadUnit eps;
    SearchParams params;
    Integer excluded;   // 2 l D N(m)
    bool iv = false;
};
SearchContext make_context(QuadraticField const & K, RayClassGroup const & rcg, GroupElement const & target,
                           QuadUnit const & eps, SearchParams const & params);

/// Conditions (i'), (ii), (iii), (iv) in order; the first failure is reported.
CheckResult check_conditions(SearchContext const & ctx, u64 p);
CheckResult check_conditions(QuadraticField const & K, RayClassGroup const & rcg, GroupElement const & target,
                             QuadUnit const & eps, u64 p, SearchParams const & params);

} // namespace rcap

#endif
