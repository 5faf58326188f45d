#ifndef RCAP_AMBIGCHECK_HPP
#define RCAP_AMBIGCHECK_HPP

#include <string>
#include <vector>

#include "rcap/biquad.hpp"

namespace rcap {

/// Cl^m_Q = (Z/m)^* / {+-1}, m squarefree.
FiniteAbelianGroup rayclass_Q(Integer const & m);

/* One instance of the ambiguous ray class count.
 *   quadratic:   L = Q(sqrt d) over K = Q, m a squarefree integer
 *   biquadratic: L = Q(sqrt d, sqrt p) over K = Q(sqrt d), m all primes of K above m
 *   degenerate:  L = K = Q(sqrt d) */
struct AmbigCase {
    enum class Kind { quadratic, biquadratic, degenerate };
    Kind kind = Kind::quadratic;
    Integer d;
    Integer p;
    Integer m = 1;
};

/// L given by a fundamental discriminant.
AmbigCase quadratic_case(Integer const & disc, Integer const & m);

struct AmbigReport {
    std::string L, K, m;
    Integer cl_K_m;
    std::vector<int> inf_degrees;   // d_p for the infinite places of K
    std::vector<int> ram_e;         // e_p for finite ramified primes prime to m
    int degree = 2;
    Integer unit_index = 1;         // (E_K^m : N E_L^m)
    Integer formula;
    Integer direct;
    bool equal = false;
    std::string error;
};

Integer norm_index_units(AmbigCase const & c);
/// Fills every field except direct / equal.
AmbigReport ambiguous_count_formula(AmbigCase const & c);
/// Order of the subgroup of Cl^m_L generated by ambiguous ideals.
Integer ambiguous_count_direct(AmbigCase const & c);
AmbigReport ambig_report(AmbigCase const & c);

/// Named corpora: "default", "quadratic", "modulus", "imaginary", "biquadratic".
std::vector<AmbigCase> ambig_corpus(std::string const & name);
/// Reports in corpus order; jobs = 0 uses all threads.
std::vector<AmbigReport> ambig_sweep(std::vector<AmbigCase> const & cases, int jobs = 0);

} // namespace rcap

#endif
