#ifndef RCAP_CAPSEARCH_HPP
#define RCAP_CAPSEARCH_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rcap/kummerfrob.hpp"

namespace rcap {

/// Minimal polynomial of the Gaussian period of degree m in Q(zeta_p),
/// integer coefficients low to high (monic).
std::vector<Integer> gaussian_period_min_poly(u64 p, u64 m);

struct CyclicFieldDesc {
    u64 p = 0;
    u64 degree = 0;
    std::vector<Integer> poly;
    Integer discriminant;   // p^(degree - 1)
};
CyclicFieldDesc cyclic_field(u64 p, u64 degree);

/// Target selectors: "identity", "auto-k" (first element of order k in
/// enumeration order), or an exponent vector "a,b,...".
GroupElement select_target(FiniteAbelianGroup const & G, std::string const & selector);

enum class SearchStatus { found, not_found, blocked_iv };
std::string to_string(SearchStatus s);

struct SearchStats {
    u64 scanned = 0;   // primes up to the winner (or bound)
    std::map<std::string, u64> rejected;   // by condition
};

struct SearchResult {
    SearchStatus status = SearchStatus::not_found;
    std::optional<CandidateCertificate> cert;
    std::optional<CyclicFieldDesc> field;
    SearchStats stats;
    u64 bound = 0;
};

struct PowerHint {
    u64 ell = 2;
    unsigned h = 0;
    u64 conductor = 1;
    u64 degree = 1;
    std::string field;
    std::string requirement;
};
PowerHint power_adjustment_hint(QuadraticField const & K, u64 ell, unsigned h);

/// Smallest certificate p <= bound. jobs <= 1 runs the serial reference.
SearchResult find_principalizing_prime(SearchContext const & ctx, int jobs = 0);
SearchResult find_principalizing_prime_serial(SearchContext const & ctx);

} // namespace rcap

#endif
