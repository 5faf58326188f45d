#ifndef RCAP_ENUMERATE_HPP
#define RCAP_ENUMERATE_HPP

#include <vector>

#include "rcap/numfield.hpp"

namespace rcap {

/* Generator search for principal ideals of a totally real field by
 * Fincke-Pohst enumeration over a cover of the unit fundamental domain.
 * Floating point only proposes candidates; every hit is checked exactly. */

struct FPOptions {
    double delta = 0.5;           // cell radius in log space (sup norm)
    u64 max_nodes = 400000000;    // enumeration tree nodes, all cells together
    u64 max_cells = 1000000;
    int jobs = 0;                 // 0: all threads, 1: serial reference
};

enum class FPStatus { found, absent, budget };

struct FPResult {
    FPStatus status = FPStatus::absent;
    ZVec alpha;          // generator in integral coordinates
    u64 nodes = 0;
    u64 cells = 0;
    int digits = 0;      // precision of the successful (or last) pass
};

/// Log of |sigma_mask(x)| for nonzero x, accurate even for huge units.
long double log_abs_embedding(NumberField const & K, FieldElem const & x, unsigned mask);

/// Search for alpha in I with |N(alpha)| = N(I). unit_gens must generate the
/// units modulo torsion. Escalates from long double to 50 digits on a miss.
FPResult fp_find_generator(NumberField const & K, std::vector<FieldElem> const & unit_gens, Ideal const & I,
                           FPOptions const & opts = {});

} // namespace rcap

#endif
