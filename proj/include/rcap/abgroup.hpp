#ifndef RCAP_ABGROUP_HPP
#define RCAP_ABGROUP_HPP

#include <optional>
#include <string>
#include <vector>

#include "rcap/exactmath.hpp"

namespace rcap {

using ZVec = std::vector<Integer>;

class IntMatrix
{
    size_t r_ = 0, c_ = 0;
    std::vector<Integer> a_;

    public:

    IntMatrix() = default;
    IntMatrix(size_t rows, size_t cols) : r_(rows), c_(cols), a_(rows * cols) {}
    static IntMatrix identity(size_t n);
    static IntMatrix from_rows(std::vector<ZVec> const & rows, size_t cols);

    size_t rows() const { return r_; }
    size_t cols() const { return c_; }
    Integer & operator()(size_t i, size_t j) { return a_[i * c_ + j]; }
    Integer const & operator()(size_t i, size_t j) const { return a_[i * c_ + j]; }
    ZVec row(size_t i) const;
    std::vector<ZVec> to_rows() const;

    IntMatrix operator*(IntMatrix const & o) const;
    bool operator==(IntMatrix const & o) const = default;
    IntMatrix transpose() const;
    bool is_zero() const;
    /// Determinant of a square matrix (fraction-free elimination).
    Integer det() const;

    void swap_rows(size_t i, size_t j);
    void swap_cols(size_t i, size_t j);
    /// row dst += k * row src
    void add_row(size_t dst, size_t src, Integer const & k);
    void add_col(size_t dst, size_t src, Integer const & k);
    void negate_row(size_t i);
    void negate_col(size_t j);
};

/// U * M * V = S, U and V unimodular, S diagonal with S_ii | S_(i+1)(i+1), S_ii >= 0.
struct SnfResult {
    IntMatrix U, S, V;
};
SnfResult snf(IntMatrix const & M);

/// Row echelon form with transform: T * M = H, T unimodular, pivots strictly
/// moving right, pivot entries positive, entries above pivots reduced, zero rows last.
struct EchelonResult {
    IntMatrix H, T;
    size_t rank;
};
EchelonResult echelon(IntMatrix const & M);

/// Left kernel basis: rows x with x * M = 0.
std::vector<ZVec> left_kernel(IntMatrix const & M);

/// Square lower-triangular HNF (row i has its pivot in column i, entries left of
/// each pivot reduced into [0, pivot)) of the lattice spanned by `rows`. When D is
/// given, D * Z^n is assumed to lie in the lattice and is added to the generators.
/// Throws std::domain_error when the lattice is not of full rank n.
IntMatrix hnf_lower(std::vector<ZVec> rows, size_t n, Integer const * D = nullptr);

/// Is v in the row lattice of a square lower-triangular HNF? Returns coefficients.
std::optional<ZVec> hnf_solve(IntMatrix const & H, ZVec const & v);

struct infinite_group_error : std::domain_error {
    using std::domain_error::domain_error;
};

using GroupElement = ZVec;

class FiniteAbelianGroup
{
    ZVec inv_;
    std::vector<std::string> labels_;
    IntMatrix images_;   // row j: original generator j in invariant coordinates
    IntMatrix express_;  // row i: invariant generator i over the original generators

    public:

    FiniteAbelianGroup() = default;
    FiniteAbelianGroup(ZVec invariants, std::vector<std::string> labels, IntMatrix images, IntMatrix express);
    /// Group given directly by invariants; generators are the invariant generators.
    static FiniteAbelianGroup from_invariants(ZVec const & invariants);

    ZVec const & invariants() const { return inv_; }
    size_t rank() const { return inv_.size(); }
    Integer order() const;
    std::vector<std::string> const & labels() const { return labels_; }
    IntMatrix const & images() const { return images_; }
    IntMatrix const & express() const { return express_; }
    std::string describe() const;

    GroupElement zero() const { return GroupElement(inv_.size(), 0); }
    GroupElement reduce(ZVec v) const;
    /// Element given by exponents over the original generators.
    GroupElement from_original(ZVec const & coeffs) const;
    GroupElement add(GroupElement const & x, GroupElement const & y) const;
    GroupElement neg(GroupElement const & x) const;
    GroupElement mul(GroupElement const & x, Integer const & k) const;
    bool is_zero(GroupElement const & x) const;
    Integer order_of(GroupElement const & x) const;
    /// All elements, in lexicographic order of exponent vectors.
    std::vector<GroupElement> elements() const;
};

FiniteAbelianGroup group_from_relations(std::vector<std::string> const & labels, IntMatrix const & relations);

/// Is x in k * A ?
bool power_subgroup_contains(FiniteAbelianGroup const & A, GroupElement const & x, Integer const & k);

/// Integer coefficients c with sum c_i * gens_i = target in A, if any.
std::optional<ZVec> solve_in_group(FiniteAbelianGroup const & A, std::vector<GroupElement> const & gens,
                                   GroupElement const & target);

/// Order of the subgroup generated by gens.
Integer subgroup_order(FiniteAbelianGroup const & A, std::vector<GroupElement> const & gens);

/// For an l-group A (invariants powers of l) and c != 0, generators of a subgroup B
/// with B meeting <c> trivially and A / B cyclic.
std::vector<GroupElement> cyclic_complement(FiniteAbelianGroup const & A, GroupElement const & c);

/// Discrete log of x to base g modulo m, where g has order n. Baby-step giant-step.
std::optional<u64> bsgs_dlog(u64 g, u64 x, u64 m, u64 n);

} // namespace rcap

#endif
