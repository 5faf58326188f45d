#ifndef RCAP_QUADFIELD_HPP
#define RCAP_QUADFIELD_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcap/numfield.hpp"

namespace rcap {

/* K = Q(sqrt d) with O_K = Z + Z w, w = (t + sqrt D) / 2, w^2 = t w - c0. */
struct QuadraticField {
    Integer d, D;
    int t = 0;
    Integer c0;
    std::shared_ptr<NumberField> nf;

    bool real() const { return d > 0; }
    NumberField const & field() const { return *nf; }
    /// Elements as (x + y sqrt D) / 2 -> power basis.
    FieldElem from_xy(Integer const & x, Integer const & y) const;
    std::pair<Integer, Integer> to_xy(FieldElem const & a) const;
    std::string format(FieldElem const & a) const;
};

/// Default bound on |D| for class group computations.
inline Integer const kDefaultDiscBound = 10000000;

struct bound_exceeded_error : std::domain_error {
    using std::domain_error::domain_error;
};

QuadraticField make_quadratic(Integer const & d);

enum class SplitKind { split, inert, ramified };
struct SplitData {
    SplitKind kind;
    std::vector<PrimeIdeal> primes;
};
SplitData factor_prime(QuadraticField const & K, u64 p);
std::string to_string(SplitKind k);

/// Primitive ideal I(a, b) = aZ + ((b + sqrt D)/2) Z.
struct FormKey {
    Integer a, b;
    bool operator==(FormKey const &) const = default;
    auto operator<=>(FormKey const & o) const
    {
        if (int c = cmp(a, o.a))
            return c <=> 0;
        return cmp(b, o.b) <=> 0;
    }
    std::string str() const { return "(" + a.get_str() + "," + b.get_str() + ")"; }
};

Ideal ideal_of_form(QuadraticField const & K, FormKey const & f);
/// Standard form text "c*(a, b + w)".
std::string describe_ideal(QuadraticField const & K, Ideal const & I);

/// Representative of the class of I: I = alpha * I(key), key reduced (imaginary)
/// or the least reduced ideal of the cycle (real).
struct ClassRep {
    FormKey key;
    FieldElem alpha;
};
ClassRep class_rep(QuadraticField const & K, Ideal const & I);
/// Class key only (cheaper: no generator tracking).
FormKey class_key(QuadraticField const & K, Ideal const & I);
/// A generator of I when I is principal.
std::optional<FieldElem> principal_generator(QuadraticField const & K, Ideal const & I);

/// Class number by enumeration of reduced forms / reduced ideal cycles.
Integer class_number(QuadraticField const & K, Integer const & bound = kDefaultDiscBound);
/// All reduced forms (imaginary) or all reduced ideals (real).
std::vector<FormKey> reduced_forms(QuadraticField const & K);

struct QuadUnit {
    FieldElem value;
    Integer x, y;   // value = (x + y sqrt D) / 2
    int norm = 1;
};
QuadUnit make_unit(QuadraticField const & K, FieldElem const & v);
QuadUnit fundamental_unit(QuadraticField const & K);
/// Generator of the roots of unity and its order.
std::pair<FieldElem, int> torsion_generator(QuadraticField const & K);

/// Squarefree tame modulus: distinct prime ideals.
struct Modulus {
    std::vector<PrimeIdeal> primes;
    Integer norm() const;
    std::vector<u64> rational_primes() const;
    std::string describe() const;
};
/// All primes above the prime divisors of a squarefree integer m.
Modulus modulus_from_integer(QuadraticField const & K, Integer const & m);
/// Modulus as (rational prime, index among the primes above it) pairs.
std::vector<std::pair<u64, int>> modulus_spec(QuadraticField const & K, Modulus const & m);
Modulus modulus_from_spec(QuadraticField const & K, std::vector<std::pair<u64, int>> const & spec);
/// Validate squarefreeness and, when l > 0, coprimality to l.
void validate_modulus(Modulus const & m, u64 l = 0);

class ClassGroup
{
    public:

    struct Node {
        FormKey key;
        ZVec path;
        Ideal rep;   // product of generator primes along path
    };

    QuadraticField const * K = nullptr;
    Integer h;
    std::vector<PrimeIdeal> gens;
    std::vector<Node> nodes;
    std::map<FormKey, size_t> index;
    FiniteAbelianGroup group;

    size_t node_of(Ideal const & I) const;
    GroupElement class_of(Ideal const & I) const;
};

/// Class group with generator primes avoiding the given rational primes.
ClassGroup class_group(QuadraticField const & K, std::vector<u64> const & avoid = {},
                       Integer const & bound = kDefaultDiscBound);

class RayClassGroup
{
    public:

    QuadraticField const * K = nullptr;
    Modulus modulus;
    ClassGroup cl;
    ResidueGroup residues;
    FieldElem torsion;
    int torsion_order = 2;
    std::optional<QuadUnit> eps;   // fundamental unit (real fields)
    FiniteAbelianGroup group;      // columns: class generators then residue primes
    Integer unit_image_order;

    Integer order() const { return group.order(); }
    GroupElement ray_class_of_ideal(Ideal const & I) const;
    /// Generator congruent to 1 mod^x m when I is ray-principal.
    std::optional<FieldElem> is_ray_principal(Ideal const & I) const;
    /// Ray class of the principal ideal (x) for x coprime to m.
    GroupElement class_of_element(FieldElem const & x) const;
    std::vector<std::string> generator_labels() const;
};

RayClassGroup ray_class_group(QuadraticField const & K, Modulus const & m,
                              Integer const & bound = kDefaultDiscBound);

/// Smallest power of the fundamental unit of norm +1 that is 1 mod^x m.
QuadUnit aug_unit_mod_m(QuadraticField const & K, Modulus const & m);

/// Ideals from class-group exponent vectors and back, for target selection.
Ideal ideal_of_class(RayClassGroup const & R, GroupElement const & v);

} // namespace rcap

#endif
