#include "rcap/quadfield.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace rcap {

namespace {

/* x < sqrt D and sqrt D < y, exactly */
bool lt_sqrt(Integer const & x, Integer const & D) { return x < 0 || x * x < D; }
bool sqrt_lt(Integer const & D, Integer const & y) { return y > 0 && D < y * y; }

FieldElem beta_of(QuadraticField const & K, Integer const & b)
{
    /* (b + sqrt D) / 2 */
    return K.from_xy(b, 1);
}

struct Form {
    Integer a, b;
};

Integer form_c(QuadraticField const & K, Form const & f)
{
    Integer num = f.b * f.b - K.D;
    return num / (4 * f.a);
}

Integer normalize_b(Integer const & b, Integer const & a)
{
    /* representative of b mod 2a in (-a, a] */
    Integer two_a = 2 * a;
    Integer r = mod_floor(b, two_a);
    if (r > a)
        r -= two_a;
    return r;
}

bool is_reduced_real(QuadraticField const & K, Form const & f)
{
    Integer const & D = K.D;
    if (!(f.b > 0 && lt_sqrt(f.b, D)))
        return false;
    return lt_sqrt(2 * f.a - f.b, D) && sqrt_lt(D, 2 * f.a + f.b);
}

bool is_reduced_imag(QuadraticField const & K, Form const & f)
{
    Integer c = form_c(K, f);
    if (!(-f.a < f.b && f.b <= f.a && f.a <= c))
        return false;
    if (f.a == c && f.b < 0)
        return false;
    return true;
}

/* One reduction step: I(a,b) = (beta / |c|) I(|c|, b'). */
Form rho(QuadraticField const & K, Form const & f, Integer const & s, FieldElem * factor)
{
    Integer c = form_c(K, f);
    Integer ac = abs(c);
    if (factor) {
        *factor = K.field().scale(beta_of(K, f.b), Rational(1) / Rational(ac));
    }
    Form g{ac, 0};
    if (K.real() && lt_sqrt(ac, K.D)) {
        Integer two = 2 * ac;
        g.b = s - mod_floor(s + f.b, two);
    } else {
        g.b = normalize_b(-f.b, ac);
    }
    return g;
}

/* primitive part of an integral ideal */
std::pair<Integer, Form> primitive_form(QuadraticField const & K, Ideal const & I)
{
    auto const & H = I.hnf();
    Integer C = H(1, 1);
    if (!mpz_divisible_p(H(0, 0).get_mpz_t(), C.get_mpz_t()) || !mpz_divisible_p(H(1, 0).get_mpz_t(), C.get_mpz_t()))
        throw std::logic_error("ideal HNF without content structure");
    Integer a = H(0, 0) / C;
    Integer bp = H(1, 0) / C;
    return {C, Form{a, 2 * bp + K.t}};
}

struct Reduced {
    Form f;
    FieldElem alpha;
};

Reduced reduce_form(QuadraticField const & K, Form f, FieldElem alpha, bool track)
{
    NumberField const & nf = K.field();
    Integer const s = K.real() ? isqrt(K.D) : Integer(0);
    if (!K.real()) {
        f.b = normalize_b(f.b, f.a);
        while (!is_reduced_imag(K, f)) {
            FieldElem fac;
            f = rho(K, f, s, track ? &fac : nullptr);
            if (track)
                alpha = nf.mul(alpha, fac);
        }
        return {f, alpha};
    }
    size_t guard = 0;
    while (!is_reduced_real(K, f)) {
        FieldElem fac;
        f = rho(K, f, s, track ? &fac : nullptr);
        if (track)
            alpha = nf.mul(alpha, fac);
        if (++guard > 100000)
            throw std::logic_error("real reduction did not terminate");
    }
    return {f, alpha};
}

/* Walk the cycle of a reduced real ideal; return the least key and the
 * cumulative factor at that position. */
Reduced cycle_min(QuadraticField const & K, Form const & start, FieldElem alpha, bool track)
{
    Integer const s = isqrt(K.D);
    Form cur = start, best = start;
    size_t best_pos = 0, pos = 0;
    for (;;) {
        cur = rho(K, cur, s, nullptr);
        ++pos;
        if (cur.a == start.a && cur.b == start.b)
            break;
        if (cur.a < best.a || (cur.a == best.a && cur.b < best.b)) {
            best = cur;
            best_pos = pos;
        }
    }
    if (track) {
        NumberField const & nf = K.field();
        cur = start;
        for (size_t i = 0; i < best_pos; ++i) {
            FieldElem fac;
            cur = rho(K, cur, s, &fac);
            alpha = nf.mul(alpha, fac);
        }
    }
    return {best, alpha};
}

} // namespace

FieldElem QuadraticField::from_xy(Integer const & x, Integer const & y) const
{
    /* sqrt D = sqrt d (t = 1) or 2 sqrt d (t = 0) */
    FieldElem v(2);
    v[0] = Rational(x, 2);
    v[0].canonicalize();
    if (t == 1) {
        v[1] = Rational(y, 2);
        v[1].canonicalize();
    } else {
        v[1] = y;
    }
    return v;
}

std::pair<Integer, Integer> QuadraticField::to_xy(FieldElem const & a) const
{
    Rational x = a[0] * 2;
    Rational y = t == 1 ? a[1] * 2 : a[1];
    if (x.get_den() != 1 || y.get_den() != 1)
        throw std::domain_error("element has no (x + y sqrt D)/2 form with integers");
    return {x.get_num(), y.get_num()};
}

std::string QuadraticField::format(FieldElem const & a) const { return nf->format(a); }

QuadraticField make_quadratic(Integer const & d)
{
    if (d == 0 || d == 1 || !is_squarefree(d))
        throw std::invalid_argument("d must be a squarefree integer other than 0 and 1");
    QuadraticField K;
    K.d = d;
    K.t = mod_floor(d, 4) == 1 ? 1 : 0;
    K.D = K.t ? d : 4 * d;
    K.c0 = (K.t - K.D) / 4;
    K.nf = std::make_shared<NumberField>(std::vector<Integer>{d});
    return K;
}

std::string to_string(SplitKind k)
{
    switch (k) {
    case SplitKind::split:
        return "split";
    case SplitKind::inert:
        return "inert";
    case SplitKind::ramified:
        return "ramified";
    }
    return "?";
}

SplitData factor_prime(QuadraticField const & K, u64 p)
{
    auto ps = primes_above(K.field(), p);
    SplitData out;
    if (ps.size() == 2)
        out.kind = SplitKind::split;
    else if (ps[0].e() == 2)
        out.kind = SplitKind::ramified;
    else
        out.kind = SplitKind::inert;
    out.primes = std::move(ps);
    return out;
}

Ideal ideal_of_form(QuadraticField const & K, FormKey const & f)
{
    IntMatrix H(2, 2);
    H(0, 0) = f.a;
    H(1, 0) = mod_floor((f.b - K.t) / 2, f.a);
    H(1, 1) = 1;
    return Ideal(H);
}

std::string describe_ideal(QuadraticField const & K, Ideal const & I)
{
    auto [C, f] = primitive_form(K, I);
    std::ostringstream os;
    if (C != 1)
        os << C.get_str() << "*";
    Integer bp = mod_floor((f.b - K.t) / 2, f.a);
    os << "(" << f.a.get_str() << ", " << bp.get_str() << " + w)";
    return os.str();
}

ClassRep class_rep(QuadraticField const & K, Ideal const & I)
{
    auto [C, f] = primitive_form(K, I);
    auto r = reduce_form(K, f, K.field().from_int(C), true);
    if (K.real())
        r = cycle_min(K, r.f, r.alpha, true);
    return {FormKey{r.f.a, r.f.b}, r.alpha};
}

FormKey class_key(QuadraticField const & K, Ideal const & I)
{
    auto [C, f] = primitive_form(K, I);
    auto r = reduce_form(K, f, FieldElem{}, false);
    if (K.real())
        r = cycle_min(K, r.f, FieldElem{}, false);
    return {r.f.a, r.f.b};
}

std::optional<FieldElem> principal_generator(QuadraticField const & K, Ideal const & I)
{
    auto rep = class_rep(K, I);
    if (!K.real()) {
        if (rep.key.a != 1)
            return std::nullopt;
        return rep.alpha;
    }
    auto one = class_rep(K, unit_ideal(K.field()));
    if (!(rep.key == one.key))
        return std::nullopt;
    return K.field().div(rep.alpha, one.alpha);
}

std::vector<FormKey> reduced_forms(QuadraticField const & K)
{
    std::vector<FormKey> out;
    Integer const D = K.D;
    if (!K.real()) {
        Integer amax = isqrt(-D / 3);
        for (Integer a = 1; a <= amax; ++a)
            for (Integer b = -a + 1; b <= a; ++b) {
                Integer num = b * b - D;
                if (mod_floor(num, 4 * a) != 0)
                    continue;
                Form f{a, b};
                if (is_reduced_imag(K, f))
                    out.push_back({a, b});
            }
        return out;
    }
    Integer const s = isqrt(D);
    for (Integer a = 1; a <= s; ++a)
        for (Integer b = 1; b <= s; ++b) {
            if (mod_floor(b - D, 2) != 0)
                continue;
            Integer num = b * b - D;
            if (mod_floor(num, 4 * a) != 0)
                continue;
            Form f{a, b};
            if (is_reduced_real(K, f))
                out.push_back({a, b});
        }
    return out;
}

Integer class_number(QuadraticField const & K, Integer const & bound)
{
    if (abs(K.D) > bound)
        throw bound_exceeded_error("discriminant exceeds the configured bound");
    auto forms = reduced_forms(K);
    if (!K.real())
        return Integer(static_cast<unsigned long>(forms.size()));
    std::set<FormKey> seen;
    Integer const s = isqrt(K.D);
    unsigned long cycles = 0;
    for (auto const & f : forms) {
        if (seen.count(f))
            continue;
        ++cycles;
        Form cur{f.a, f.b};
        do {
            seen.insert({cur.a, cur.b});
            cur = rho(K, cur, s, nullptr);
        } while (!(cur.a == f.a && cur.b == f.b));
    }
    return Integer(cycles);
}

QuadUnit make_unit(QuadraticField const & K, FieldElem const & v)
{
    QuadUnit u;
    u.value = v;
    auto [x, y] = K.to_xy(v);
    u.x = x;
    u.y = y;
    Rational N = K.field().norm(v);
    if (N != 1 && N != -1)
        throw std::domain_error("not a unit: " + K.format(v));
    u.norm = N > 0 ? 1 : -1;
    return u;
}

QuadUnit fundamental_unit(QuadraticField const & K)
{
    if (!K.real())
        throw std::domain_error("fundamental unit requested for an imaginary field");
    NumberField const & nf = K.field();
    Integer const s = isqrt(K.D);
    /* reduced representative of O: I(1, b0) with b0 the largest admissible b */
    Form start{1, s - mod_floor(s - K.t, 2)};
    if (!is_reduced_real(K, start))
        throw std::logic_error("principal form not reduced");
    FieldElem alpha = nf.one();
    Form cur = start;
    do {
        FieldElem fac;
        cur = rho(K, cur, s, &fac);
        alpha = nf.mul(alpha, fac);
    } while (!(cur.a == start.a && cur.b == start.b));
    /* normalize to the unit > 1: x > 0 and y > 0 in (x + y sqrt D)/2 */
    auto [x, y] = K.to_xy(alpha);
    Rational N = nf.norm(alpha);
    if (N != 1 && N != -1)
        throw std::logic_error("cycle product is not a unit");
    if (x < 0) {
        alpha = nf.neg(alpha);
        x = -x;
        y = -y;
    }
    if (y < 0)
        alpha = nf.conj(alpha, 1), alpha = N < 0 ? nf.neg(alpha) : alpha;
    auto u = make_unit(K, alpha);
    if (u.x <= 0 || u.y <= 0)
        throw std::logic_error("unit normalization failed");
    return u;
}

std::pair<FieldElem, int> torsion_generator(QuadraticField const & K)
{
    if (K.d == -1)
        return {FieldElem{0, 1}, 4};
    if (K.d == -3)
        return {FieldElem{Rational(1, 2), Rational(1, 2)}, 6};
    return {FieldElem{-1, 0}, 2};
}

Integer Modulus::norm() const
{
    Integer N = 1;
    for (auto const & P : primes)
        N *= from_u64(P.q());
    return N;
}

std::vector<u64> Modulus::rational_primes() const
{
    std::vector<u64> out;
    for (auto const & P : primes)
        if (std::find(out.begin(), out.end(), P.p()) == out.end())
            out.push_back(P.p());
    std::sort(out.begin(), out.end());
    return out;
}

std::string Modulus::describe() const
{
    if (primes.empty())
        return "1";
    std::string s;
    for (auto const & P : primes)
        s += (s.empty() ? "" : "*") + P.describe();
    return s;
}

Modulus modulus_from_integer(QuadraticField const & K, Integer const & m)
{
    if (m <= 0)
        throw std::invalid_argument("modulus must be a positive integer");
    Modulus M;
    if (m == 1)
        return M;
    for (auto const & pp : factor(m)) {
        if (pp.k > 1)
            throw std::invalid_argument("modulus must be squarefree");
        for (auto & P : primes_above(K.field(), pp.p))
            M.primes.push_back(std::move(P));
    }
    return M;
}

std::vector<std::pair<u64, int>> modulus_spec(QuadraticField const & K, Modulus const & m)
{
    std::vector<std::pair<u64, int>> out;
    for (auto const & P : m.primes) {
        auto ps = primes_above(K.field(), P.p());
        int idx = -1;
        for (size_t i = 0; i < ps.size(); ++i)
            if (ps[i] == P)
                idx = static_cast<int>(i);
        out.push_back({P.p(), idx});
    }
    return out;
}

Modulus modulus_from_spec(QuadraticField const & K, std::vector<std::pair<u64, int>> const & spec)
{
    Modulus M;
    for (auto [p, idx] : spec) {
        if (!is_prime_u64(p))
            throw std::invalid_argument("modulus entry " + std::to_string(p) + " is not prime");
        auto ps = primes_above(K.field(), p);
        if (idx < 0 || static_cast<size_t>(idx) >= ps.size())
            throw std::invalid_argument("no prime number " + std::to_string(idx) + " above " + std::to_string(p));
        M.primes.push_back(ps[idx]);
    }
    validate_modulus(M);
    return M;
}

void validate_modulus(Modulus const & m, u64 l)
{
    for (size_t i = 0; i < m.primes.size(); ++i) {
        for (size_t j = 0; j < i; ++j)
            if (m.primes[i] == m.primes[j])
                throw std::invalid_argument("modulus is not squarefree");
        if (l && m.primes[i].p() == l)
            throw std::invalid_argument("modulus must be prime to l (tame moduli only)");
    }
}

size_t ClassGroup::node_of(Ideal const & I) const
{
    auto it = index.find(class_key(*K, I));
    if (it == index.end())
        throw std::logic_error("class not reached by the generator closure");
    return it->second;
}

GroupElement ClassGroup::class_of(Ideal const & I) const
{
    return group.from_original(nodes[node_of(I)].path);
}

ClassGroup class_group(QuadraticField const & K, std::vector<u64> const & avoid, Integer const & bound)
{
    ClassGroup G;
    G.K = &K;
    G.h = class_number(K, bound);
    NumberField const & nf = K.field();
    Ideal const O = unit_ideal(nf);
    G.nodes.push_back({class_key(K, O), ZVec{}, O});
    G.index[G.nodes[0].key] = 0;
    u64 p = 1;
    while (Integer(static_cast<unsigned long>(G.nodes.size())) < G.h) {
        p = p + 1;
        while (!is_prime_u64(p))
            ++p;
        if (std::find(avoid.begin(), avoid.end(), p) != avoid.end())
            continue;
        auto sd = factor_prime(K, p);
        if (sd.kind == SplitKind::inert)
            continue;
        for (auto const & P : sd.primes) {
            if (G.index.count(class_key(K, P.ideal())))
                continue;
            G.gens.push_back(P);
            size_t const r = G.gens.size();
            for (auto & nd : G.nodes)
                nd.path.resize(r, 0);
            std::deque<size_t> queue;
            for (size_t i = 0; i < G.nodes.size(); ++i)
                queue.push_back(i);
            while (!queue.empty()) {
                size_t x = queue.front();
                queue.pop_front();
                for (size_t g = 0; g < r; ++g) {
                    Ideal J = ideal_mul(nf, G.nodes[x].rep, G.gens[g].ideal());
                    FormKey k = class_key(K, J);
                    if (G.index.count(k))
                        continue;
                    ZVec path = G.nodes[x].path;
                    path[g] += 1;
                    G.index[k] = G.nodes.size();
                    G.nodes.push_back({k, path, J});
                    queue.push_back(G.nodes.size() - 1);
                }
            }
            break;
        }
        if (p > 1000000)
            throw std::logic_error("class group generators not found below 10^6");
    }
    size_t const r = G.gens.size();
    std::vector<std::string> labels;
    for (auto const & P : G.gens)
        labels.push_back(P.describe());
    std::vector<ZVec> rels;
    for (auto const & nd : G.nodes)
        for (size_t g = 0; g < r; ++g) {
            Ideal J = ideal_mul(nf, nd.rep, G.gens[g].ideal());
            size_t y = G.index.at(class_key(K, J));
            ZVec row = nd.path;
            row[g] += 1;
            for (size_t i = 0; i < r; ++i)
                row[i] -= G.nodes[y].path[i];
            rels.push_back(row);
        }
    G.group = group_from_relations(labels, IntMatrix::from_rows(rels, r));
    if (G.group.order() != G.h)
        throw std::logic_error("class group presentation has the wrong order");
    return G;
}

std::vector<std::string> RayClassGroup::generator_labels() const { return group.labels(); }

namespace {

ZVec concat(ZVec a, ZVec const & b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

} // namespace

RayClassGroup ray_class_group(QuadraticField const & K, Modulus const & m, Integer const & bound)
{
    validate_modulus(m);
    RayClassGroup R;
    R.K = &K;
    R.modulus = m;
    R.cl = class_group(K, m.rational_primes(), bound);
    R.residues = ResidueGroup(K.field(), m.primes);
    auto [tg, tord] = torsion_generator(K);
    R.torsion = tg;
    R.torsion_order = tord;
    if (K.real())
        R.eps = fundamental_unit(K);
    NumberField const & nf = K.field();
    size_t const r = R.cl.gens.size(), s = m.primes.size();
    std::vector<std::string> labels;
    for (auto const & P : R.cl.gens)
        labels.push_back(P.describe());
    for (auto const & P : m.primes)
        labels.push_back("res:" + P.describe());
    std::vector<ZVec> rels;
    for (size_t j = 0; j < s; ++j) {
        ZVec row(r + s, 0);
        row[r + j] = from_u64(m.primes[j].q() - 1);
        rels.push_back(row);
    }
    std::vector<GroupElement> unit_images;
    {
        ZVec row = concat(ZVec(r, 0), R.residues.raw_dlog(tg));
        rels.push_back(row);
        unit_images.push_back(R.residues.group().from_original(R.residues.raw_dlog(tg)));
        if (R.eps) {
            ZVec row2 = concat(ZVec(r, 0), R.residues.raw_dlog(R.eps->value));
            rels.push_back(row2);
            unit_images.push_back(R.residues.group().from_original(R.residues.raw_dlog(R.eps->value)));
        }
    }
    R.unit_image_order = subgroup_order(R.residues.group(), unit_images);
    for (auto const & nd : R.cl.nodes)
        for (size_t g = 0; g < r; ++g) {
            Ideal J = ideal_mul(nf, nd.rep, R.cl.gens[g].ideal());
            size_t y = R.cl.index.at(class_key(K, J));
            Ideal const & Ry = R.cl.nodes[y].rep;
            Ideal X = ideal_mul(nf, J, ideal_conj(nf, Ry, 1));
            auto beta = principal_generator(K, X);
            if (!beta)
                throw std::logic_error("Schreier relation without a principal generator");
            FieldElem gamma = nf.scale(*beta, Rational(1) / Rational(Ry.norm()));
            ZVec row = nd.path;
            row[g] += 1;
            for (size_t i = 0; i < r; ++i)
                row[i] -= R.cl.nodes[y].path[i];
            ZVec dl = R.residues.raw_dlog(gamma);
            for (size_t j = 0; j < s; ++j)
                dl[j] = -dl[j];
            rels.push_back(concat(row, dl));
        }
    if (r + s == 0) {
        R.group = FiniteAbelianGroup::from_invariants({});
        return R;
    }
    R.group = group_from_relations(labels, IntMatrix::from_rows(rels, r + s));
    return R;
}

GroupElement RayClassGroup::ray_class_of_ideal(Ideal const & I) const
{
    if (!residues.coprime(I))
        throw std::invalid_argument("ideal is not coprime to the modulus");
    NumberField const & nf = K->field();
    size_t x = cl.node_of(I);
    Ideal const & Rx = cl.nodes[x].rep;
    auto beta = principal_generator(*K, ideal_mul(nf, I, ideal_conj(nf, Rx, 1)));
    if (!beta)
        throw std::logic_error("class representative mismatch");
    FieldElem alpha = nf.scale(*beta, Rational(1) / Rational(Rx.norm()));
    return group.from_original(concat(cl.nodes[x].path, residues.raw_dlog(alpha)));
}

GroupElement RayClassGroup::class_of_element(FieldElem const & x) const
{
    ZVec v(cl.gens.size(), 0);
    return group.from_original(concat(v, residues.raw_dlog(x)));
}

std::optional<FieldElem> RayClassGroup::is_ray_principal(Ideal const & I) const
{
    if (!group.is_zero(ray_class_of_ideal(I)))
        return std::nullopt;
    NumberField const & nf = K->field();
    auto beta = principal_generator(*K, I);
    if (!beta)
        throw std::logic_error("ray-trivial ideal without a generator");
    auto const & RG = residues.group();
    std::vector<GroupElement> us{residues.dlog(torsion)};
    if (eps)
        us.push_back(residues.dlog(eps->value));
    auto sol = solve_in_group(RG, us, RG.neg(residues.dlog(*beta)));
    if (!sol)
        throw std::logic_error("unit adjustment failed for a ray-trivial ideal");
    Integer k0 = mod_floor((*sol)[0], torsion_order);
    FieldElem a = nf.mul(*beta, nf.pow(torsion, k0));
    if (eps) {
        Integer ord = RG.order_of(us[1]);
        Integer k1 = mod_floor((*sol)[1], ord);
        a = nf.mul(a, nf.pow(eps->value, k1));
    }
    if (!RG.is_zero(residues.dlog(a)) || !generates(nf, a, I))
        throw std::logic_error("ray generator verification failed");
    return a;
}

QuadUnit aug_unit_mod_m(QuadraticField const & K, Modulus const & m)
{
    auto u = fundamental_unit(K);
    ResidueGroup RG(K.field(), m.primes);
    Integer k = u.norm < 0 ? 2 : 1;
    if (!m.primes.empty())
        k = lcm(k, RG.group().order_of(RG.dlog(u.value)));
    return make_unit(K, K.field().pow(u.value, k));
}

Ideal ideal_of_class(RayClassGroup const & R, GroupElement const & v)
{
    auto target = R.group.reduce(v);
    if (R.group.is_zero(target))
        return unit_ideal(R.K->field());
    auto avoid = R.modulus.rational_primes();
    for (u64 p = 2; p < 1000000; ++p) {
        if (!is_prime_u64(p) || std::find(avoid.begin(), avoid.end(), p) != avoid.end())
            continue;
        auto sd = factor_prime(*R.K, p);
        for (auto const & P : sd.primes)
            if (R.ray_class_of_ideal(P.ideal()) == target)
                return P.ideal();
    }
    throw std::domain_error("no prime ideal below 10^6 in the requested class");
}

} // namespace rcap
