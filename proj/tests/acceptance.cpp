#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>

#include "CLI11.hpp"
#include "rcap/report.hpp"

using namespace rcap;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    json data;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/* 1. ambiguous class number formula = direct count */
Outcome criterion_1(int jobs)
{
    Outcome o;
    json parts = json::object();
    bool pass = true;
    std::string detail;
    for (auto const & [name, minimum] : std::vector<std::pair<std::string, size_t>>{
             {"quadratic", 1}, {"modulus", 50}, {"biquadratic", 5}}) {
        auto cases = ambig_corpus(name);
        auto reps = ambig_sweep(cases, jobs);
        size_t eq = 0;
        json arr = json::array();
        for (auto const & r : reps) {
            eq += r.equal;
            arr.push_back(to_json(r));
        }
        bool ok = eq == reps.size() && reps.size() >= minimum;
        if (name == "modulus")
            for (auto const & c : cases)
                ok = ok && c.m <= 50 && gcd(c.m, c.d) == 1;
        pass = pass && ok;
        parts[name] = json{{"cases", reps.size()}, {"equal", eq}, {"reports", arr}};
        detail += name + " " + std::to_string(eq) + "/" + std::to_string(reps.size()) + "; ";
    }
    o.pass = pass;
    o.detail = detail;
    o.data = parts;
    return o;
}

/* 2. |Cl^m_K| = h |(O/m)^*| / |unit image|, and Cl^m_Q = (Z/m)^* / {+-1} */
Outcome criterion_2()
{
    Outcome o;
    size_t checked = 0, bad = 0;
    json rows = json::array();
    std::vector<AmbigCase> pairs;
    for (auto name : {"quadratic", "modulus", "imaginary"})
        for (auto const & c : ambig_corpus(name))
            pairs.push_back(c);
    for (auto const & c : pairs) {
        auto K = make_quadratic(c.d);
        auto R = ray_class_group(K, modulus_from_integer(K, c.m));
        std::vector<GroupElement> us{R.residues.dlog(R.torsion)};
        if (R.eps)
            us.push_back(R.residues.dlog(R.eps->value));
        Integer image = subgroup_order(R.residues.group(), us);
        Integer num = R.cl.h * R.residues.order();
        bool ok = num % image == 0 && R.order() == num / image;
        ++checked;
        bad += !ok;
        rows.push_back(json{{"d", c.d.get_str()}, {"m", c.m.get_str()}, {"order", R.order().get_str()}, {"ok", ok}});
    }
    /* Cl^m_Q against brute force: #{classes with x^k = +-1} = prod gcd(k, n_i) */
    size_t q_checked = 0, q_bad = 0;
    for (long m = 1; m <= 100; ++m) {
        if (!is_squarefree(Integer(m)))
            continue;
        auto G = rayclass_Q(m);
        bool ok = true;
        long order = G.order().get_si();
        for (long k = 1; k <= order; ++k) {
            if (order % k != 0)
                continue;
            long cnt = 0, units = 0;
            for (long x = 1; x <= m; ++x) {
                if (std::gcd(x, m) != 1)
                    continue;
                ++units;
                Integer y = Integer(x);
                mpz_powm_ui(y.get_mpz_t(), y.get_mpz_t(), static_cast<unsigned long>(k), Integer(m).get_mpz_t());
                cnt += (y == 1 % m || y == m - 1);
            }
            long classes = m <= 2 ? cnt : cnt / 2;
            long predicted = 1;
            for (auto const & n : G.invariants())
                predicted *= std::gcd(k, n.get_si());
            ok = ok && classes == predicted && (m <= 2 ? units : units / 2) == order;
        }
        ++q_checked;
        q_bad += !ok;
    }
    o.pass = bad == 0 && q_bad == 0 && checked > 0;
    o.detail = "order identity " + std::to_string(checked - bad) + "/" + std::to_string(checked) + "; Cl^m_Q " +
               std::to_string(q_checked - q_bad) + "/" + std::to_string(q_checked) + " moduli";
    o.data = json{{"pairs", rows}, {"Q_moduli", q_checked}, {"Q_failures", q_bad}};
    return o;
}

/* 3. end-to-end capitulation for five real quadratic fields */
Outcome criterion_3(int jobs, std::string & timing)
{
    Outcome o;
    json rows = json::array();
    json skipped = json::array();
    int certified = 0, success = 0;
    double worst = 0;
    std::vector<long> order{34};
    for (long d = 2; d < 1000; ++d)
        if (d != 34 && is_squarefree(Integer(d)))
            order.push_back(d);
    for (long d : order) {
        if (certified >= 5)
            break;
        auto K = make_quadratic(d);
        if (class_number(K) % 2 != 0)
            continue;
        auto t0 = Clock::now();
        auto R = ray_class_group(K, Modulus{});
        json row{{"d", d}, {"modulus", "1"}};
        std::optional<CandidateCertificate> cert;
        for (unsigned n : {1u, 2u}) {
            SearchParams P;
            P.n = n;
            P.h = 0;
            P.h_override = true;
            P.bound = 1000000;
            finalize_params(K, P);
            auto ctx = make_context(K, R, select_target(R.group, "auto-2"), aug_unit_mod_m(K, Modulus{}), P);
            auto res = find_principalizing_prime(ctx, jobs);
            if (res.status == SearchStatus::found) {
                cert = res.cert;
                row["n"] = n;
                break;
            }
        }
        if (!cert) {
            skipped.push_back(json{{"d", d}, {"reason", "no admissible p <= 1000000 for n = 1, 2"}});
            continue;
        }
        ++certified;
        row["p"] = cert->p;
        auto rep = capitulates(*cert);
        auto L = make_biquadratic(Integer(d), from_u64(cert->p));
        row["verification"] = to_json(rep, &L);
        bool ok = false;
        if (rep.status == VerifyStatus::success && rep.extended.generator) {
            Ideal ext = L.extend(0, prime_at_root(K, cert->p, cert->r).ideal());
            ok = generates(L.field(), *rep.extended.generator, ext);
            row["generator_rechecked"] = ok;
        }
        double secs = seconds_since(t0);
        worst = std::max(worst, secs);
        ok = ok && secs < 300;
        success += ok;
        row["ok"] = ok;
        rows.push_back(row);
    }
    o.pass = certified >= 5 && success == certified;
    o.detail = std::to_string(success) + "/" + std::to_string(certified) + " certified fields (" +
               std::to_string(skipped.size()) +
               " skipped without admissible p): p_K O_L = q_L^2 has a generator alpha = 1 mod^x m_L, re-verified by "
               "ideal equality (q_L itself is never principal: its relative norm is the non-principal p_K)";
    timing = "worst case " + std::to_string(worst) + " s";
    o.data = json{{"fields", rows}, {"skipped", skipped}};
    return o;
}

/* 4. cyclic complement lemma, brute force over all abelian l-groups of order <= 256 */
void partitions(int n, int max, std::vector<int> & cur, std::vector<std::vector<int>> & out)
{
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    for (int k = std::min(n, max); k >= 1; --k) {
        cur.push_back(k);
        partitions(n - k, k, cur, out);
        cur.pop_back();
    }
}

Outcome criterion_4()
{
    Outcome o;
    size_t groups = 0, subgroups = 0, failures = 0;
    for (long ell : {2L, 3L}) {
        for (int e = 1; std::pow(ell, e) <= 256; ++e) {
            std::vector<std::vector<int>> parts;
            std::vector<int> cur;
            partitions(e, e, cur, parts);
            for (auto const & part : parts) {
                ZVec inv;
                for (auto it = part.rbegin(); it != part.rend(); ++it)
                    inv.push_back(Integer(static_cast<long>(std::pow(ell, *it))));
                auto A = FiniteAbelianGroup::from_invariants(inv);
                ++groups;
                auto elems = A.elements();
                std::set<std::set<GroupElement>> seen;
                auto closure = [&](std::vector<GroupElement> const & gens) {
                    std::set<GroupElement> S{A.zero()};
                    std::vector<GroupElement> queue{A.zero()};
                    for (size_t i = 0; i < queue.size(); ++i)
                        for (auto const & g : gens) {
                            auto y = A.add(queue[i], g);
                            if (S.insert(y).second)
                                queue.push_back(y);
                        }
                    return S;
                };
                for (auto const & c : elems) {
                    if (A.is_zero(c))
                        continue;
                    auto C = closure({c});
                    if (!seen.insert(C).second)
                        continue;
                    ++subgroups;
                    auto B = closure(cyclic_complement(A, c));
                    bool ok = true;
                    for (auto const & x : C)
                        if (!A.is_zero(x) && B.count(x))
                            ok = false;
                    /* A / B cyclic: some a has order |A| / |B| modulo B */
                    Integer quotient = A.order() / Integer(static_cast<unsigned long>(B.size()));
                    bool cyclic = false;
                    for (auto const & a : elems) {
                        GroupElement x = a;
                        Integer k = 1;
                        while (!B.count(x)) {
                            x = A.add(x, a);
                            ++k;
                        }
                        if (k == quotient) {
                            cyclic = true;
                            break;
                        }
                    }
                    /* C embeds in A / B: |C| divides |A / B| and C meets B trivially */
                    bool embeds = ok && quotient % Integer(static_cast<unsigned long>(C.size())) == 0;
                    failures += !(ok && cyclic && embeds);
                }
            }
        }
    }
    o.pass = failures == 0 && groups > 0;
    o.detail = std::to_string(groups) + " groups, " + std::to_string(subgroups) + " cyclic subgroups, " +
               std::to_string(failures) + " failures";
    o.data = json{{"groups", groups}, {"cyclic_subgroups", subgroups}, {"failures", failures}};
    return o;
}

/* 5. Gaussian period factorization degree = residue character order */
Outcome criterion_5(u64 seed)
{
    Outcome o;
    std::mt19937_64 rng(seed);
    int checked = 0, mismatches = 0;
    json rows = json::array();
    while (checked < 50) {
        u64 ell = rng() % 2 ? 2 : 3;
        unsigned n = 1 + rng() % 2;
        u64 m = ipow(ell, n);
        u64 p = 0;
        while (!is_prime_u64(p) || (p - 1) % m != 0)
            p = 5 + rng() % 2000;
        u64 q = 0;
        while (!is_prime_u64(q) || q == p)
            q = 2 + rng() % 5000;
        auto f = PolyModP::from_integers(gaussian_period_min_poly(p, m), q);
        if (!is_squarefree(f))
            continue;
        auto degs = factor_degrees(f);
        u64 predicted = residue_character(from_u64(q), p, ell, n).order;
        bool ok = std::all_of(degs.begin(), degs.end(), [&](int d) { return static_cast<u64>(d) == predicted; });
        mismatches += !ok;
        rows.push_back(json{{"p", p}, {"q", q}, {"level", m}, {"predicted", predicted}, {"degrees", degs}, {"ok", ok}});
        ++checked;
    }
    o.pass = mismatches == 0;
    o.detail = std::to_string(checked) + " pairs, " + std::to_string(mismatches) + " mismatches";
    o.data = json{{"pairs", rows}};
    return o;
}

/* 6. round-trip principality in five biquadratic fields */
Outcome criterion_6(u64 seed, int jobs)
{
    Outcome o;
    std::mt19937_64 rng(seed);
    int found = 0, false_neg = 0, false_pos = 0, total = 0;
    json rows = json::array();
    std::vector<std::pair<long, long>> fields{{2, 5}, {34, 5}, {3, 7}, {5, 13}, {2, 3}};
    for (auto [d, p] : fields) {
        auto L = make_biquadratic(Integer(d), Integer(p));
        auto U = unit_group(L);
        auto const & nf = L.field();
        FPOptions opts;
        opts.jobs = jobs;
        int here = 0;
        while (here < 40) {
            ZVec v(4);
            for (auto & c : v)
                c = static_cast<long>(rng() % 41) - 20;
            if (nf.norm(v) == 0)
                continue;
            Ideal I = principal_ideal(nf, v);
            auto r = is_principal(L, U, I, opts);
            ++here;
            ++total;
            if (r.status != PrincipalStatus::principal) {
                ++false_neg;
                continue;
            }
            /* the generator differs from v by a unit */
            FieldElem ratio = nf.div(r.generator, nf.to_power(v));
            Rational N = nf.norm(ratio);
            bool unit = nf.is_integral(ratio) && (N == 1 || N == -1);
            if (!generates(nf, r.generator, I) || !unit)
                ++false_pos;
            else
                ++found;
        }
        rows.push_back(json{{"L", "Q(sqrt " + std::to_string(d) + ", sqrt " + std::to_string(p) + ")"},
                            {"unit_index", U.index}});
    }
    o.pass = total == 200 && found == 200 && false_neg == 0 && false_pos == 0;
    o.detail = std::to_string(found) + "/" + std::to_string(total) + " recovered, " + std::to_string(false_neg) +
               " false negatives, " + std::to_string(false_pos) + " false positives";
    o.data = json{{"fields", rows}, {"recovered", found}, {"false_negatives", false_neg}, {"false_positives", false_pos}};
    return o;
}

std::vector<std::pair<Outcome, std::string>> run_all(u64 seed, int jobs)
{
    std::vector<std::pair<Outcome, std::string>> out;
    auto timed = [&](std::function<Outcome(std::string &)> fn) {
        auto t0 = Clock::now();
        std::string extra;
        Outcome o = fn(extra);
        std::string t = std::to_string(seconds_since(t0)) + " s";
        if (!extra.empty())
            t += ", " + extra;
        out.emplace_back(std::move(o), t);
    };
    timed([&](std::string &) { return criterion_1(jobs); });
    timed([&](std::string &) { return criterion_2(); });
    timed([&](std::string & x) { return criterion_3(jobs, x); });
    timed([&](std::string &) { return criterion_4(); });
    timed([&](std::string &) { return criterion_5(seed); });
    timed([&](std::string &) { return criterion_6(seed, jobs); });
    return out;
}

} // namespace

int main(int argc, char ** argv)
{
    CLI::App app{"Acceptance checks"};
    std::string out_dir;
    u64 seed = 20240601;
    int jobs = 0;
    app.add_option("--out", out_dir, "Directory for JSON reports");
    app.add_option("--seed", seed, "Seed for sampled criteria");
    app.add_option("--jobs", jobs, "Worker threads (0: all)");
    CLI11_PARSE(app, argc, argv);

    std::vector<std::string> docs;
    bool all = true;
    std::vector<std::pair<Outcome, std::string>> first;
    try {
        first = run_all(seed, jobs);
    } catch (std::exception const & e) {
        std::cout << "acceptance aborted: " << e.what() << "\n";
        return 1;
    }
    for (size_t i = 0; i < first.size(); ++i) {
        auto const & [o, t] = first[i];
        std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "  (" << t
                  << ")\n";
        all = all && o.pass;
        docs.push_back(canonical(envelope("acceptance", json{{"criterion", i + 1}, {"pass", o.pass}, {"detail", o.detail},
                                                              {"data", o.data}})));
    }
    /* 7. a second run of 1-6 must give byte-identical reports */
    auto second = run_all(seed, jobs);
    size_t same = 0;
    for (size_t i = 0; i < second.size(); ++i) {
        auto const & o = second[i].first;
        std::string d = canonical(envelope("acceptance", json{{"criterion", i + 1}, {"pass", o.pass}, {"detail", o.detail},
                                                              {"data", o.data}}));
        same += d == docs[i];
    }
    bool det = same == docs.size();
    std::cout << "criterion 7: " << (det ? "PASS" : "FAIL") << "  " << same << "/" << docs.size()
              << " reports byte-identical across two runs\n";
    all = all && det;
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (size_t i = 0; i < docs.size(); ++i)
            std::ofstream(std::filesystem::path(out_dir) / ("criterion_" + std::to_string(i + 1) + ".json")) << docs[i]
                                                                                                              << "\n";
    }
    std::cout << (all ? "acceptance: all criteria pass" : "acceptance: some criteria fail") << "\n";
    return all ? 0 : 1;
}
