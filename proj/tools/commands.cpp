#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "rcap/cache.hpp"

namespace rcap::cli {

namespace {

struct Globals {
    bool json = false;
    std::string cache_dir;
    u64 seed = 1;
    int jobs = 0;
    ResultCache cache;
};

struct Emitter {
    Globals const & g;
    std::ostream & out;

    void doc(json const & j, std::string const & text) const
    {
        if (g.json)
            out << canonical(j) << '\n';
        else
            out << text;
    }
};

Integer parse_integer(std::string const & s)
{
    Integer x;
    if (s.empty() || x.set_str(s, 10) != 0)
        throw std::invalid_argument("not an integer: " + s);
    return x;
}

/* "5:0,7:1" -> {(5, 0), (7, 1)} */
std::vector<std::pair<u64, int>> parse_mod_primes(std::string const & s)
{
    std::vector<std::pair<u64, int>> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("prime ideal spec must look like p:index");
        out.emplace_back(std::stoull(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
    }
    return out;
}

Modulus build_modulus(QuadraticField const & K, std::string const & mod, std::string const & mod_primes)
{
    Modulus m = mod_primes.empty() ? modulus_from_integer(K, parse_integer(mod))
                                   : modulus_from_spec(K, parse_mod_primes(mod_primes));
    validate_modulus(m);
    return m;
}

json modulus_key(QuadraticField const & K, Modulus const & m)
{
    json a = json::array();
    for (auto const & [p, i] : modulus_spec(K, m))
        a.push_back(json::array({p, i}));
    return a;
}

/* ---------------------------------------------------------------- rayclass */

struct RayclassArgs {
    std::string field;
    std::string d;
    std::string mod = "1";
    std::string mod_primes;
};

json rayclass_doc(RayclassArgs const & a)
{
    if (a.field == "Q") {
        auto G = rayclass_Q(parse_integer(a.mod));
        return envelope("rayclass", json{{"field", "Q"}, {"modulus", a.mod}, {"group", to_json(G)}});
    }
    if (a.d.empty())
        throw std::invalid_argument("give --field Q or --d <squarefree d>");
    auto K = make_quadratic(parse_integer(a.d));
    auto m = build_modulus(K, a.mod, a.mod_primes);
    auto R = ray_class_group(K, m);
    json gens = json::array();
    for (size_t i = 0; i < R.group.rank(); ++i) {
        GroupElement e = R.group.zero();
        e[i] = 1;
        gens.push_back(describe_ideal(K, ideal_of_class(R, e)));
    }
    Integer lhs = R.order();
    Integer rhs = R.cl.h * R.residues.order() / R.unit_image_order;
    return envelope("rayclass", json{{"field", "Q(sqrt " + K.d.get_str() + ")"},
                                     {"modulus", m.describe()},
                                     {"modulus_spec", modulus_key(K, m)},
                                     {"group", to_json(R.group)},
                                     {"generators", gens},
                                     {"class_number", R.cl.h.get_str()},
                                     {"residue_order", R.residues.order().get_str()},
                                     {"unit_image_order", R.unit_image_order.get_str()},
                                     {"order_identity", lhs == rhs && R.cl.h * R.residues.order() % R.unit_image_order == 0}});
}

int cmd_rayclass(Globals const & g, RayclassArgs const & a, std::ostream & out)
{
    json key{{"op", "rayclass"}, {"field", a.field}, {"d", a.d}, {"mod", a.mod}, {"mod_primes", a.mod_primes}};
    json doc;
    if (auto hit = g.cache.get(key)) {
        doc = *hit;
    } else {
        doc = rayclass_doc(a);
        g.cache.put(key, doc);
    }
    std::ostringstream t;
    t << "K = " << doc["field"].get<std::string>() << ", m = " << doc["modulus"].get<std::string>() << "\n";
    t << "Cl^m_K = " << doc["group"]["text"].get<std::string>() << "  (order " << doc["group"]["order"].get<std::string>()
      << ")\n";
    if (doc.contains("generators")) {
        for (auto const & s : doc["generators"])
            t << "  generator class: " << s.get<std::string>() << "\n";
        t << "  h_K = " << doc["class_number"].get<std::string>() << ", |(O/m)^*| = "
          << doc["residue_order"].get<std::string>() << ", |units image| = " << doc["unit_image_order"].get<std::string>()
          << (doc["order_identity"].get<bool>() ? "  [order identity holds]" : "  [ORDER IDENTITY FAILS]") << "\n";
    }
    Emitter{g, out}.doc(doc, t.str());
    return Exit::ok;
}

/* ------------------------------------------------------------------ search */

struct SearchArgs {
    std::string d;
    std::string mod = "1";
    std::string mod_primes;
    std::string target = "auto-2";
    u64 ell = 2;
    unsigned n = 1;
    int h = -1;
    u64 bound = 1000000;
    std::string out_path;
};

std::pair<json, int> search_doc(Globals const & g, SearchArgs const & a)
{
    Integer d = parse_integer(a.d);
    if (d <= 1)
        throw std::invalid_argument("search needs a real quadratic field (d > 1)");
    auto K = make_quadratic(d);
    auto m = build_modulus(K, a.mod, a.mod_primes);
    validate_modulus(m, a.ell);
    auto R = ray_class_group(K, m);
    auto target = select_target(R.group, a.target);
    SearchParams P;
    P.ell = a.ell;
    P.n = a.n;
    P.bound = a.bound;
    if (a.h >= 0) {
        P.h = static_cast<unsigned>(a.h);
        P.h_override = true;
    }
    try {
        finalize_params(K, P);
    } catch (std::invalid_argument const & e) {
        throw std::invalid_argument(std::string(e.what()) + "; h defaults to h_K = " + std::to_string(P.h_K) +
                                    ", pass --h with h < n or raise --n");
    }
    auto ctx = make_context(K, R, target, aug_unit_mod_m(K, m), P);
    auto res = find_principalizing_prime(ctx, g.jobs);
    switch (res.status) {
    case SearchStatus::found: {
        json doc = certificate_file(res);
        doc["status"] = "found";
        return {doc, Exit::ok};
    }
    case SearchStatus::not_found:
        return {envelope("search", json{{"status", "not_found"}, {"bound", res.bound}, {"stats", to_json(res.stats)}}),
                Exit::not_found};
    case SearchStatus::blocked_iv:
        return {envelope("search", json{{"status", "blocked_iv"},
                                        {"h", P.h},
                                        {"h_K", P.h_K},
                                        {"hint", to_json(power_adjustment_hint(K, P.ell, P.h))}}),
                Exit::blocked};
    }
    return {json{}, Exit::internal};
}

int cmd_search(Globals const & g, SearchArgs const & a, std::ostream & out)
{
    json key{{"op", "search"}, {"d", a.d},     {"mod", a.mod}, {"mod_primes", a.mod_primes}, {"target", a.target},
             {"ell", a.ell},   {"n", a.n},     {"h", a.h},     {"bound", a.bound}};
    json doc;
    int code;
    if (auto hit = g.cache.get(key)) {
        doc = hit->at("doc");
        code = hit->at("exit").get<int>();
    } else {
        std::tie(doc, code) = search_doc(g, a);
        g.cache.put(key, json{{"doc", doc}, {"exit", code}});
    }
    if (code == Exit::ok && !a.out_path.empty()) {
        std::ofstream f(a.out_path);
        if (!f)
            throw std::runtime_error("cannot write " + a.out_path);
        json file = doc;
        file.erase("status");
        f << file.dump(2) << '\n';
    }
    std::ostringstream t;
    std::string status = doc["status"].get<std::string>();
    t << "status: " << status << "\n";
    if (status == "found") {
        auto const & c = doc["certificate"];
        t << "p = " << c["p"].get<u64>() << ", root r = " << c["r"].get<u64>() << ", p_K = " << c["p_K"].get<std::string>()
          << "\n";
        t << "l = " << c["ell"].get<u64>() << ", n = " << c["n"].get<unsigned>() << ", h = " << c["h"].get<unsigned>()
          << ", h_K = " << c["h_K"].get<unsigned>() << "\n";
        t << "chi(eps) order " << c["chi_eps"]["order"].get<u64>() << ", Cl^m_K = " << c["group"].get<std::string>()
          << "\n";
        if (doc.contains("field")) {
            t << "F: degree " << doc["field"]["degree"].get<u64>() << ", x-coefficients (low to high):";
            for (auto const & x : doc["field"]["poly"])
                t << " " << x.get<std::string>();
            t << "\n";
        }
        if (!a.out_path.empty())
            t << "certificate written to " << a.out_path << "\n";
    } else if (status == "not_found") {
        t << "no prime p <= " << doc["bound"].get<u64>() << "; scanned " << doc["stats"]["scanned"].get<u64>() << "\n";
        for (auto const & [k, v] : doc["stats"]["rejected"].items())
            t << "  rejected at (" << k << "): " << v.get<u64>() << "\n";
    } else {
        auto const & h = doc["hint"];
        t << "condition (iv) blocks at h = " << doc["h"].get<unsigned>() << "\n";
        t << "hint: " << h["field"].get<std::string>() << "; " << h["requirement"].get<std::string>() << "\n";
    }
    Emitter{g, out}.doc(doc, t.str());
    return code;
}

/* ------------------------------------------------------------------ verify */

struct VerifyArgs {
    std::string path;
    u64 max_cells = 1000000;
    u64 max_nodes = 400000000;
};

int cmd_verify(Globals const & g, VerifyArgs const & a, std::ostream & out)
{
    std::ifstream f(a.path);
    if (!f)
        throw std::invalid_argument("cannot read " + a.path);
    json file;
    try {
        file = json::parse(f);
    } catch (json::exception const & e) {
        throw std::invalid_argument(std::string("not JSON: ") + e.what());
    }
    expect_kind(file, "certificate");
    auto cert = certificate_from_json(file.at("certificate"));
    bool hash_ok = file.value("sha256", "") == sha256_hex(canonical(file.at("certificate")));
    FPOptions opts;
    opts.max_cells = a.max_cells;
    opts.max_nodes = a.max_nodes;
    opts.jobs = g.jobs;
    auto rep = capitulates(cert, opts);
    if (!hash_ok && rep.status == VerifyStatus::success) {
        rep.status = VerifyStatus::fail;
        rep.reason = "hash stamp mismatch (certificate edited); " + rep.reason;
    }
    std::optional<BiquadField> L;
    if (!rep.L.empty())
        L = make_biquadratic(cert.d, from_u64(cert.p));
    json doc = envelope("verification", json{{"d", cert.d.get_str()},
                                             {"p", cert.p},
                                             {"ell", cert.ell},
                                             {"n", cert.n},
                                             {"hash_ok", hash_ok},
                                             {"report", to_json(rep, L ? &*L : nullptr)}});
    std::ostringstream t;
    t << "status: " << to_string(rep.status) << "\n" << "reason: " << rep.reason << "\n";
    if (!hash_ok)
        t << "warning: hash stamp does not match\n";
    if (!rep.L.empty()) {
        t << "L = " << rep.L << ", m_L = " << rep.m_L << "\n";
        for (auto const & [name, v] : {std::pair<char const *, IdealVerdict const *>{"p_K O_L", &rep.extended},
                                       {"q_L", &rep.q_L}}) {
            t << name << ": " << (v->ray_principal ? "ray-principal" : v->principal ? "principal only" : "not principal")
              << " [" << v->method << (v->crosschecked ? ", lattice cross-check agrees" : "") << "]\n";
            if (v->generator && L)
                t << "  alpha = " << L->field().format(*v->generator) << "\n";
        }
    }
    Emitter{g, out}.doc(doc, t.str());
    switch (rep.status) {
    case VerifyStatus::success:
        return Exit::ok;
    case VerifyStatus::fail:
        return Exit::verify_failed;
    case VerifyStatus::budget:
        return Exit::budget;
    case VerifyStatus::unverified:
        return Exit::unverified;
    }
    return Exit::internal;
}

/* ------------------------------------------------------------------- ambig */

struct AmbigArgs {
    std::string disc;
    std::string mod = "1";
    std::string biquad;
    std::string degenerate;
    std::string sweep;
};

json case_key(AmbigCase const & c)
{
    static char const * kinds[] = {"quadratic", "biquadratic", "degenerate"};
    return json{{"op", "ambig"},
                {"kind", kinds[static_cast<int>(c.kind)]},
                {"d", c.d.get_str()},
                {"p", c.p.get_str()},
                {"m", c.m.get_str()}};
}

int cmd_ambig(Globals const & g, AmbigArgs const & a, std::ostream & out)
{
    std::vector<AmbigCase> cases;
    if (!a.sweep.empty()) {
        cases = ambig_corpus(a.sweep);
    } else if (!a.disc.empty()) {
        cases.push_back(quadratic_case(parse_integer(a.disc), parse_integer(a.mod)));
    } else if (!a.biquad.empty()) {
        auto comma = a.biquad.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("--biquad takes d,p");
        AmbigCase c;
        c.kind = AmbigCase::Kind::biquadratic;
        c.d = parse_integer(a.biquad.substr(0, comma));
        c.p = parse_integer(a.biquad.substr(comma + 1));
        c.m = parse_integer(a.mod);
        cases.push_back(c);
    } else if (!a.degenerate.empty()) {
        AmbigCase c;
        c.kind = AmbigCase::Kind::degenerate;
        c.d = parse_integer(a.degenerate);
        c.m = parse_integer(a.mod);
        cases.push_back(c);
    } else {
        throw std::invalid_argument("give --L-disc, --biquad, --degenerate or --sweep");
    }
    /* single cases report input errors directly */
    if (cases.size() == 1 && a.sweep.empty()) {
        auto const & c = cases[0];
        if (c.kind == AmbigCase::Kind::biquadratic) {
            auto L = make_biquadratic(c.d, c.p);
            if (!L.totally_real())
                throw std::invalid_argument("biquadratic cases need a totally real L");
        }
    }
    std::vector<std::optional<json>> docs(cases.size());
    std::vector<AmbigCase> todo;
    std::vector<size_t> where;
    for (size_t i = 0; i < cases.size(); ++i) {
        if (auto hit = g.cache.get(case_key(cases[i])))
            docs[i] = *hit;
        else {
            todo.push_back(cases[i]);
            where.push_back(i);
        }
    }
    auto reps = ambig_sweep(todo, g.jobs);
    for (size_t k = 0; k < reps.size(); ++k) {
        json j = envelope("ambig", to_json(reps[k]));
        if (reps[k].error.empty())
            g.cache.put(case_key(todo[k]), j);
        docs[where[k]] = j;
    }
    bool all = true;
    std::ostringstream t;
    for (auto const & d : docs) {
        bool eq = d->at("equal").get<bool>();
        all = all && eq;
        if (g.json) {
            out << canonical(*d) << '\n';
        } else {
            t << d->at("L").get<std::string>() << " / " << d->at("K").get<std::string>() << ", m = "
              << d->at("m").get<std::string>() << ": formula " << d->at("formula").get<std::string>() << ", direct "
              << d->at("direct").get<std::string>() << (eq ? "  ok" : "  MISMATCH");
            if (d->contains("error"))
                t << "  (" << d->at("error").get<std::string>() << ")";
            t << "\n";
        }
    }
    if (!g.json) {
        t << docs.size() << " case(s), " << (all ? "all equal" : "mismatches present") << "\n";
        out << t.str();
    }
    return all ? Exit::ok : Exit::verify_failed;
}

/* ---------------------------------------------------------------- selftest */

int cmd_selftest(Globals const & g, std::ostream & out)
{
    std::vector<std::pair<std::string, bool>> checks;
    auto check = [&](std::string const & name, auto && fn) {
        bool okay = false;
        try {
            okay = fn();
        } catch (std::exception const &) {
            okay = false;
        }
        checks.emplace_back(name, okay);
    };
    check("rayclass Q mod 5 = Z/2", [] { return rayclass_Q(5).invariants() == ZVec{2}; });
    check("rayclass Q(i) mod 3 = Z/2", [] {
        auto K = make_quadratic(-1);
        return ray_class_group(K, modulus_from_integer(K, 3)).group.invariants() == ZVec{2};
    });
    check("rayclass Q(sqrt 2) mod 1 trivial", [] {
        auto K = make_quadratic(2);
        return ray_class_group(K, Modulus{}).order() == 1;
    });
    check("ambiguous formula disc -20 mod 3", [] { return ambig_report(quadratic_case(-20, 3)).equal; });
    check("ambiguous formula disc 8 mod 1", [] { return ambig_report(quadratic_case(8, 1)).equal; });
    check("ambiguous formula Q(sqrt 34, sqrt 5) / Q(sqrt 34)", [] {
        AmbigCase c;
        c.kind = AmbigCase::Kind::biquadratic;
        c.d = 34;
        c.p = 5;
        return ambig_report(c).equal;
    });
    check("search and verify Q(sqrt 34)", [&] {
        auto K = make_quadratic(34);
        auto R = ray_class_group(K, Modulus{});
        SearchParams P;
        P.h = 0;
        P.h_override = true;
        P.bound = 1000;
        finalize_params(K, P);
        auto ctx = make_context(K, R, select_target(R.group, "auto-2"), aug_unit_mod_m(K, Modulus{}), P);
        auto res = find_principalizing_prime(ctx, g.jobs);
        return res.status == SearchStatus::found && capitulates(*res.cert).status == VerifyStatus::success;
    });
    check("random principal ideals in Q(sqrt 2, sqrt 5)", [&] {
        std::mt19937_64 rng(g.seed);
        auto L = make_biquadratic(2, 5);
        auto U = unit_group(L);
        for (int k = 0; k < 10; ++k) {
            ZVec v(4);
            for (auto & c : v)
                c = static_cast<long>(rng() % 11) - 5;
            if (L.field().norm(v) == 0)
                continue;
            Ideal I = principal_ideal(L.field(), v);
            auto r = is_principal(L, U, I);
            if (r.status != PrincipalStatus::principal || !generates(L.field(), r.generator, I))
                return false;
        }
        return true;
    });
    bool all = true;
    json arr = json::array();
    std::ostringstream t;
    for (auto const & [name, okay] : checks) {
        all = all && okay;
        arr.push_back(json{{"name", name}, {"ok", okay}});
        t << (okay ? "PASS " : "FAIL ") << name << "\n";
    }
    Emitter{g, out}.doc(envelope("selftest", json{{"checks", arr}, {"ok", all}, {"seed", g.seed}}), t.str());
    return all ? Exit::ok : Exit::verify_failed;
}

} // namespace

int run(std::vector<std::string> const & args, std::ostream & out, std::ostream & err)
{
    CLI::App app{"Ray class groups, capitulation certificates and ambiguous class counts for quadratic fields"};
    app.require_subcommand(1);
    Globals g;
    app.add_flag("--json", g.json, "Machine-readable output (JSON lines, schema rc-1)");
    app.add_option("--cache-dir", g.cache_dir, std::string("Result cache directory (else $") + kCacheEnv + ")");
    app.add_option("--seed", g.seed, "Seed for sampled checks");
    app.add_option("--jobs", g.jobs, "Worker threads (0: all)");

    RayclassArgs ra;
    auto * rc = app.add_subcommand("rayclass", "Ray class group of Q or of a quadratic field");
    rc->fallthrough();
    rc->add_option("--field", ra.field, "Q for the rationals");
    rc->add_option("--d", ra.d, "Squarefree d of Q(sqrt d)");
    rc->add_option("--mod", ra.mod, "Squarefree integer modulus")->capture_default_str();
    rc->add_option("--mod-primes", ra.mod_primes, "Prime ideals p:index,... instead of an integer modulus");

    SearchArgs sa;
    auto * se = app.add_subcommand("search", "Search for a principalizing prime p");
    se->set_help_flag("--help", "Print this help message and exit");
    se->fallthrough();
    se->add_option("--d", sa.d, "Squarefree d > 1")->required();
    se->add_option("--mod", sa.mod, "Squarefree integer modulus")->capture_default_str();
    se->add_option("--mod-primes", sa.mod_primes, "Prime ideals p:index,...");
    se->add_option("--class", sa.target, "identity | auto-k | comma-separated exponents")->capture_default_str();
    se->add_option("--l", sa.ell, "l (2 or 3)")->capture_default_str();
    se->add_option("--n", sa.n, "Ramification exponent n")->capture_default_str();
    se->add_option("--h", sa.h, "Character defect h (default h_K)");
    se->add_option("--bound", sa.bound, "Largest p to scan")->capture_default_str();
    se->add_option("--out", sa.out_path, "Write the certificate file here");

    VerifyArgs va;
    auto * ve = app.add_subcommand("verify", "Re-check a certificate and decide capitulation in L = K(sqrt p)");
    ve->fallthrough();
    ve->add_option("certificate", va.path, "Certificate file")->required();
    ve->add_option("--max-cells", va.max_cells, "Enumeration budget: cells")->capture_default_str();
    ve->add_option("--max-nodes", va.max_nodes, "Enumeration budget: tree nodes")->capture_default_str();

    AmbigArgs aa;
    auto * am = app.add_subcommand("ambig", "Ambiguous ray class count: formula against direct computation");
    am->fallthrough();
    am->add_option("--L-disc", aa.disc, "Fundamental discriminant of L (K = Q)");
    am->add_option("--mod", aa.mod, "Squarefree integer modulus")->capture_default_str();
    am->add_option("--biquad", aa.biquad, "d,p for L = Q(sqrt d, sqrt p) over K = Q(sqrt d)");
    am->add_option("--degenerate", aa.degenerate, "d for L = K = Q(sqrt d)");
    am->add_option("--sweep", aa.sweep, "default | quadratic | modulus | imaginary | biquadratic | degenerate");

    auto * st = app.add_subcommand("selftest", "Quick end-to-end checks");
    st->fallthrough();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (CLI::CallForHelp const &) {
        out << app.help();
        return Exit::ok;
    } catch (CLI::ParseError const & e) {
        err << e.what() << "\n";
        return Exit::invalid;
    }
    try {
        g.cache = ResultCache::resolve(g.cache_dir);
        if (rc->parsed())
            return cmd_rayclass(g, ra, out);
        if (se->parsed())
            return cmd_search(g, sa, out);
        if (ve->parsed())
            return cmd_verify(g, va, out);
        if (am->parsed())
            return cmd_ambig(g, aa, out);
        if (st->parsed())
            return cmd_selftest(g, out);
    } catch (std::invalid_argument const & e) {
        err << "invalid input: " << e.what() << "\n";
        return Exit::invalid;
    } catch (bound_exceeded_error const & e) {
        err << "budget exceeded: " << e.what() << "\n";
        return Exit::budget;
    } catch (std::exception const & e) {
        err << "error: " << e.what() << "\n";
        return Exit::internal;
    }
    return Exit::invalid;
}

} // namespace rcap::cli
