#include "rcap/report.hpp"

#include <iomanip>
#include <sstream>

#include <gmp.h>
#include <openssl/evp.h>

namespace rcap {

namespace {

json big(Integer const & x) { return x.get_str(); }

Integer big_from(json const & j)
{
    if (j.is_number_integer())
        return Integer(j.get<long>());
    Integer x;
    if (!j.is_string() || x.set_str(j.get<std::string>(), 10) != 0)
        throw std::invalid_argument("expected a decimal integer string");
    return x;
}

json vec(ZVec const & v)
{
    json a = json::array();
    for (auto const & x : v)
        a.push_back(big(x));
    return a;
}

ZVec vec_from(json const & j)
{
    ZVec v;
    for (auto const & x : j)
        v.push_back(big_from(x));
    return v;
}

json rationals(FieldElem const & x)
{
    json a = json::array();
    for (auto const & q : x)
        a.push_back(q.get_str());
    return a;
}

json verdict(IdealVerdict const & v, BiquadField const * L)
{
    json j{{"ideal", v.ideal},
           {"principal", v.principal},
           {"ray_principal", v.ray_principal},
           {"method", v.method},
           {"crosschecked", v.crosschecked}};
    if (v.generator) {
        j["generator"] = rationals(*v.generator);
        if (L)
            j["generator_text"] = L->field().format(*v.generator);
    }
    return j;
}

} // namespace

std::string canonical(json const & j) { return j.dump(); }

json envelope(std::string const & kind, json body)
{
    json j{{"schema", kSchema}, {"kind", kind}};
    j.update(body);
    return j;
}

void expect_kind(json const & j, std::string const & kind)
{
    if (!j.is_object() || j.value("schema", "") != kSchema)
        throw std::invalid_argument("not an rc-1 document");
    if (j.value("kind", "") != kind)
        throw std::invalid_argument("expected a document of kind " + kind);
}

std::string sha256_hex(std::string const & data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

std::string toolchain_fingerprint()
{
    std::string cc =
#ifdef __VERSION__
        __VERSION__;
#else
        "unknown";
#endif
    return "cxx " + cc + "; gmp " + gmp_version;
}

json to_json(FiniteAbelianGroup const & G)
{
    return json{{"invariants", vec(G.invariants())}, {"order", big(G.order())}, {"text", G.describe()}};
}

json to_json(ResidueCharacter const & c)
{
    return json{{"p", c.p},         {"ell", c.ell},           {"n", c.n},        {"level", c.level},
                {"value", c.value}, {"exponent", c.exponent}, {"order", c.order}};
}

ResidueCharacter character_from_json(json const & j)
{
    ResidueCharacter c;
    c.p = j.at("p").get<u64>();
    c.ell = j.at("ell").get<u64>();
    c.n = j.at("n").get<unsigned>();
    c.level = j.at("level").get<u64>();
    c.value = j.at("value").get<u64>();
    c.exponent = j.at("exponent").get<u64>();
    c.order = j.at("order").get<u64>();
    return c;
}

json to_json(CandidateCertificate const & c)
{
    json mod = json::array();
    for (auto const & [q, i] : c.modulus)
        mod.push_back(json::array({q, i}));
    return json{{"d", big(c.d)},
                {"modulus", mod},
                {"modulus_text", c.modulus_text},
                {"group", c.group},
                {"target", vec(c.target)},
                {"ell", c.ell},
                {"n", c.n},
                {"h", c.h},
                {"h_K", c.h_K},
                {"p", c.p},
                {"r", c.r},
                {"p_K", c.p_K},
                {"eps", json{{"x", big(c.eps_x)}, {"y", big(c.eps_y)}}},
                {"chi_eps", to_json(c.chi_eps)},
                {"chi_minus_one", to_json(c.chi_minus_one)},
                {"checks", json{{"i_prime", c.checks[0]}, {"ii", c.checks[1]}, {"iii", c.checks[2]}, {"iv", c.checks[3]}}},
                {"bound", c.bound}};
}

CandidateCertificate certificate_from_json(json const & j)
{
    CandidateCertificate c;
    try {
        c.d = big_from(j.at("d"));
        for (auto const & e : j.at("modulus"))
            c.modulus.emplace_back(e.at(0).get<u64>(), e.at(1).get<int>());
        c.modulus_text = j.at("modulus_text").get<std::string>();
        c.group = j.at("group").get<std::string>();
        c.target = vec_from(j.at("target"));
        c.ell = j.at("ell").get<u64>();
        c.n = j.at("n").get<unsigned>();
        c.h = j.at("h").get<unsigned>();
        c.h_K = j.at("h_K").get<unsigned>();
        c.p = j.at("p").get<u64>();
        c.r = j.at("r").get<u64>();
        c.p_K = j.at("p_K").get<std::string>();
        c.eps_x = big_from(j.at("eps").at("x"));
        c.eps_y = big_from(j.at("eps").at("y"));
        c.chi_eps = character_from_json(j.at("chi_eps"));
        c.chi_minus_one = character_from_json(j.at("chi_minus_one"));
        auto const & ch = j.at("checks");
        c.checks = {ch.at("i_prime").get<bool>(), ch.at("ii").get<bool>(), ch.at("iii").get<bool>(),
                    ch.at("iv").get<bool>()};
        c.bound = j.at("bound").get<u64>();
    } catch (json::exception const & e) {
        throw std::invalid_argument(std::string("malformed certificate: ") + e.what());
    }
    return c;
}

json to_json(CyclicFieldDesc const & f)
{
    json poly = json::array();
    for (auto const & c : f.poly)
        poly.push_back(big(c));
    return json{{"p", f.p}, {"degree", f.degree}, {"poly", poly}, {"discriminant", big(f.discriminant)}};
}

json to_json(SearchStats const & s)
{
    return json{{"scanned", s.scanned}, {"rejected", s.rejected}};
}

json to_json(PowerHint const & h)
{
    return json{{"ell", h.ell},     {"h", h.h},         {"conductor", h.conductor},
                {"degree", h.degree}, {"field", h.field}, {"requirement", h.requirement}};
}

json certificate_file(SearchResult const & r)
{
    if (!r.cert)
        throw std::invalid_argument("search result carries no certificate");
    json cert = to_json(*r.cert);
    json body{{"certificate", cert},
              {"sha256", sha256_hex(canonical(cert))},
              {"stats", to_json(r.stats)},
              {"toolchain", toolchain_fingerprint()}};
    if (r.field)
        body["field"] = to_json(*r.field);
    return envelope("certificate", body);
}

CandidateCertificate read_certificate_file(json const & j)
{
    expect_kind(j, "certificate");
    json const & cert = j.at("certificate");
    if (j.value("sha256", "") != sha256_hex(canonical(cert)))
        throw std::invalid_argument("certificate hash stamp does not match its contents");
    return certificate_from_json(cert);
}

json to_json(VerificationReport const & r, BiquadField const * L)
{
    json j{{"status", to_string(r.status)},
           {"reason", r.reason},
           {"conditions_ok", r.conditions_ok},
           {"failed_condition", r.failed_condition},
           {"L", r.L},
           {"m_L", r.m_L}};
    if (!r.q_L.ideal.empty())
        j["q_L"] = verdict(r.q_L, L);
    if (!r.extended.ideal.empty())
        j["p_K_O_L"] = verdict(r.extended, L);
    return j;
}

json to_json(AmbigReport const & r)
{
    json j{{"L", r.L},
           {"K", r.K},
           {"m", r.m},
           {"cl_K_m", big(r.cl_K_m)},
           {"inf_degrees", r.inf_degrees},
           {"ram_e", r.ram_e},
           {"degree", r.degree},
           {"unit_index", big(r.unit_index)},
           {"formula", big(r.formula)},
           {"direct", big(r.direct)},
           {"equal", r.equal}};
    if (!r.error.empty())
        j["error"] = r.error;
    return j;
}

AmbigReport ambig_report_from_json(json const & j)
{
    AmbigReport r;
    r.L = j.at("L").get<std::string>();
    r.K = j.at("K").get<std::string>();
    r.m = j.at("m").get<std::string>();
    r.cl_K_m = big_from(j.at("cl_K_m"));
    r.inf_degrees = j.at("inf_degrees").get<std::vector<int>>();
    r.ram_e = j.at("ram_e").get<std::vector<int>>();
    r.degree = j.at("degree").get<int>();
    r.unit_index = big_from(j.at("unit_index"));
    r.formula = big_from(j.at("formula"));
    r.direct = big_from(j.at("direct"));
    r.equal = j.at("equal").get<bool>();
    r.error = j.value("error", "");
    return r;
}

} // namespace rcap
