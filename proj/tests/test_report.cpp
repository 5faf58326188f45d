#include <fstream>
#include "doctest.h"

#include <filesystem>

#include "rcap/cache.hpp"

using namespace rcap;

namespace {

SearchResult search_34()
{
    auto K = make_quadratic(34);
    auto R = ray_class_group(K, Modulus{});
    SearchParams P;
    P.h = 0;
    P.h_override = true;
    P.bound = 1000;
    finalize_params(K, P);
    auto ctx = make_context(K, R, select_target(R.group, "auto-2"), aug_unit_mod_m(K, Modulus{}), P);
    return find_principalizing_prime(ctx);
}

} // namespace

TEST_CASE("sha256 known answers")
{
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("certificate round trip")
{
    auto res = search_34();
    REQUIRE(res.cert);
    json file = certificate_file(res);
    CHECK(file["schema"] == "rc-1");
    CHECK(file["kind"] == "certificate");
    /* parse -> emit -> parse */
    json again = json::parse(canonical(file));
    CHECK(canonical(again) == canonical(file));
    auto c = read_certificate_file(again);
    CHECK(canonical(to_json(c)) == canonical(file["certificate"]));
    CHECK(c.p == res.cert->p);
    CHECK(c.eps_x == res.cert->eps_x);
    /* tampering breaks the hash stamp */
    json bad = file;
    bad["certificate"]["p"] = 13;
    CHECK_THROWS_AS(read_certificate_file(bad), std::invalid_argument);
    json wrong = file;
    wrong["schema"] = "rc-0";
    CHECK_THROWS(read_certificate_file(wrong));
}

TEST_CASE("ambig report round trip")
{
    auto r = ambig_report(quadratic_case(-20, 3));
    json j = to_json(r);
    auto back = ambig_report_from_json(json::parse(canonical(j)));
    CHECK(canonical(to_json(back)) == canonical(j));
}

TEST_CASE("result cache")
{
    auto dir = std::filesystem::temp_directory_path() / "rcap_cache_test";
    std::filesystem::remove_all(dir);
    ResultCache cache(dir);
    json key{{"op", "x"}, {"d", "34"}};
    CHECK(!cache.get(key));
    cache.put(key, json{{"v", 1}});
    auto hit = cache.get(key);
    REQUIRE(hit);
    CHECK((*hit)["v"] == 1);
    CHECK(std::filesystem::exists(cache.path_of(key)));
    /* overwrite is atomic and leaves no temporaries */
    cache.put(key, json{{"v", 2}});
    CHECK((*cache.get(key))["v"] == 2);
    size_t files = 0;
    for (auto const & e : std::filesystem::recursive_directory_iterator(dir))
        files += e.is_regular_file();
    CHECK(files == 1);
    /* a corrupt entry is a miss */
    {
        std::ofstream f(cache.path_of(key));
        f << "{not json";
    }
    CHECK(!cache.get(key));
    CHECK(!ResultCache().enabled());
    std::filesystem::remove_all(dir);
}
