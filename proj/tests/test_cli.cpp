#include <fstream>
#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "rcap/report.hpp"

using namespace rcap;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream o, e;
    int code = cli::run(args, o, e);
    return {code, o.str(), e.str()};
}

json last_json(std::string const & s)
{
    std::istringstream in(s);
    std::string line, last;
    while (std::getline(in, line))
        if (!line.empty())
            last = line;
    return json::parse(last);
}

} // namespace

TEST_CASE("rayclass examples")
{
    auto q = run({"--json", "rayclass", "--field", "Q", "--mod", "5"});
    CHECK(q.code == 0);
    CHECK(last_json(q.out)["group"]["text"] == "Z/2");
    auto i = run({"rayclass", "--d", "-1", "--mod", "3", "--json"});
    CHECK(i.code == 0);
    auto ij = last_json(i.out);
    CHECK(ij["group"]["invariants"] == json::array({"2"}));
    CHECK(ij["order_identity"] == true);
    auto t = run({"--json", "rayclass", "--d", "2", "--mod", "1"});
    CHECK(last_json(t.out)["group"]["order"] == "1");
    CHECK(run({"rayclass", "--d", "4"}).code == 2);
    CHECK(run({"rayclass", "--d", "-1", "--mod", "9"}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    auto text = run({"rayclass", "--d", "-5"});
    CHECK(text.out.find("Cl^m_K = Z/2") != std::string::npos);
}

TEST_CASE("search, verify and exit codes")
{
    auto dir = std::filesystem::temp_directory_path() / "rcap_cli_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::string cert = (dir / "c34.json").string();
    auto s = run({"--json", "search", "--d", "34", "--mod", "1", "--class", "auto-2", "--l", "2", "--n", "1", "--h", "0",
                  "--bound", "1000000", "--out", cert});
    REQUIRE(s.code == 0);
    CHECK(last_json(s.out)["certificate"]["p"] == 5);
    /* default h = h_K = 2 is not below n = 1 */
    auto bad_h = run({"search", "--d", "34", "--n", "1"});
    CHECK(bad_h.code == 2);
    CHECK(bad_h.err.find("--h") != std::string::npos);
    CHECK(run({"search", "--d", "34", "--n", "1", "--h", "0", "--bound", "4"}).code == 3);
    CHECK(run({"search", "--d", "34", "--n", "3", "--bound", "1000"}).code == 4);
    CHECK(run({"search", "--d", "-5", "--n", "1", "--h", "0"}).code == 2);
    CHECK(run({"search", "--d", "34", "--n", "1", "--h", "0", "--class", "identity", "--bound", "100000"}).code == 3);

    auto v = run({"--json", "verify", cert});
    CHECK(v.code == 0);
    auto vj = last_json(v.out);
    CHECK(vj["report"]["status"] == "success");
    CHECK(vj["report"]["p_K_O_L"]["ray_principal"] == true);
    CHECK(vj["hash_ok"] == true);

    /* tampered p: re-check fails */
    json file = json::parse(std::ifstream(cert));
    file["certificate"]["p"] = 13;
    std::string bad = (dir / "bad.json").string();
    std::ofstream(bad) << file.dump();
    auto vb = run({"--json", "verify", bad});
    CHECK(vb.code == 5);
    CHECK(last_json(vb.out)["report"]["conditions_ok"] == false);

    /* an l^n = 3 certificate is reported as unverified composite */
    std::string c4 = (dir / "c3.json").string();
    auto s4 = run({"search", "--d", "79", "--l", "3", "--n", "1", "--h", "0", "--class", "auto-3", "--out", c4});
    REQUIRE(s4.code == 0);
    CHECK(run({"verify", c4}).code == 7);
    CHECK(run({"verify", (dir / "missing.json").string()}).code == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("ambig subcommand")
{
    auto a = run({"--json", "ambig", "--L-disc", "-20", "--mod", "3"});
    CHECK(a.code == 0);
    CHECK(last_json(a.out)["equal"] == true);
    auto b = run({"ambig", "--L-disc", "8", "--mod", "1"});
    CHECK(b.code == 0);
    CHECK(b.out.find("formula 1, direct 1") != std::string::npos);
    CHECK(run({"ambig", "--L-disc", "-20", "--mod", "5"}).code == 2);
    CHECK(run({"ambig"}).code == 2);
    CHECK(run({"ambig", "--biquad", "34,5", "--json"}).code == 0);
}

TEST_CASE("cache hits reproduce cold output")
{
    auto dir = std::filesystem::temp_directory_path() / "rcap_cli_cache";
    std::filesystem::remove_all(dir);
    std::vector<std::vector<std::string>> cmds{
        {"--json", "--cache-dir", dir.string(), "rayclass", "--d", "-23", "--mod", "7"},
        {"--json", "--cache-dir", dir.string(), "search", "--d", "34", "--n", "1", "--h", "0", "--bound", "1000"},
        {"--json", "--cache-dir", dir.string(), "ambig", "--sweep", "degenerate"},
    };
    for (auto const & c : cmds) {
        auto cold = run(c);
        auto warm = run(c);
        CHECK(cold.code == warm.code);
        CHECK(cold.out == warm.out);
    }
    CHECK(!std::filesystem::is_empty(dir));
    std::filesystem::remove_all(dir);
}

TEST_CASE("selftest")
{
    auto s = run({"--json", "--seed", "7", "selftest"});
    CHECK(s.code == 0);
    CHECK(last_json(s.out)["ok"] == true);
}
