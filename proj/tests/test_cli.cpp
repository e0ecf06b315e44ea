#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mubforge/mub.hpp"
#include "mubforge/nets.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(MUBFORGE_BIN_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult res;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) res.output.append(buf, n);
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

fs::path temp_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "mubforge_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("construct writes a verifiable MUB file and reports the basis count") {
    fs::path out = temp_dir() / "d5.mub";
    CliResult res = run_cli("construct --dim 5 --out " + out.string());
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("bases 6") != std::string::npos);
    CHECK(res.output.find("PASS") != std::string::npos);

    std::ifstream in(out);
    mubforge::MubCollection mc = mubforge::read_mub_file(in);
    CHECK(mc.dim == 5);
    CHECK(mc.bases.size() == 6);
    CHECK(mubforge::verify_mubs(mc).passed());
}

TEST_CASE("construct handles composite dimensions") {
    fs::path out = temp_dir() / "d6.mub";
    CliResult res = run_cli("construct --dim 6 --out " + out.string());
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("bases 3") != std::string::npos);
}

TEST_CASE("construct rejects d = 1 with a usage error") {
    CliResult res = run_cli("construct --dim 1 --out " + (temp_dir() / "d1.mub").string());
    CHECK(res.exit_code == 2);
}

TEST_CASE("verify round-trips a fresh construction") {
    fs::path out = temp_dir() / "d4.mub";
    REQUIRE(run_cli("construct --dim 4 --out " + out.string()).exit_code == 0);

    SECTION("fresh file passes") {
        CliResult res = run_cli("verify " + out.string());
        CHECK(res.exit_code == 0);
        CHECK(res.output.find("bases 5") != std::string::npos);
    }
    SECTION("a zeroed vector fails verification with exit 1") {
        std::ifstream in(out);
        mubforge::MubCollection mc = mubforge::read_mub_file(in);
        mc.bases[0].vectors[0].assign(4, 0.0);
        fs::path bad = temp_dir() / "d4_bad.mub";
        std::ofstream os(bad, std::ios::binary);
        mubforge::write_mub_file(os, mc);
        os.close();
        CliResult res = run_cli("verify " + bad.string());
        CHECK(res.exit_code == 1);
        CHECK(res.output.find("FAIL") != std::string::npos);
    }
    SECTION("a malformed file is a parse error with exit 2 and a line number") {
        fs::path bad = temp_dir() / "garbage.mub";
        std::ofstream os(bad);
        os << "MUB v1 dim=2 bases=1 seed=0\nbasis 0\n1:0 broken\n0:0 1:0\n";
        os.close();
        CliResult res = run_cli("verify " + bad.string());
        CHECK(res.exit_code == 2);
        CHECK(res.output.find("line") != std::string::npos);
    }
    SECTION("--tol tightens the unbiasedness check") {
        CliResult res = run_cli("verify " + out.string() + " --tol 1e-18");
        CHECK(res.exit_code == 1);
        CliResult loose = run_cli("verify " + out.string() + " --tol 1e-6");
        CHECK(loose.exit_code == 0);
    }
}

TEST_CASE("construct is deterministic: identical flags, identical bytes") {
    fs::path a = temp_dir() / "det_a.mub";
    fs::path b = temp_dir() / "det_b.mub";
    REQUIRE(run_cli("construct --dim 4 --seed 7 --out " + a.string()).exit_code == 0);
    REQUIRE(run_cli("construct --dim 4 --seed 7 --out " + b.string()).exit_code == 0);
    CHECK(slurp(a) == slurp(b));

    SECTION("MUBFORGE_THREADS does not change the bytes") {
        fs::path c = temp_dir() / "det_c.mub";
        std::string cmd = "MUBFORGE_THREADS=1 " + std::string(MUBFORGE_BIN_PATH) +
                          " construct --dim 4 --seed 7 --out " + c.string() + " >/dev/null 2>&1";
        REQUIRE(std::system(cmd.c_str()) == 0);
        CHECK(slurp(c) == slurp(a));
    }
}

TEST_CASE("search reports the family and bound checks") {
    SECTION("Z_6 x Z_6 has a maximum family of size 3") {
        CliResult res = run_cli("search --factors 6,6");
        CHECK(res.exit_code == 0);
        CHECK(res.output.find("family_size=3") != std::string::npos);
        CHECK(res.output.find("abelian_bound=3") != std::string::npos);
        CHECK(res.output.find("FAIL") == std::string::npos);
    }
    SECTION("Z_2^4 has a maximum family of size 5") {
        CliResult res = run_cli("search --factors 2,2,2,2");
        CHECK(res.exit_code == 0);
        CHECK(res.output.find("family_size=5") != std::string::npos);
    }
    SECTION("non-square order is rejected") {
        fs::path tbl = temp_dir() / "q8.tbl";
        {
            // Z_8 stands in for any non-square order-8 table
            std::ofstream os(tbl);
            os << "GROUP v1 order=8\n";
            for (int a = 0; a < 8; ++a) {
                for (int b = 0; b < 8; ++b) os << ((a + b) % 8) << (b + 1 < 8 ? " " : "\n");
            }
        }
        CliResult res = run_cli("search --table " + tbl.string());
        CHECK(res.exit_code == 2);
        CHECK(res.output.find("perfect square") != std::string::npos);
    }
    SECTION("exhaustive ceiling advises the heuristic flag") {
        CliResult res = run_cli("search --factors 38,38");
        CHECK(res.exit_code == 2);
        CHECK(res.output.find("heuristic") != std::string::npos);
        CliResult heur = run_cli("search --factors 38,38 --heuristic");
        CHECK(heur.exit_code == 0);
        CHECK(heur.output.find("mode=heuristic") != std::string::npos);
    }
    SECTION("search can write its report to a file") {
        fs::path rep = temp_dir() / "search.txt";
        CliResult res = run_cli("search --factors 3,3 --out " + rep.string());
        CHECK(res.exit_code == 0);
        CHECK(slurp(rep) == res.output);
    }
}

TEST_CASE("net subcommand") {
    SECTION("Z_3 x Z_3 yields the (3,4) affine plane") {
        fs::path out = temp_dir() / "z33.net";
        CliResult res = run_cli("net --factors 3,3 --out " + out.string());
        CHECK(res.exit_code == 0);
        CHECK(res.output.find("net (3,4) affine plane") != std::string::npos);
        std::ifstream in(out);
        mubforge::Net net = mubforge::read_net_file(in);
        CHECK(mubforge::verify_net(net).passed());
    }
    SECTION("Z_6 x Z_6 yields a (6,3)-net that is not a plane") {
        CliResult res = run_cli("net --factors 6,6");
        CHECK(res.exit_code == 0);
        CHECK(res.output.find("net (6,3)") != std::string::npos);
        CHECK(res.output.find("affine plane") == std::string::npos);
    }
    SECTION("Z_2 x Z_2 yields the (2,3) affine plane") {
        CliResult res = run_cli("net --factors 2,2");
        CHECK(res.exit_code == 0);
        CHECK(res.output.find("net (2,3) affine plane") != std::string::npos);
    }
}

TEST_CASE("unknown flags and missing subcommands are usage errors") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("construct --dim 4").exit_code == 2);       // missing --out
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("search").exit_code == 2);                  // no group source
}
