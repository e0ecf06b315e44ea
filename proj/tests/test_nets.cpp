#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <set>
#include <sstream>

#include "mubforge/nets.hpp"

using namespace mubforge;

namespace {

FiniteGroup symmetric_group_3() {
    std::vector<std::array<int, 3>> perms{{0, 1, 2}, {1, 0, 2}, {0, 2, 1},
                                          {2, 1, 0}, {1, 2, 0}, {2, 0, 1}};
    auto compose = [&](int a, int b) {
        std::array<int, 3> c{};
        for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];
        for (int k = 0; k < 6; ++k) {
            if (perms[k] == c) return k;
        }
        return -1;
    };
    std::vector<int> table(36);
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) table[a * 6 + b] = compose(a, b);
    }
    return FiniteGroup::from_table(6, std::move(table));
}

FiniteGroup direct_square(const FiniteGroup& h) {
    int m = h.order();
    int n = m * m;
    std::vector<int> table(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            int left = h.mult(a % m, b % m);
            int right = h.mult(a / m, b / m);
            table[static_cast<std::size_t>(a) * n + b] = right * m + left;
        }
    }
    return FiniteGroup::from_table(n, std::move(table));
}

}  // namespace

TEST_CASE("coset net of the Klein four-group family is the (2,3) affine plane") {
    FiniteGroup g = group_from_invariant_factors({2, 2});
    Net net = net_from_subgroups(g, max_family_search(g).family);
    CHECK(net.d == 2);
    CHECK(net.k == 3);
    CHECK(net.point_count == 4);
    int blocks = 0;
    for (const auto& cls : net.classes) blocks += static_cast<int>(cls.size());
    CHECK(blocks == 6);
    CHECK(verify_net(net).passed());
    CHECK(is_affine_plane(net));
}

TEST_CASE("a single subgroup gives a (d,1)-net") {
    FiniteGroup g = group_from_invariant_factors({4});
    SubgroupFamily fam{g, {subgroup_generate(g, {2})}};
    Net net = net_from_subgroups(g, fam);
    CHECK(net.k == 1);
    CHECK(verify_net(net).passed());
    CHECK_FALSE(is_affine_plane(net));
}

TEST_CASE("Z_3 x Z_3 gives a (3,4)-net whose non-parallel blocks meet once") {
    FiniteGroup g = group_from_invariant_factors({3, 3});
    Net net = net_from_subgroups(g, max_family_search(g).family);
    REQUIRE(net.d == 3);
    REQUIRE(net.k == 4);
    int blocks = 0;
    for (const auto& cls : net.classes) blocks += static_cast<int>(cls.size());
    CHECK(blocks == 12);
    // independent pairwise-intersection oracle
    for (std::size_t c1 = 0; c1 < net.classes.size(); ++c1) {
        for (std::size_t c2 = c1 + 1; c2 < net.classes.size(); ++c2) {
            for (const auto& b1 : net.classes[c1]) {
                for (const auto& b2 : net.classes[c2]) {
                    std::set<int> s1(b1.begin(), b1.end());
                    int common = 0;
                    for (int pt : b2) common += s1.count(pt);
                    REQUIRE(common == 1);
                }
            }
        }
    }
    CHECK(is_affine_plane(net));
}

TEST_CASE("Z_6 x Z_6 gives a (6,3)-net that is not an affine plane") {
    FiniteGroup g = group_from_invariant_factors({6, 6});
    Net net = net_from_subgroups(g, max_family_search(g).family);
    CHECK(net.d == 6);
    CHECK(net.k == 3);
    CHECK(verify_net(net).passed());
    CHECK_FALSE(is_affine_plane(net));
}

TEST_CASE("the net construction does not require abelian subgroups") {
    // S_3 x S_3 with the two factors and the diagonal: three nonabelian
    // order-6 subgroups intersecting trivially
    FiniteGroup s3 = symmetric_group_3();
    FiniteGroup g = direct_square(s3);
    Subgroup left = subgroup_generate(g, {1, 4});          // S_3 x {e}
    Subgroup right = subgroup_generate(g, {6, 24});        // {e} x S_3
    Subgroup diag = subgroup_generate(g, {1 * 6 + 1, 4 * 6 + 4});
    REQUIRE(left.size() == 6);
    REQUIRE(right.size() == 6);
    REQUIRE(diag.size() == 6);
    REQUIRE_FALSE(left.is_abelian());
    SubgroupFamily fam{g, {left, right, diag}};
    Net net = net_from_subgroups(g, fam);
    CHECK(net.d == 6);
    CHECK(net.k == 3);
    CHECK(verify_net(net).passed());
}

TEST_CASE("verify_net flags corrupted nets") {
    FiniteGroup g = group_from_invariant_factors({2, 2});
    Net net = net_from_subgroups(g, max_family_search(g).family);

    SECTION("moving a point between blocks breaks the partition") {
        Net bad = net;
        bad.classes[0][0][1] = bad.classes[0][1][1];  // duplicate a point in class 0
        Report r = verify_net(bad);
        CHECK_FALSE(r.passed());
        bool partition_failed = false;
        for (const auto& [label, ok] : r.checks()) {
            if (!ok && label.find("partitions") != std::string::npos) partition_failed = true;
        }
        CHECK(partition_failed);
    }
    SECTION("duplicating a parallel class breaks the intersection count") {
        Net bad = net;
        bad.classes[1] = bad.classes[0];
        Report r = verify_net(bad);
        CHECK_FALSE(r.passed());
        bool meet_failed = false;
        for (const auto& [label, ok] : r.checks()) {
            if (!ok && label.find("meet") != std::string::npos) meet_failed = true;
        }
        CHECK(meet_failed);
    }
}

TEST_CASE("net file round-trip") {
    FiniteGroup g = group_from_invariant_factors({3, 3});
    Net net = net_from_subgroups(g, max_family_search(g).family);
    std::string text = net_to_string(net);
    std::istringstream in(text);
    Net back = read_net_file(in);
    CHECK(net_to_string(back) == text);
    CHECK(verify_net(back).passed());

    SECTION("lambda != 1 is rejected at parse time") {
        std::istringstream bad("NET v1 d=2 k=1 lambda=2\nclass 0\n0 1\n2 3\n");
        CHECK_THROWS_WITH(read_net_file(bad), Catch::Matchers::ContainsSubstring("lambda"));
    }
    SECTION("malformed files name the offending line") {
        std::istringstream bad("NET v1 d=2 k=1\nclass 0\n0 1 2\n2 3\n");
        CHECK_THROWS_WITH(read_net_file(bad), Catch::Matchers::ContainsSubstring("line 3"));
    }
}
