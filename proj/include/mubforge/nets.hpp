#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mubforge/groups.hpp"
#include "mubforge/report.hpp"

namespace mubforge {

/// (d,k)-net with lambda = 1: d^2 points, k parallel classes of d disjoint
/// blocks of size d; blocks from different classes meet in exactly one
/// point. Blocks are sorted index lists; classes are sorted by their
/// minimal block.
struct Net {
    int d = 0;
    int k = 0;
    int lambda = 1;
    int point_count = 0;
    std::vector<std::vector<std::vector<int>>> classes;  // classes[c][b] = sorted block
};

/// Exhaustive check of the net axioms; reports the first violation found
/// in each category.
inline Report verify_net(const Net& net) {
    Report r("net");
    r.fact("d", net.d);
    r.fact("k", net.k);
    r.fact("lambda", net.lambda);
    r.fact("points", net.point_count);

    bool shape_ok = net.lambda == 1 && net.point_count == net.d * net.d &&
                    static_cast<int>(net.classes.size()) == net.k;
    std::string shape_note;
    for (const auto& cls : net.classes) {
        if (static_cast<int>(cls.size()) != net.d) {
            shape_ok = false;
            shape_note = "; a class has " + std::to_string(cls.size()) + " blocks";
        }
        for (const auto& block : cls) {
            if (static_cast<int>(block.size()) != net.lambda * net.d) {
                shape_ok = false;
                shape_note = "; a block has " + std::to_string(block.size()) + " points";
            }
        }
    }
    r.check("shape: k classes of d blocks of size lambda*d" + shape_note, shape_ok);

    bool partition_ok = true;
    std::string partition_note;
    for (std::size_t c = 0; c < net.classes.size() && partition_ok; ++c) {
        std::vector<int> seen(net.point_count, 0);
        for (const auto& block : net.classes[c]) {
            for (int pt : block) {
                if (pt < 0 || pt >= net.point_count || seen[pt]) {
                    partition_ok = false;
                    partition_note = ": class " + std::to_string(c) +
                                     (pt >= 0 && pt < net.point_count
                                          ? " covers point " + std::to_string(pt) + " twice"
                                          : " has point " + std::to_string(pt) + " out of range");
                    break;
                }
                seen[pt] = 1;
            }
            if (!partition_ok) break;
        }
        if (partition_ok) {
            for (int pt = 0; pt < net.point_count; ++pt) {
                if (!seen[pt]) {
                    partition_ok = false;
                    partition_note = ": class " + std::to_string(c) + " misses point " +
                                     std::to_string(pt);
                    break;
                }
            }
        }
    }
    r.check("every parallel class partitions the point set" + partition_note, partition_ok);

    bool meet_ok = true;
    std::string meet_note;
    for (std::size_t c1 = 0; c1 < net.classes.size() && meet_ok; ++c1) {
        for (std::size_t c2 = c1 + 1; c2 < net.classes.size() && meet_ok; ++c2) {
            for (std::size_t b1 = 0; b1 < net.classes[c1].size() && meet_ok; ++b1) {
                for (std::size_t b2 = 0; b2 < net.classes[c2].size(); ++b2) {
                    const auto& x = net.classes[c1][b1];
                    const auto& y = net.classes[c2][b2];
                    std::size_t i = 0, j = 0;
                    int common = 0;
                    while (i < x.size() && j < y.size()) {
                        if (x[i] < y[j]) {
                            ++i;
                        } else if (x[i] > y[j]) {
                            ++j;
                        } else {
                            ++common;
                            ++i;
                            ++j;
                        }
                    }
                    if (common != net.lambda) {
                        meet_ok = false;
                        meet_note = ": classes " + std::to_string(c1) + "/" + std::to_string(c2) +
                                    " blocks " + std::to_string(b1) + "/" + std::to_string(b2) +
                                    " share " + std::to_string(common) + " points";
                        break;
                    }
                }
            }
        }
    }
    r.check("non-parallel blocks meet in exactly lambda points" + meet_note, meet_ok);
    return r;
}

/// Left-coset net of a trivially intersecting subgroup family. Members
/// need not be abelian. A violation of the net axioms here is a
/// construction bug and throws.
inline Net net_from_subgroups(const FiniteGroup& g, const SubgroupFamily& family) {
    validate_family(g, family.members, /*require_abelian=*/false);
    if (family.members.empty()) throw std::invalid_argument("family must be nonempty");
    long long d = 1;
    while (d * d < g.order()) ++d;

    Net net;
    net.d = static_cast<int>(d);
    net.k = static_cast<int>(family.members.size());
    net.point_count = g.order();
    for (const Subgroup& a : family.members) {
        std::vector<std::vector<int>> blocks;
        std::vector<char> covered(g.order(), 0);
        for (int x = 0; x < g.order(); ++x) {
            if (covered[x]) continue;
            std::vector<int> block;
            block.reserve(a.size());
            for (int h : a.elements()) {
                int v = g.mult(x, h);
                covered[v] = 1;
                block.push_back(v);
            }
            std::sort(block.begin(), block.end());
            blocks.push_back(std::move(block));
        }
        std::sort(blocks.begin(), blocks.end());
        net.classes.push_back(std::move(blocks));
    }
    std::sort(net.classes.begin(), net.classes.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    Report check = verify_net(net);
    if (!check.passed()) {
        throw std::runtime_error("coset net construction bug:\n" + check.to_text());
    }
    return net;
}

/// A (d, d+1)-net is an affine plane.
inline bool is_affine_plane(const Net& net) { return net.k == net.d + 1; }

// -------------------------------------------------------------------------
// Net file format: "NET v1 d=<d> k=<k>", then per class a "class <i>" line
// followed by d lines of space-separated point indices.

inline void write_net_file(std::ostream& os, const Net& net) {
    os << "NET v1 d=" << net.d << " k=" << net.k << "\n";
    for (std::size_t c = 0; c < net.classes.size(); ++c) {
        os << "class " << c << "\n";
        for (const auto& block : net.classes[c]) {
            for (std::size_t i = 0; i < block.size(); ++i) {
                if (i) os << ' ';
                os << block[i];
            }
            os << "\n";
        }
    }
}

inline std::string net_to_string(const Net& net) {
    std::ostringstream os;
    write_net_file(os, net);
    return os.str();
}

inline Net read_net_file(std::istream& is) {
    auto fail = [](int line_no, const std::string& why) {
        throw std::invalid_argument("net file parse error at line " + std::to_string(line_no) +
                                    ": " + why);
    };
    std::string line;
    int line_no = 0;
    if (!std::getline(is, line)) fail(1, "missing header");
    ++line_no;
    Net net;
    {
        int d = 0, k = 0;
        long long lambda = 1;
        if (std::sscanf(line.c_str(), "NET v1 d=%d k=%d lambda=%lld", &d, &k, &lambda) >= 2) {
            if (lambda != 1) fail(line_no, "only lambda = 1 nets are supported");
            if (d < 1 || k < 1) fail(line_no, "d and k must be positive");
            net.d = d;
            net.k = k;
        } else {
            fail(line_no, "expected 'NET v1 d=<d> k=<k>'");
        }
    }
    net.point_count = net.d * net.d;
    for (int c = 0; c < net.k; ++c) {
        if (!std::getline(is, line)) fail(line_no + 1, "missing 'class' marker");
        ++line_no;
        int idx = -1;
        if (std::sscanf(line.c_str(), "class %d", &idx) != 1 || idx != c) {
            fail(line_no, "expected 'class " + std::to_string(c) + "'");
        }
        std::vector<std::vector<int>> blocks;
        for (int b = 0; b < net.d; ++b) {
            if (!std::getline(is, line)) fail(line_no + 1, "missing block row");
            ++line_no;
            std::istringstream row(line);
            std::vector<int> block;
            int v;
            while (row >> v) block.push_back(v);
            if (static_cast<int>(block.size()) != net.d) {
                fail(line_no, "block has " + std::to_string(block.size()) + " points, expected " +
                                  std::to_string(net.d));
            }
            blocks.push_back(std::move(block));
        }
        net.classes.push_back(std::move(blocks));
    }
    return net;
}

}  // namespace mubforge
