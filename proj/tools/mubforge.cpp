// mubforge: construct and verify mutually unbiased bases, search finite
// groups for trivially intersecting abelian subgroup families, and build
// coset nets.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mubforge/mubforge.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct GroupSource {
    std::vector<int> factors;
    std::string table_path;
};

std::vector<int> parse_factor_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            int v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad factor list entry '" + item + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument("empty factor list");
    return out;
}

mubforge::FiniteGroup load_group(const GroupSource& src) {
    if (!src.factors.empty() && !src.table_path.empty()) {
        throw std::invalid_argument("give either --factors or --table, not both");
    }
    if (!src.factors.empty()) return mubforge::group_from_invariant_factors(src.factors);
    if (!src.table_path.empty()) {
        std::ifstream in(src.table_path);
        if (!in) throw std::invalid_argument("cannot open table file '" + src.table_path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return mubforge::group_from_table(buf.str());
    }
    throw std::invalid_argument("a group source is required: --factors or --table");
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw std::invalid_argument("failed writing output file '" + path + "'");
}

int run_construct(std::int64_t dim, std::uint64_t seed, double tol, double ortho_tol,
                  const std::string& out_path) {
    mubforge::MubCollection mc = mubforge::build_mubs_composite(dim, seed);
    mubforge::MubVerification v = mubforge::verify_mubs(mc, ortho_tol, tol);

    write_text_file(out_path, mubforge::mub_to_string(mc));

    mubforge::Report r = v.to_report();
    r.fact("seed", seed);
    r.fact("provenance", mc.provenance);
    for (auto [p, e] : mubforge::factorize(dim)) {
        r.fact("field", mubforge::make_field(p, e).to_string());
    }
    r.fact("out", out_path);
    std::cout << r.to_text();
    std::cout << "bases " << mc.bases.size() << "\n";
    return v.passed() ? kExitPass : kExitFail;
}

int run_verify(const std::string& path, double tol, double ortho_tol) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open MUB file '" + path + "'");
    mubforge::MubCollection mc = mubforge::read_mub_file(in);
    mubforge::MubVerification v = mubforge::verify_mubs(mc, ortho_tol, tol);
    mubforge::Report r = v.to_report();
    r.fact("seed", mc.seed);
    r.fact("file", path);
    std::cout << r.to_text();
    std::cout << "bases " << mc.bases.size() << "\n";
    return v.passed() ? kExitPass : kExitFail;
}

int run_search(const GroupSource& src, bool heuristic, bool normal_only,
               const std::string& out_path, std::uint64_t seed) {
    mubforge::FiniteGroup g = load_group(src);
    auto mode = heuristic ? mubforge::SearchMode::Heuristic : mubforge::SearchMode::Exhaustive;
    mubforge::FamilySearchResult result = mubforge::max_family_search(g, mode, normal_only);
    const auto& family = result.family;

    std::ostringstream os;
    os << "# report=search\n";
    os << "# seed=" << seed << "\n";
    os << "# order=" << g.order() << "\n";
    if (!g.label().empty()) os << "# label=" << g.label() << "\n";
    os << "# mode=" << (result.trace.exhaustive ? "exhaustive" : "heuristic") << "\n";
    os << "# normal_only=" << (normal_only ? 1 : 0) << "\n";
    os << "# subgroups_enumerated=" << result.trace.subgroups_enumerated << "\n";
    os << "# clique_nodes=" << result.trace.clique_nodes << "\n";
    os << "# family_size=" << family.members.size() << "\n";
    for (std::size_t i = 0; i < family.members.size(); ++i) {
        os << "A" << i << " = " << family.members[i].to_string() << "\n";
    }
    if (!result.trace.exhaustive) {
        os << "note: heuristic result, the family size is only a lower bound\n";
    }

    bool all_pass = true;
    auto append = [&](const mubforge::Report& r) {
        os << r.to_text();
        all_pass = all_pass && r.passed();
    };
    append(mubforge::check_bounds(g, family));

    long long d = 1;
    while (d * d < g.order()) ++d;
    if (family.members.size() >= 2) {
        append(mubforge::check_decompose(g, family.members[0], family.members[1]));
        for (int p : mubforge::prime_divisors(d)) {
            append(mubforge::check_reduce(g, family, p));
        }
    }
    append(mubforge::check_elementary_abelian(g, family));
    if (normal_only && family.members.size() > 2) {
        append(mubforge::check_normal_family(g, family));
    }

    // index-group bound comparison when G = H x H is recognizably abelian
    if (g.is_abelian()) {
        mubforge::Subgroup whole = mubforge::subgroup_generate(
            g, [&] {
                std::vector<int> all(g.order());
                for (int i = 0; i < g.order(); ++i) all[i] = i;
                return all;
            }());
        std::vector<long long> invariants = mubforge::abelian_invariant_factors(whole);
        // G = H x H iff every invariant factor appears an even number of times
        std::vector<long long> half;
        bool square_shape = true;
        for (std::size_t i = 0; i < invariants.size();) {
            if (i + 1 < invariants.size() && invariants[i] == invariants[i + 1]) {
                half.push_back(invariants[i]);
                i += 2;
            } else {
                square_shape = false;
                break;
            }
        }
        if (square_shape) {
            std::vector<long long> primary;
            for (long long f : half) {
                long long rest = f;
                for (long long p = 2; rest > 1; ++p) {
                    if (rest % p == 0) {
                        long long pp = 1;
                        while (rest % p == 0) {
                            rest /= p;
                            pp *= p;
                        }
                        primary.push_back(pp);
                    }
                }
            }
            long long bound = mubforge::abelian_bound(primary);
            os << "# abelian_bound=" << bound << "\n";
            os << (static_cast<long long>(family.members.size()) <= bound ? "PASS " : "FAIL ")
               << "family size <= abelian index-group bound " << bound << "\n";
            if (static_cast<long long>(family.members.size()) > bound) all_pass = false;
        } else {
            os << "# abelian_bound=skipped (G is not of the form H x H)\n";
        }
    }

    std::cout << os.str();
    if (!out_path.empty()) write_text_file(out_path, os.str());
    return all_pass ? kExitPass : kExitFail;
}

int run_net(const GroupSource& src, bool heuristic, const std::string& out_path,
            std::uint64_t seed) {
    mubforge::FiniteGroup g = load_group(src);
    auto mode = heuristic ? mubforge::SearchMode::Heuristic : mubforge::SearchMode::Exhaustive;
    mubforge::FamilySearchResult result = mubforge::max_family_search(g, mode, false);
    if (result.family.members.empty()) {
        throw std::invalid_argument("no order-sqrt(|G|) abelian subgroup exists; no net to build");
    }
    mubforge::Net net = mubforge::net_from_subgroups(g, result.family);

    mubforge::Report r = mubforge::verify_net(net);
    r.fact("seed", seed);
    r.fact("affine_plane", mubforge::is_affine_plane(net) ? 1 : 0);
    if (!out_path.empty()) {
        write_text_file(out_path, mubforge::net_to_string(net));
        r.fact("out", out_path);
    }
    std::cout << r.to_text();
    std::cout << "net (" << net.d << "," << net.k << ")"
              << (mubforge::is_affine_plane(net) ? " affine plane" : "") << "\n";
    return r.passed() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nice error bases, mutually unbiased bases, subgroup families, and nets"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::uint64_t seed = 0;
    double tol = 1e-8;
    double ortho_tol = 1e-10;
    app.add_option("--seed", seed, "seed for the randomized eigenbasis step")
        ->capture_default_str();
    app.add_option("--tol", tol, "unbiasedness tolerance")->capture_default_str();
    app.add_option("--ortho-tol", ortho_tol, "orthonormality tolerance")->capture_default_str();

    auto* construct = app.add_subcommand("construct", "build N(d) MUBs of dimension d");
    std::int64_t dim = 0;
    std::string out_path;
    construct->add_option("--dim", dim, "dimension d >= 2")->required();
    construct->add_option("--out", out_path, "output MUB file")->required();

    auto* verify = app.add_subcommand("verify", "verify a MUB file");
    std::string mub_path;
    verify->add_option("file", mub_path, "MUB file to verify")->required();

    std::string factors_text;
    std::string table_path;
    bool exhaustive = false;
    bool heuristic = false;
    bool normal_only = false;
    auto* search = app.add_subcommand("search", "maximum trivially intersecting abelian family");
    search->add_option("--factors", factors_text, "cyclic factors of G, e.g. 6,6");
    search->add_option("--table", table_path, "group multiplication table file");
    search->add_flag("--exhaustive", exhaustive, "exhaustive search (default)");
    search->add_flag("--heuristic", heuristic, "greedy non-exhaustive search");
    search->add_flag("--normal-only", normal_only, "restrict to normal subgroups");
    std::string search_out;
    search->add_option("--out", search_out, "also write the report to a file");

    auto* net = app.add_subcommand("net", "build the coset net of a maximum family");
    std::string net_factors_text;
    std::string net_table_path;
    bool net_exhaustive = false;
    bool net_heuristic = false;
    std::string net_out;
    net->add_option("--factors", net_factors_text, "cyclic factors of G, e.g. 3,3");
    net->add_option("--table", net_table_path, "group multiplication table file");
    net->add_flag("--exhaustive", net_exhaustive, "exhaustive family search (default)");
    net->add_flag("--heuristic", net_heuristic, "greedy non-exhaustive family search");
    net->add_option("--out", net_out, "output net file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (construct->parsed()) {
            if (dim < 2) throw std::invalid_argument("dimension must be >= 2");
            return run_construct(dim, seed, tol, ortho_tol, out_path);
        }
        if (verify->parsed()) {
            return run_verify(mub_path, tol, ortho_tol);
        }
        if (search->parsed()) {
            if (exhaustive && heuristic) {
                throw std::invalid_argument("--exhaustive and --heuristic are exclusive");
            }
            GroupSource src;
            if (!factors_text.empty()) src.factors = parse_factor_list(factors_text);
            src.table_path = table_path;
            return run_search(src, heuristic, normal_only, search_out, seed);
        }
        if (net->parsed()) {
            if (net_exhaustive && net_heuristic) {
                throw std::invalid_argument("--exhaustive and --heuristic are exclusive");
            }
            GroupSource src;
            if (!net_factors_text.empty()) src.factors = parse_factor_list(net_factors_text);
            src.table_path = net_table_path;
            return run_net(src, net_heuristic, net_out, seed);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
