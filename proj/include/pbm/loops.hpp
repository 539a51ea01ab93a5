/// @file loops.hpp
/// Signed causal dependency graph of the model and feedback-loop analysis:
/// elementary circuit enumeration (Johnson's algorithm) and verification of
/// the five named loops.

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace pbm {

struct SignedEdge {
    std::string from;
    std::string to;
    int polarity = +1;       ///< +1 or -1
    std::string provenance;  ///< defining relation this edge comes from
};

struct SignedDigraph {
    std::vector<std::string> nodes;
    std::vector<SignedEdge> edges;

    int node_index(const std::string& name) const {
        auto it = std::find(nodes.begin(), nodes.end(), name);
        return it == nodes.end() ? -1 : static_cast<int>(it - nodes.begin());
    }

    const SignedEdge* find_edge(const std::string& from, const std::string& to) const {
        for (const auto& e : edges) {
            if (e.from == from && e.to == to) return &e;
        }
        return nullptr;
    }
};

struct FeedbackLoop {
    std::vector<std::string> cycle;  ///< node names, first node not repeated
    int polarity = +1;               ///< +1 reinforcing, -1 balancing
    std::string name;                ///< label when it matches a named loop
};

/// Signed dependency graph derived from the defining formulas, one node per
/// model symbol and one edge per argument. The avoidance probability F
/// appears as a node but the bandit/peasant influence on appropriations is
/// carried by direct edges, matching the loop structure of the model.
inline SignedDigraph build_causal_graph() {
    SignedDigraph g;
    g.nodes = {
        "Peasants", "Bandits", "Mafia", "Y", "F", "pi", "R_B", "T_B", "I_B",
        "i_B", "ihat_B", "T_P", "I_P", "i_P", "ihat_P", "attractiveness",
        "B_star", "bandit_recruitment", "W", "L", "l", "p_M", "D_M",
        "mafia_recruitment", "lambda_M", "m_B", "lambda_A",
    };
    auto add = [&g](const std::string& from, const std::string& to, int pol,
                    const std::string& why) {
        g.edges.push_back({from, to, pol, why});
    };
    add("Peasants", "Y", +1, "Y = a_P*P");
    add("Bandits", "F", -1, "F = 1/(1 + theta_B*B/P)");
    add("Peasants", "F", +1, "F = 1/(1 + theta_B*B/P)");
    add("lambda_A", "pi", -1, "pi = (1-lambda_A)(1-lambda_M)");
    add("lambda_M", "pi", -1, "pi = (1-lambda_A)(1-lambda_M)");
    add("pi", "R_B", +1, "R_B = pi*(1-F)*Y");
    add("Y", "R_B", +1, "R_B = pi*(1-F)*Y");
    add("Bandits", "R_B", +1, "R_B = pi*(1-F)*Y, via F");
    add("Peasants", "R_B", -1, "R_B = pi*(1-F)*Y, via F");
    add("R_B", "T_B", +1, "T_B = tbar_M*lambda_M*R_B");
    add("lambda_M", "T_B", +1, "T_B = tbar_M*lambda_M*R_B");
    add("R_B", "I_B", +1, "I_B = R_B - T_B");
    add("T_B", "I_B", -1, "I_B = R_B - T_B");
    add("I_B", "i_B", +1, "i_B = I_B/B");
    add("Bandits", "i_B", -1, "i_B = I_B/B");
    add("i_B", "ihat_B", +1, "dihat_B/dt = (i_B - ihat_B)/tau");
    add("p_M", "T_P", +1, "T_P = p_M*M");
    add("Mafia", "T_P", +1, "T_P = p_M*M");
    add("Y", "I_P", +1, "I_P = Y - R_B - T_P");
    add("R_B", "I_P", -1, "I_P = Y - R_B - T_P");
    add("T_P", "I_P", -1, "I_P = Y - R_B - T_P");
    add("I_P", "i_P", +1, "i_P = I_P/P");
    add("Peasants", "i_P", -1, "i_P = I_P/P");
    add("i_P", "ihat_P", +1, "dihat_P/dt = (i_P - ihat_P)/tau");
    add("ihat_B", "attractiveness", +1, "attractiveness = ihat_B/(ihat_B + ihat_P)");
    add("ihat_P", "attractiveness", -1, "attractiveness = ihat_B/(ihat_B + ihat_P)");
    add("Peasants", "B_star", +1, "B* = (P+B)*attractiveness");
    add("Bandits", "B_star", +1, "B* = (P+B)*attractiveness");
    add("attractiveness", "B_star", +1, "B* = (P+B)*attractiveness");
    add("B_star", "bandit_recruitment", +1, "recruitment = (B* - B)/tau_B");
    add("Bandits", "bandit_recruitment", -1, "recruitment = (B* - B)/tau_B");
    add("bandit_recruitment", "Bandits", +1, "dB/dt = bandit recruitment");
    add("R_B", "W", +1, "W = R_B");
    add("I_P", "L", +1, "L = max(I_P, 0)");
    add("W", "l", +1, "l = min(W, L)");
    add("L", "l", +1, "l = min(W, L)");
    add("ihat_P", "p_M", +1, "p_M = max(ihat_P, ihat_B) + c_M");
    add("ihat_B", "p_M", +1, "p_M = max(ihat_P, ihat_B) + c_M");
    add("l", "D_M", +1, "D_M = l/p_M");
    add("p_M", "D_M", -1, "D_M = l/p_M");
    add("D_M", "mafia_recruitment", +1, "recruitment = (D_M - M)/tau_M");
    add("Mafia", "mafia_recruitment", -1, "recruitment = (D_M - M)/tau_M");
    add("mafia_recruitment", "Mafia", +1, "dM/dt = mafia recruitment");
    add("lambda_A", "m_B", -1, "m_B = (1-lambda_A)*theta_M*B");
    add("Bandits", "m_B", +1, "m_B = (1-lambda_A)*theta_M*B");
    add("Mafia", "lambda_M", +1, "lambda_M = min(1, M/m_B)");
    add("m_B", "lambda_M", -1, "lambda_M = min(1, M/m_B)");
    add("Bandits", "Peasants", -1, "P = N - B - M");
    add("Mafia", "Peasants", -1, "P = N - B - M");
    return g;
}

namespace detail {

/// Rotates a cycle (given as node indices) so the smallest index leads.
inline std::vector<int> canonical_rotation(std::vector<int> cycle) {
    auto it = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), it, cycle.end());
    return cycle;
}

struct AdjacencyView {
    int n = 0;
    std::vector<std::vector<int>> out;               // out[u] = sorted successor list
    std::map<std::pair<int, int>, int> edge_sign;    // (u,v) -> polarity

    explicit AdjacencyView(const SignedDigraph& g) {
        n = static_cast<int>(g.nodes.size());
        out.resize(n);
        for (const auto& e : g.edges) {
            int u = g.node_index(e.from);
            int v = g.node_index(e.to);
            out[u].push_back(v);
            edge_sign[{u, v}] = e.polarity;
        }
        for (auto& lst : out) {
            std::sort(lst.begin(), lst.end());
            lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
        }
    }
};

/// Johnson-style elementary circuit search restricted to circuits whose
/// minimum node index is `root`.
inline void circuits_from_root(const AdjacencyView& adj, int root,
                               std::vector<int>& stack, std::vector<bool>& blocked,
                               std::vector<std::set<int>>& block_map, int v,
                               std::vector<std::vector<int>>& found, bool& any) {
    // NOLINTNEXTLINE(misc-no-recursion)
    std::function<void(int)> unblock = [&](int u) {
        blocked[u] = false;
        for (int w : std::vector<int>(block_map[u].begin(), block_map[u].end())) {
            block_map[u].erase(w);
            if (blocked[w]) unblock(w);
        }
    };
    bool found_here = false;
    stack.push_back(v);
    blocked[v] = true;
    for (int w : adj.out[v]) {
        if (w < root) continue;
        if (w == root) {
            found.push_back(stack);
            found_here = true;
        } else if (!blocked[w]) {
            bool sub_any = false;
            circuits_from_root(adj, root, stack, blocked, block_map, w, found, sub_any);
            found_here = found_here || sub_any;
        }
    }
    if (found_here) {
        unblock(v);
    } else {
        for (int w : adj.out[v]) {
            if (w >= root) block_map[w].insert(v);
        }
    }
    stack.pop_back();
    any = found_here;
}

}  // namespace detail

/// Enumerates all elementary circuits, optionally only those containing
/// `through`. Deterministic: cycles are canonically rotated and sorted.
inline std::vector<FeedbackLoop> enumerate_loops(
    const SignedDigraph& g, const std::optional<std::string>& through = std::nullopt) {
    detail::AdjacencyView adj(g);
    std::vector<std::vector<int>> cycles;
    for (int root = 0; root < adj.n; ++root) {
        std::vector<int> stack;
        std::vector<bool> blocked(adj.n, false);
        std::vector<std::set<int>> block_map(adj.n);
        bool any = false;
        detail::circuits_from_root(adj, root, stack, blocked, block_map, root, cycles, any);
    }

    int through_idx = -1;
    if (through) {
        through_idx = g.node_index(*through);
        if (through_idx < 0) return {};
    }

    std::vector<std::vector<int>> kept;
    for (auto& c : cycles) {
        if (through_idx >= 0 &&
            std::find(c.begin(), c.end(), through_idx) == c.end()) {
            continue;
        }
        kept.push_back(detail::canonical_rotation(c));
    }
    std::sort(kept.begin(), kept.end());

    std::vector<FeedbackLoop> loops;
    loops.reserve(kept.size());
    for (const auto& c : kept) {
        FeedbackLoop loop;
        loop.polarity = +1;
        for (std::size_t i = 0; i < c.size(); ++i) {
            int u = c[i];
            int v = c[(i + 1) % c.size()];
            loop.polarity *= adj.edge_sign.at({u, v});
            loop.cycle.push_back(g.nodes[static_cast<std::size_t>(u)]);
        }
        loops.push_back(std::move(loop));
    }
    return loops;
}

struct NamedLoopCheck {
    std::string name;
    std::vector<std::string> chain;  ///< full node sequence, closure implied
    int expected_polarity = +1;
    bool found = false;
    int actual_polarity = 0;
    std::string broken_edge;  ///< "from->to" of the first missing edge
};

struct NamedLoopReport {
    std::vector<NamedLoopCheck> loops;
    bool all_ok = true;
};

/// Verifies the five named feedback loops along their defining variable
/// chains: presence of every edge and the overall polarity.
inline NamedLoopReport find_named_loops(const SignedDigraph& g) {
    NamedLoopReport report;
    auto check = [&](const std::string& name, std::vector<std::string> chain,
                     int expected) {
        NamedLoopCheck c;
        c.name = name;
        c.chain = std::move(chain);
        c.expected_polarity = expected;
        c.found = true;
        c.actual_polarity = +1;
        for (std::size_t i = 0; i < c.chain.size(); ++i) {
            const std::string& from = c.chain[i];
            const std::string& to = c.chain[(i + 1) % c.chain.size()];
            const SignedEdge* e = g.find_edge(from, to);
            if (!e) {
                c.found = false;
                c.broken_edge = from + "->" + to;
                break;
            }
            c.actual_polarity *= e->polarity;
        }
        if (!c.found || c.actual_polarity != c.expected_polarity) report.all_ok = false;
        report.loops.push_back(std::move(c));
    };

    // R1 "peasant prosperity": prosperity makes farming relatively attractive.
    check("R1", {"Peasants", "Y", "I_P", "i_P", "ihat_P", "attractiveness", "B_star",
                 "bandit_recruitment", "Bandits"}, +1);
    // B1 "plenty to lose": more output means more to steal.
    check("B1", {"Y", "R_B", "I_P", "i_P", "ihat_P", "attractiveness", "B_star",
                 "bandit_recruitment", "Bandits", "Peasants"}, -1);
    // R2 "attractiveness of banditry": loot attracts more bandits.
    check("R2", {"R_B", "I_B", "i_B", "ihat_B", "attractiveness", "B_star",
                 "bandit_recruitment", "Bandits"}, +1);
    // R3 "peasants lose": appropriations impoverish peasants, pushing them out.
    check("R3", {"Bandits", "R_B", "I_P", "i_P", "ihat_P", "attractiveness", "B_star",
                 "bandit_recruitment"}, +1);
    // B2 "demand for protection": appropriations call the mafia into being.
    check("B2", {"R_B", "W", "l", "D_M", "mafia_recruitment", "Mafia", "lambda_M",
                 "pi"}, -1);
    return report;
}

inline void write_edge_list(const SignedDigraph& g, std::ostream& out) {
    for (const auto& e : g.edges) {
        out << e.from << "," << e.to << "," << (e.polarity > 0 ? "+" : "-") << ","
            << e.provenance << "\n";
    }
}

inline void write_dot(const SignedDigraph& g, std::ostream& out) {
    out << "digraph causal {\n  rankdir=LR;\n";
    for (const auto& n : g.nodes) {
        out << "  \"" << n << "\";\n";
    }
    for (const auto& e : g.edges) {
        out << "  \"" << e.from << "\" -> \"" << e.to << "\" [label=\""
            << (e.polarity > 0 ? "+" : "-") << "\"";
        if (e.polarity < 0) out << " style=dashed";
        out << "];\n";
    }
    out << "}\n";
}

}  // namespace pbm
