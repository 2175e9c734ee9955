#include "fwr/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fwr/errors.hpp"

namespace fwr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------
// Chu-Liu/Edmonds. We search a minimum out-arborescence rooted at `root`:
// every other node has exactly one incoming edge and is reachable from the
// root. W-graphs map onto this after reversing the arrows and contracting
// the sink set into the root.
struct CLEEdge {
    int u, v;   // u -> v
    double w;
    int orig;   // index into the caller's master edge list
};

// Returns indices (into `edges`) of the chosen edges, or nullopt-like empty
// with ok=false when no arborescence exists.
bool cle_solve(int n, int root, const std::vector<CLEEdge>& edges, std::vector<int>& chosen) {
    std::vector<int> best(n, -1);
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        const CLEEdge& ed = edges[e];
        if (ed.v == root || ed.u == ed.v) continue;
        if (best[ed.v] < 0 || ed.w < edges[best[ed.v]].w) best[ed.v] = e;
    }
    for (int v = 0; v < n; ++v)
        if (v != root && best[v] < 0) return false;

    // look for a cycle in v -> best[v].u
    std::vector<int> color(n, 0);
    std::vector<int> cycle;
    for (int s = 0; s < n && cycle.empty(); ++s) {
        if (s == root || color[s] != 0) continue;
        int v = s;
        std::vector<int> stack;
        while (v != root && color[v] == 0) {
            color[v] = 1;
            stack.push_back(v);
            v = edges[best[v]].u;
        }
        if (v != root && color[v] == 1) {
            // found: unwind the stack down to v
            auto it = std::find(stack.begin(), stack.end(), v);
            cycle.assign(it, stack.end());
        }
        for (int x : stack) color[x] = 2;
    }

    if (cycle.empty()) {
        chosen.clear();
        for (int v = 0; v < n; ++v)
            if (v != root) chosen.push_back(best[v]);
        return true;
    }

    // contract the cycle into a fresh node
    std::vector<char> in_cycle(n, 0);
    for (int v : cycle) in_cycle[v] = 1;
    std::vector<int> remap(n + 1, -1);
    int m = 0;
    for (int v = 0; v < n; ++v)
        if (!in_cycle[v]) remap[v] = m++;
    int super = m++;

    std::vector<CLEEdge> sub;
    std::vector<int> parent_edge;  // sub edge -> index in `edges`
    std::vector<int> entered;      // sub edge -> cycle node it entered, or -1
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        const CLEEdge& ed = edges[e];
        bool cu = in_cycle[ed.u], cv = in_cycle[ed.v];
        if (cu && cv) continue;
        CLEEdge ne;
        ne.u = cu ? super : remap[ed.u];
        ne.v = cv ? super : remap[ed.v];
        ne.w = cv ? ed.w - edges[best[ed.v]].w : ed.w;
        ne.orig = static_cast<int>(parent_edge.size());
        parent_edge.push_back(e);
        entered.push_back(cv ? ed.v : -1);
        sub.push_back(ne);
    }

    std::vector<int> sub_chosen;
    if (!cle_solve(m, remap[root] >= 0 ? remap[root] : super, sub, sub_chosen)) return false;

    chosen.clear();
    int entered_node = -1;
    for (int se : sub_chosen) {
        chosen.push_back(parent_edge[sub[se].orig]);
        if (entered[sub[se].orig] >= 0) entered_node = entered[sub[se].orig];
    }
    for (int v : cycle)
        if (v != entered_node) chosen.push_back(best[v]);
    return true;
}

void check_labels(int l, const std::vector<int>& sinks) {
    if (l > 12) throw TooLarge("W-graph machinery is guarded at l <= 12");
    if (sinks.empty()) throw ConfigInvalid("W-graph sinks must be nonempty");
    for (int s : sinks)
        if (s < 0 || s >= l) throw ConfigInvalid("W-graph sink out of range");
}

// assigns arrows to non-sink nodes in order, pruning any assignment that
// closes a cycle as soon as its last edge is placed
void wgraph_recurse(const std::vector<int>& free_nodes, std::size_t pos, std::vector<int>& arrow,
                    int l, const std::function<void(const std::vector<int>&)>& fn) {
    if (pos == free_nodes.size()) {
        fn(arrow);
        return;
    }
    int m = free_nodes[pos];
    for (int n = 0; n < l; ++n) {
        if (n == m) continue;
        // would m -> n close a cycle through already-assigned arrows?
        int v = n;
        bool cyc = false;
        while (v >= 0 && arrow[v] >= 0) {
            v = arrow[v];
            if (v == m) {
                cyc = true;
                break;
            }
        }
        if (cyc) continue;
        arrow[m] = n;
        wgraph_recurse(free_nodes, pos + 1, arrow, l, fn);
        arrow[m] = -1;
    }
}

Mat submatrix(const Mat& V, const std::vector<int>& idx) {
    Mat s(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) s(i, j) = V(idx[i], idx[j]);
    return s;
}

// min over i in pi of the {i}-graph minimum restricted to pi, plus the argmin
std::pair<double, int> restricted_bottom(const Mat& V, const std::set<int>& pi) {
    std::vector<int> idx(pi.begin(), pi.end());
    Mat sub = submatrix(V, idx);
    double best = kInf;
    int bottom = idx.front();
    for (std::size_t k = 0; k < idx.size(); ++k) {
        std::vector<bool> sink(idx.size(), false);
        sink[k] = true;
        MinWGraphResult r = wgraph_min(sub, sink);
        if (r.value < best) {
            best = r.value;
            bottom = idx[k];
        }
    }
    return {best, bottom};
}

int follow_to_exit(const std::vector<int>& arrow, const std::set<int>& pi, int from) {
    int v = from;
    for (std::size_t guard = 0; guard <= arrow.size() + 1; ++guard) {
        if (!pi.count(v)) return v;
        v = arrow[v];
        if (v < 0) break;
    }
    throw InconsistentMatrix("next_cycle_target: arrow chain did not leave pi");
}

}  // namespace

void for_each_wgraph(int l, const std::vector<int>& sinks,
                     const std::function<void(const std::vector<int>&)>& fn) {
    check_labels(l, sinks);
    std::vector<char> is_sink(l, 0);
    for (int s : sinks) is_sink[s] = 1;
    std::vector<int> free_nodes;
    for (int m = 0; m < l; ++m)
        if (!is_sink[m]) free_nodes.push_back(m);
    std::vector<int> arrow(l, -1);
    wgraph_recurse(free_nodes, 0, arrow, l, fn);
}

std::vector<WGraph> enumerate_wgraphs(int l, const std::vector<int>& sinks) {
    check_labels(l, sinks);
    double count_bound = std::pow(static_cast<double>(l - 1),
                                  static_cast<double>(l - sinks.size()));
    if (count_bound > 2e6)
        throw TooLarge("enumerate_wgraphs: too many candidate graphs to materialize");
    std::vector<WGraph> out;
    for_each_wgraph(l, sinks, [&](const std::vector<int>& arrow) {
        out.push_back({sinks, arrow});
    });
    return out;
}

MinWGraphResult wgraph_min(const Mat& V, const std::vector<bool>& is_sink) {
    int l = static_cast<int>(V.rows());
    std::vector<int> remap(l, -1);
    int m = 0;
    for (int v = 0; v < l; ++v)
        if (!is_sink[v]) remap[v] = m++;
    int root = m;

    MinWGraphResult result;
    result.arrow.assign(l, -1);
    if (m == 0) return result;  // all sinks: empty graph, value 0

    // reversed orientation: W-graph arrow p -> q becomes CLE edge q -> p
    struct MasterEdge {
        int from, to;
    };
    std::vector<MasterEdge> master;
    std::vector<CLEEdge> edges;
    for (int p = 0; p < l; ++p) {
        if (is_sink[p]) continue;
        for (int q = 0; q < l; ++q) {
            if (q == p) continue;
            CLEEdge e;
            e.u = is_sink[q] ? root : remap[q];
            e.v = remap[p];
            e.w = V(p, q);
            e.orig = static_cast<int>(master.size());
            master.push_back({p, q});
            edges.push_back(e);
        }
    }
    std::vector<int> chosen;
    if (!cle_solve(m + 1, root, edges, chosen))
        throw InconsistentMatrix("wgraph_min: no converging graph exists");
    for (int e : chosen) {
        const MasterEdge& me = master[edges[e].orig];
        result.arrow[me.from] = me.to;
        result.value += V(me.from, me.to);
    }
    return result;
}

double wgraph_min_enumerated(const Mat& V, const std::vector<int>& sinks) {
    double best = kInf;
    for_each_wgraph(static_cast<int>(V.rows()), sinks, [&](const std::vector<int>& arrow) {
        double s = 0.0;
        for (int m = 0; m < static_cast<int>(arrow.size()); ++m)
            if (arrow[m] >= 0) s += V(m, arrow[m]);
        best = std::min(best, s);
    });
    return best;
}

double w_value(const QuasipotentialMatrix& V, int i) {
    std::vector<bool> sink(V.size(), false);
    sink.at(i) = true;
    return wgraph_min(V.values, sink).value;
}

double w_value_enumerated(const QuasipotentialMatrix& V, int i) {
    return wgraph_min_enumerated(V.values, {i});
}

double w_of_x(const QuasipotentialMatrix& V, const std::vector<double>& v_from) {
    if (static_cast<int>(v_from.size()) != V.size())
        throw ConfigInvalid("w_of_x: v_from size mismatch");
    StabilityPartition sp = stability_partition(V);
    double best = kInf;
    for (int i : sp.stable) best = std::min(best, w_value(V, i) + v_from[i]);
    return best;
}

StabilityPartition stability_partition(const QuasipotentialMatrix& V, double zero_tolerance) {
    int l = V.size();
    if (zero_tolerance < 0.0) {
        double vmax = 0.0;
        for (int i = 0; i < l; ++i)
            for (int j = 0; j < l; ++j) vmax = std::max(vmax, V.values(i, j));
        zero_tolerance = 1e-6 * vmax;
    }
    StabilityPartition out;
    // a state j is unstable when it reaches some other state at zero cost
    std::vector<bool> stable(l, true);
    for (int j = 0; j < l; ++j)
        for (int i = 0; i < l; ++i)
            if (i != j && V.values(j, i) <= zero_tolerance) stable[j] = false;
    for (int j = 0; j < l; ++j)
        if (stable[j]) out.stable.push_back(j);
    for (int j = 0; j < l; ++j) {
        if (stable[j]) continue;
        int source = -1;
        for (int i : out.stable)
            if (V.values(j, i) <= zero_tolerance) {
                source = i;
                break;
            }
        if (source < 0)
            throw InconsistentMatrix("stability_partition: unstable state " + std::to_string(j) +
                                     " has no zero-cost stable source");
        out.unstable_map[j] = source;
    }
    return out;
}

CycleTarget next_cycle_target(const QuasipotentialMatrix& V, const std::set<int>& pi,
                              double tie_tolerance) {
    int l = V.size();
    if (pi.empty() || static_cast<int>(pi.size()) >= l)
        throw ConfigInvalid("next_cycle_target: pi must be a proper nonempty subset");
    std::vector<bool> sink(l, true);
    std::vector<int> sink_list;
    for (int m : pi) sink[m] = false;
    for (int v = 0; v < l; ++v)
        if (sink[v]) sink_list.push_back(v);

    MinWGraphResult best = wgraph_min(V.values, sink);
    int bottom = restricted_bottom(V.values, pi).second;
    int target = follow_to_exit(best.arrow, pi, bottom);

    // tie scan: any other minimizing graph with a different exit state?
    double count_bound =
        std::pow(static_cast<double>(l - 1), static_cast<double>(pi.size()));
    if (count_bound <= 2e6) {
        bool tie = false;
        for_each_wgraph(l, sink_list, [&](const std::vector<int>& arrow) {
            double s = 0.0;
            for (int m : pi) s += V.values(m, arrow[m]);
            if (s <= best.value + tie_tolerance && follow_to_exit(arrow, pi, bottom) != target)
                tie = true;
        });
        if (tie)
            throw NonGenericTie("next_cycle_target: minimizing graphs disagree on the exit state");
    }
    return {best.value, target};
}

double cycle_exit_constant(const QuasipotentialMatrix& V, const std::set<int>& pi, double A) {
    if (pi.size() == 1) return A;  // inner minimum is the empty sum
    return A - restricted_bottom(V.values, pi).first;
}

namespace {

CycleNode make_singleton(const QuasipotentialMatrix& V, int i, double tie_tol) {
    CycleNode n;
    n.members = {i};
    n.rank = 0;
    n.bottom = i;
    if (V.size() == 1) {
        n.A = kInf;
        n.C = 0.0;
        n.exit_target = -1;
    } else {
        CycleTarget t = next_cycle_target(V, n.members, tie_tol);
        n.A = t.A;
        n.C = t.A;
        n.exit_target = t.target;
    }
    return n;
}

}  // namespace

CycleNode build_cycle_tree(const QuasipotentialMatrix& V, double tie_tolerance) {
    int l = V.size();
    V.validate();
    std::vector<CycleNode> level;
    for (int i = 0; i < l; ++i) level.push_back(make_singleton(V, i, tie_tolerance));
    if (l == 1) return level.front();

    while (level.size() > 1) {
        // successor map between the current cycles
        std::vector<int> succ(level.size());
        for (std::size_t k = 0; k < level.size(); ++k) {
            int t = level[k].exit_target;
            succ[k] = -1;
            for (std::size_t j = 0; j < level.size(); ++j)
                if (level[j].members.count(t)) succ[k] = static_cast<int>(j);
            if (succ[k] < 0)
                throw InconsistentMatrix("build_cycle_tree: exit target escapes the level");
        }
        // loops of the successor map become the next-rank cycles
        std::vector<int> state(level.size(), 0);  // 0 unseen, 1 on stack, 2 done
        std::vector<std::vector<int>> loops;
        for (std::size_t s = 0; s < level.size(); ++s) {
            if (state[s] != 0) continue;
            std::vector<int> stack;
            int v = static_cast<int>(s);
            while (state[v] == 0) {
                state[v] = 1;
                stack.push_back(v);
                v = succ[v];
            }
            if (state[v] == 1) {
                auto it = std::find(stack.begin(), stack.end(), v);
                loops.emplace_back(it, stack.end());
            }
            for (int x : stack) state[x] = 2;
        }
        std::vector<char> in_loop(level.size(), 0);
        std::vector<CycleNode> next;
        for (auto& loop : loops) {
            // start the traversal order at the child with the smallest member
            std::size_t start = 0;
            for (std::size_t k = 1; k < loop.size(); ++k)
                if (*level[loop[k]].members.begin() < *level[loop[start]].members.begin())
                    start = k;
            std::rotate(loop.begin(), loop.begin() + start, loop.end());

            CycleNode node;
            for (int k : loop) {
                in_loop[k] = 1;
                node.members.insert(level[k].members.begin(), level[k].members.end());
                node.rank = std::max(node.rank, level[k].rank + 1);
                node.children.push_back(level[k]);
            }
            node.bottom = restricted_bottom(V.values, node.members).second;
            if (static_cast<int>(node.members.size()) == l) {
                node.A = kInf;  // the root is never exited
                node.exit_target = -1;
                node.C = 0.0;
                for (const CycleNode& c : node.children) node.C = std::max(node.C, c.C);
            } else {
                CycleTarget t = next_cycle_target(V, node.members, tie_tolerance);
                node.A = t.A;
                node.exit_target = t.target;
                node.C = cycle_exit_constant(V, node.members, t.A);
            }
            next.push_back(std::move(node));
        }
        for (std::size_t k = 0; k < level.size(); ++k)
            if (!in_loop[k]) next.push_back(level[k]);
        level = std::move(next);
    }
    return level.front();
}

namespace {

const CycleNode& child_containing(const CycleNode& node, int state) {
    for (const CycleNode& c : node.children)
        if (c.members.count(state)) return c;
    throw InconsistentMatrix("metastable_state: state not found among children");
}

int descend_greatest_c(const CycleNode& node, double tie_tol) {
    if (node.leaf()) return *node.members.begin();
    const CycleNode* best = &node.children.front();
    for (const CycleNode& c : node.children)
        if (c.C > best->C) best = &c;
    for (const CycleNode& c : node.children)
        if (&c != best && std::abs(c.C - best->C) <= tie_tol)
            throw NonGenericTie("metastable_state: two sub-cycles share the maximal C");
    return descend_greatest_c(*best, tie_tol);
}

int resolve(const CycleNode& node, int entry, double lambda, double tie_tol) {
    if (node.leaf()) return *node.members.begin();
    const CycleNode* c = &child_containing(node, entry);
    int e = entry;
    std::set<const CycleNode*> visited;
    while (c->C <= lambda) {
        if (visited.count(c))  // the whole loop is traversable at this scale
            return descend_greatest_c(node, tie_tol);
        visited.insert(c);
        e = c->exit_target;
        c = &child_containing(node, e);
    }
    return resolve(*c, e, lambda, tie_tol);
}

}  // namespace

int metastable_state(const CycleNode& tree, const QuasipotentialMatrix& V, int start,
                     double lambda, double tie_tolerance) {
    if (!tree.members.count(start))
        throw ConfigInvalid("metastable_state: start state not in the tree");
    if (lambda <= 0.0) throw ConfigInvalid("metastable_state: lambda must be positive");
    (void)V;
    double probe = std::max(tie_tolerance, 0.0);
    int lo = resolve(tree, start, std::max(0.0, lambda - probe), tie_tolerance);
    int hi = resolve(tree, start, lambda + probe, tie_tolerance);
    if (lo != hi)
        throw AtBreakpoint("metastable_state: lambda sits on a threshold of the profile");
    return resolve(tree, start, lambda, tie_tolerance);
}

int MetastableProfile::state_at(double lambda) const {
    std::size_t k = 0;
    while (k < thresholds.size() && lambda >= thresholds[k]) ++k;
    return states[k];
}

MetastableProfile metastable_profile(const CycleNode& tree, const QuasipotentialMatrix& V,
                                     int start, double tie_tolerance) {
    (void)V;
    std::vector<double> candidates;
    std::function<void(const CycleNode&)> collect = [&](const CycleNode& n) {
        if (std::isfinite(n.C) && n.C > 0.0) candidates.push_back(n.C);
        for (const CycleNode& c : n.children) collect(c);
    };
    collect(tree);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    MetastableProfile profile;
    profile.start = start;
    // evaluate on each open interval between candidate breakpoints
    std::vector<double> probes;
    if (candidates.empty()) {
        probes.push_back(1.0);
    } else {
        probes.push_back(0.5 * candidates.front());
        for (std::size_t k = 0; k + 1 < candidates.size(); ++k)
            probes.push_back(0.5 * (candidates[k] + candidates[k + 1]));
        probes.push_back(candidates.back() + 1.0);
    }
    std::vector<int> states;
    for (double lam : probes) states.push_back(resolve(tree, start, lam, tie_tolerance));
    profile.states.push_back(states.front());
    for (std::size_t k = 1; k < states.size(); ++k) {
        if (states[k] != states[k - 1]) {
            profile.thresholds.push_back(candidates[k - 1]);
            profile.states.push_back(states[k]);
        }
    }
    return profile;
}

void QuasipotentialMatrix::validate(double tolerance) const {
    int l = size();
    if (values.cols() != l) throw InconsistentMatrix("QuasipotentialMatrix: not square");
    for (int i = 0; i < l; ++i) {
        if (std::abs(values(i, i)) > tolerance)
            throw InconsistentMatrix("QuasipotentialMatrix: nonzero diagonal");
        for (int j = 0; j < l; ++j) {
            if (values(i, j) < -tolerance)
                throw InconsistentMatrix("QuasipotentialMatrix: negative entry");
            if (i != j && values(i, j) <= tolerance && values(j, i) <= tolerance)
                throw InconsistentMatrix(
                    "QuasipotentialMatrix: V(i,j) and V(j,i) both vanish for i != j");
        }
    }
}

}  // namespace fwr
