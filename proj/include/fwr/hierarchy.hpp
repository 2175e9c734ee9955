#pragma once

#include <functional>
#include <map>
#include <set>
#include <vector>

#include "fwr/qmatrix.hpp"

namespace fwr {

/// Arrow assignment with sinks W: every non-sink has exactly one outgoing
/// arrow, no cycles. arrow[m] = target, or -1 for sinks.
struct WGraph {
    std::vector<int> sinks;
    std::vector<int> arrow;
};

/// Calls fn for every W-graph on {0..l-1} with the given sinks.
void for_each_wgraph(int l, const std::vector<int>& sinks,
                     const std::function<void(const std::vector<int>& arrow)>& fn);

/// Materialized enumeration (guarded: l <= 12 and at most ~2e6 graphs).
std::vector<WGraph> enumerate_wgraphs(int l, const std::vector<int>& sinks);

struct MinWGraphResult {
    double value = 0.0;
    std::vector<int> arrow;  // arrow[m] = n, -1 for sinks
};

/// Minimum-weight W-graph via Chu-Liu/Edmonds arborescence contraction.
MinWGraphResult wgraph_min(const Mat& V, const std::vector<bool>& is_sink);

/// Brute-force minimum (test oracle for wgraph_min).
double wgraph_min_enumerated(const Mat& V, const std::vector<int>& sinks);

/// W(O_i): minimal arrow-weight sum over {i}-graphs (optimized solver).
double w_value(const QuasipotentialMatrix& V, int i);
double w_value_enumerated(const QuasipotentialMatrix& V, int i);

/// W(x) = min over stable i of W(O_i) + v_from[i].
double w_of_x(const QuasipotentialMatrix& V, const std::vector<double>& v_from);

struct StabilityPartition {
    std::vector<int> stable;
    std::map<int, int> unstable_map;  // unstable j -> stable i with V(j,i) ~ 0
};

StabilityPartition stability_partition(const QuasipotentialMatrix& V,
                                       double zero_tolerance = -1.0);

struct CycleTarget {
    double A = 0.0;
    int target = -1;  // first state outside pi reached by the minimizing graph
};

/// A(pi) and the exit state: minimum over (L \ pi)-graphs of the arrow-weight
/// sum, following the minimizing graph's chain from the bottom of pi.
CycleTarget next_cycle_target(const QuasipotentialMatrix& V, const std::set<int>& pi,
                              double tie_tolerance = 1e-9);

/// C(pi) = A(pi) - min_{i in pi} min over {i}-graphs restricted to pi.
double cycle_exit_constant(const QuasipotentialMatrix& V, const std::set<int>& pi, double A);

struct CycleNode {
    std::set<int> members;
    int rank = 0;
    std::vector<CycleNode> children;  // loop members in traversal order
    double A = 0.0;
    double C = 0.0;
    int exit_target = -1;  // state first reached outside members; -1 for the root
    int bottom = -1;       // member minimizing the restricted W

    bool leaf() const { return children.empty(); }
};

/// Full hierarchy of cycles, from rank-0 singletons up to the root cycle
/// covering every state.
CycleNode build_cycle_tree(const QuasipotentialMatrix& V, double tie_tolerance = 1e-9);

/// Metastable state observed over times exp(lambda / eps^2) started from
/// `start`: descends the tree restricted to the traversable sub-cycles.
int metastable_state(const CycleNode& tree, const QuasipotentialMatrix& V, int start,
                     double lambda, double tie_tolerance = 1e-9);

struct MetastableProfile {
    int start = 0;
    std::vector<double> thresholds;  // increasing lambda breakpoints
    std::vector<int> states;         // states.size() == thresholds.size() + 1
    int state_at(double lambda) const;
};

MetastableProfile metastable_profile(const CycleNode& tree, const QuasipotentialMatrix& V,
                                     int start, double tie_tolerance = 1e-9);

}  // namespace fwr
