#pragma once

#include <vector>

#include "fwr/geometry.hpp"

namespace fwr {

/// Time-discretized curve in [D]: strictly increasing times, one point each.
struct DiscretePath {
    std::vector<double> times;
    std::vector<Vec> points;

    std::size_t size() const { return points.size(); }
    double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }
};

}  // namespace fwr
