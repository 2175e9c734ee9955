#pragma once

#include "fwr/dynamics.hpp"
#include "fwr/path.hpp"

namespace fwr {

/// Action in the bbar form: 1/2 int ||phidot - bbar(phi)||^2_{a^-1} dt,
/// midpoint-rule quadrature over the segments of the path.
double action_bbar(const DiscretePath& path, const DriftField& f);

/// Action in the omega form: 1/2 int ||phidot - b - 1_{dD} omega gamma||^2
/// with omega = ((phidot - b, gamma)_{a^-1} / ||gamma||^2_{a^-1}) v 0.
double action_omega(const DiscretePath& path, const DriftField& f);

/// Single-segment contribution of the bbar form (local recomputation for
/// gradient estimates in the path optimizer).
double segment_action_bbar(const DriftField& f, const Vec& x0, const Vec& x1, double dt);
/// Per-segment contributions of the bbar form (debugging / reports).
std::vector<double> action_segments_bbar(const DiscretePath& path, const DriftField& f);

/// Short connector: straight chord from x to y over horizon T = |x - y|,
/// projected pointwise into [D].
DiscretePath connector(const Vec& x, const Vec& y, const DomainSpec& dom, double locality_radius,
                       int n_nodes = 33);

}  // namespace fwr
