#pragma once

#include <functional>
#include <string>

#include "fwr/dynamics.hpp"

namespace fwr {

/// Disk drift with an outward radial push and a tangential swirl whose
/// boundary restriction is v(theta); equilibria of the sliding dynamics sit
/// at the zeros of v.
DriftField disk_tangential_field(std::function<double(double)> v, double radial_strength);

/// Example field on the unit disk: v(theta) = -A sin(3 theta). Six boundary
/// equilibria, stable at theta = 0, 2pi/3, 4pi/3 and unstable between them.
DriftField disk_six_equilibria(double tangential_amplitude = 1.0, double radial_strength = 1.0);

/// Two stable states at theta = 0 and pi, separated by saddles with
/// asymmetric barriers:
///   v(theta) = -A sin(theta) (2 cos(theta) + 0.3) (1 + skew sin(theta))
DriftField disk_two_well(double amplitude, double skew = 0.5, double radial_strength = 1.0);

/// Planar gradient drift b = -(x - center) on the given domain (a = I).
DriftField gradient_well(const DomainSpec& dom, const Vec& center);

/// Single boundary sink on the unit disk: v(theta) = -A sin(theta).
DriftField disk_single_sink(double amplitude = 1.0, double radial_strength = 1.0);

/// Boundary restriction v(theta) of a disk tangential field; used by tests
/// that integrate 1-D barrier heights.
double two_well_v(double theta, double amplitude, double skew);

struct NamedDrift {
    DriftField field;
    std::string description;
};

/// "disk_six_equilibria", "disk_two_well", "disk_single_sink",
/// "gradient_well"; parameters as documented per field.
NamedDrift named_drift(const std::string& name, double amplitude, double radial_strength,
                       double skew = 0.5);

}  // namespace fwr
