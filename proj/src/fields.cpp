#include "fwr/fields.hpp"

#include <cmath>

#include "fwr/errors.hpp"

namespace fwr {

DriftField disk_tangential_field(std::function<double(double)> v, double radial_strength) {
    DriftField f;
    f.domain = DomainSpec::unit_disk();
    f.metric = MetricField::identity(2);
    f.b = [v = std::move(v), radial_strength](const Vec& x) {
        double r2 = x.squaredNorm();
        Vec out(2);
        if (r2 < 1e-30) {
            out.setZero();
            return out;
        }
        double theta = std::atan2(x[1], x[0]);
        double swirl = v(theta);
        out[0] = radial_strength * x[0] - swirl * x[1];
        out[1] = radial_strength * x[1] + swirl * x[0];
        return out;
    };
    return f;
}

DriftField disk_six_equilibria(double tangential_amplitude, double radial_strength) {
    double a = tangential_amplitude;
    return disk_tangential_field([a](double th) { return -a * std::sin(3.0 * th); },
                                 radial_strength);
}

double two_well_v(double theta, double amplitude, double skew) {
    return -amplitude * std::sin(theta) * (2.0 * std::cos(theta) + 0.3) *
           (1.0 + skew * std::sin(theta));
}

DriftField disk_two_well(double amplitude, double skew, double radial_strength) {
    return disk_tangential_field(
        [amplitude, skew](double th) { return two_well_v(th, amplitude, skew); },
        radial_strength);
}

DriftField disk_single_sink(double amplitude, double radial_strength) {
    return disk_tangential_field([amplitude](double th) { return -amplitude * std::sin(th); },
                                 radial_strength);
}

DriftField gradient_well(const DomainSpec& dom, const Vec& center) {
    DriftField f;
    f.domain = dom;
    f.metric = MetricField::identity(dom.dimension);
    f.b = [center](const Vec& x) { return Vec(center - x); };
    return f;
}

NamedDrift named_drift(const std::string& name, double amplitude, double radial_strength,
                       double skew) {
    if (name == "disk_six_equilibria")
        return {disk_six_equilibria(amplitude, radial_strength),
                "unit disk, v(theta) = -A sin(3 theta)"};
    if (name == "disk_two_well")
        return {disk_two_well(amplitude, skew, radial_strength),
                "unit disk, asymmetric double well on the circle"};
    if (name == "disk_single_sink")
        return {disk_single_sink(amplitude, radial_strength),
                "unit disk, v(theta) = -A sin(theta)"};
    if (name == "gradient_well") {
        Vec c = Vec::Zero(2);
        return {gradient_well(DomainSpec::unit_disk(), c), "unit disk, b = -x"};
    }
    throw ConfigInvalid("unknown drift: " + name);
}

}  // namespace fwr
