#include <doctest.h>

#include <cmath>
#include <random>

#include "fwr/errors.hpp"
#include "fwr/geometry.hpp"

using namespace fwr;

namespace {

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

MetricField diag_metric(double a11, double a22) {
    Mat a = Mat::Zero(2, 2);
    a(0, 0) = a11;
    a(1, 1) = a22;
    return MetricField::from_a([a](const Vec&) { return a; },
                               1.0 / std::sqrt(std::max(a11, a22)));
}

}  // namespace

TEST_CASE("metric fields satisfy the structural identities") {
    auto varying = MetricField::from_a(
        [](const Vec& x) {
            Mat a(2, 2);
            double s = 0.2 * std::sin(x[0] + x[1]);
            a << 2.0 + s, s, s, 1.0 + 0.5 * s * s;
            return a;
        },
        0.5);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        Vec x = v2(u(rng), u(rng));
        Mat a = varying.a(x);
        CHECK((a - a.transpose()).norm() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK((a * varying.a_inv(x) - Mat::Identity(2, 2)).norm() < 1e-10);
        Mat s = varying.sigma(x);
        CHECK((s * s.transpose() - a).norm() < 1e-10);
        Vec xi = v2(u(rng), u(rng));
        double q = xi.dot(a * xi);
        double t2 = varying.theta * varying.theta;
        CHECK(q >= t2 * xi.squaredNorm() - 1e-12);
        CHECK(q <= xi.squaredNorm() / t2 + 1e-12);
    }
}

TEST_CASE("signed distances are 1-Lipschitz with unit gradient near the boundary") {
    for (const auto& dom : {DomainSpec::unit_disk(), DomainSpec::ellipse(2.0, 1.0)}) {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ux(dom.bounding_box.lo[0], dom.bounding_box.hi[0]);
        std::uniform_real_distribution<double> uy(dom.bounding_box.lo[1], dom.bounding_box.hi[1]);
        for (int k = 0; k < 200; ++k) {
            Vec p = v2(ux(rng), uy(rng)), q = v2(ux(rng), uy(rng));
            CHECK(std::abs(dom.signed_distance(p) - dom.signed_distance(q)) <=
                  (p - q).norm() + 1e-9);
        }
        for (int k = 0; k < 40; ++k) {
            double th = 2.0 * M_PI * k / 40.0;
            Vec p = project_to_boundary(dom, v2(1.7 * std::cos(th), 1.1 * std::sin(th)));
            CHECK(sd_gradient(dom, p).norm() == doctest::Approx(1.0).epsilon(1e-4));
        }
    }
}

TEST_CASE("inward normals on the disk and the ellipse") {
    DomainSpec disk = DomainSpec::unit_disk();
    CHECK((inward_normal(disk, v2(1, 0)) - v2(-1, 0)).norm() < 1e-8);
    CHECK((inward_normal(disk, v2(0, -1)) - v2(0, 1)).norm() < 1e-8);
    DomainSpec ell = DomainSpec::ellipse(2.0, 1.0);
    CHECK((inward_normal(ell, v2(2, 0)) - v2(-1, 0)).norm() < 1e-6);
    CHECK_THROWS_AS(inward_normal(disk, v2(0.2, 0.2)), NotOnBoundary);
}

TEST_CASE("co-normal directions and their a-inverse orthogonality") {
    DomainSpec disk = DomainSpec::unit_disk();
    MetricField id = MetricField::identity(2);
    CHECK((co_normal(disk, id, v2(1, 0)) - v2(-1, 0)).norm() < 1e-8);

    MetricField m = diag_metric(4.0, 1.0);
    CHECK((co_normal(disk, m, v2(0, 1)) - v2(0, -1)).norm() < 1e-8);

    Vec x = v2(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    Vec gamma = co_normal(disk, m, x);
    Vec expected = v2(-4, -1).normalized();
    CHECK((gamma - expected).norm() < 1e-6);
    CHECK(gamma.norm() == doctest::Approx(1.0).epsilon(1e-10));
    Vec tangent = v2(-1, 1).normalized();
    CHECK(std::abs(gamma.dot(m.a_inv(x) * tangent)) < 1e-8);
    CHECK(gamma.dot(inward_normal(disk, x)) > 0.0);
}

TEST_CASE("projection into the closed domain") {
    DomainSpec disk = DomainSpec::unit_disk();
    CHECK((project_to_closure(disk, v2(0.5, 0)) - v2(0.5, 0)).norm() == 0.0);
    CHECK((project_to_closure(disk, v2(2, 0)) - v2(1, 0)).norm() < 1e-8);
    Vec p = v2(1.2, 0.9);
    CHECK((project_to_closure(disk, p) - Vec(p / p.norm())).norm() < 1e-8);
    // boundary projection also works from inside
    Vec q = project_to_boundary(disk, v2(0.4, 0.1));
    CHECK(std::abs(q.norm() - 1.0) < 1e-8);
}

TEST_CASE("named domains parse") {
    CHECK(DomainSpec::named("unit_disk").dimension == 2);
    CHECK(DomainSpec::named("ellipse(2,1)").signed_distance(v2(2, 0)) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(DomainSpec::named("unit_ball(3)").dimension == 3);
    CHECK_THROWS_AS(DomainSpec::named("dodecahedron"), ConfigInvalid);
}
