#include "doctest.h"

#include "nvscc/optimize.hpp"

#include <cmath>

using namespace nvscc::optim;

namespace {

Box unit_box(int dim, double lo, double hi) {
    return {Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi)};
}

}  // namespace

TEST_CASE("maximizes a concave quadratic") {
    Eigen::VectorXd peak(3);
    peak << 0.3, -1.2, 2.0;
    const auto f = [&](const Eigen::VectorXd& x) { return 5.0 - (x - peak).squaredNorm(); };
    const SearchResult r = multistart_maximize(f, unit_box(3, -3.0, 3.0));
    CHECK((r.x - peak).cwiseAbs().maxCoeff() <= 1e-5);
    CHECK(r.value == doctest::Approx(5.0).epsilon(1e-10));
    CHECK(r.evaluations > 0);
    CHECK(!r.start_values.empty());
}

TEST_CASE("finds the Rosenbrock optimum") {
    const auto f = [](const Eigen::VectorXd& x) {
        return -(100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2));
    };
    const SearchResult r = multistart_maximize(f, unit_box(2, -2.0, 2.0));
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("optimum on the boundary is reached and bounds are respected") {
    const auto f = [](const Eigen::VectorXd& x) { return x(0) - 0.5 * std::pow(x(1) - 0.25, 2); };
    const Box box = unit_box(2, 0.0, 1.0);
    int outside = 0;
    const auto watched = [&](const Eigen::VectorXd& x) {
        if (!contains(box, x)) ++outside;
        return f(x);
    };
    const SearchResult r = multistart_maximize(watched, box);
    CHECK(outside == 0);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.x(1) == doctest::Approx(0.25).epsilon(1e-5));
}

TEST_CASE("fixed dimensions stay fixed") {
    Box box = unit_box(3, -1.0, 1.0);
    box.lo(1) = box.hi(1) = 0.4;
    const auto f = [](const Eigen::VectorXd& x) { return -x.squaredNorm(); };
    const SearchResult r = multistart_maximize(f, box);
    CHECK(r.x(1) == 0.4);
    CHECK(std::abs(r.x(0)) <= 1e-5);
    CHECK(std::abs(r.x(2)) <= 1e-5);
}

TEST_CASE("multi-start escapes a local maximum") {
    // two bumps; the taller is narrow and away from the centre
    const auto f = [](const Eigen::VectorXd& x) {
        return std::exp(-(x - Eigen::Vector2d(0.0, 0.0)).squaredNorm()) +
               2.0 * std::exp(-20.0 * (x - Eigen::Vector2d(2.0, -2.0)).squaredNorm());
    };
    const SearchResult r = multistart_maximize(f, unit_box(2, -3.0, 3.0));
    CHECK(r.value > 1.9);
}

TEST_CASE("results are deterministic for a seed") {
    const auto f = [](const Eigen::VectorXd& x) { return std::sin(3.0 * x(0)) * std::cos(2.0 * x(1)) - 0.1 * x.squaredNorm(); };
    MultiStartOptions o;
    o.seed = 42;
    const SearchResult a = multistart_maximize(f, unit_box(2, -2.0, 2.0), o);
    const SearchResult b = multistart_maximize(f, unit_box(2, -2.0, 2.0), o);
    CHECK(a.x == b.x);
    CHECK(a.value == b.value);
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("Halton points lie in the unit cube") {
    const Eigen::VectorXd shift = Eigen::VectorXd::Constant(4, 0.37);
    for (int i = 0; i < 200; ++i) {
        const Eigen::VectorXd p = halton_point(i, 4, shift);
        CHECK(p.minCoeff() >= 0.0);
        CHECK(p.maxCoeff() < 1.0);
    }
}

TEST_CASE("bad inputs") {
    Box box = unit_box(2, 0.0, 1.0);
    box.lo(0) = 2.0;
    const auto f = [](const Eigen::VectorXd& x) { return x.sum(); };
    CHECK_THROWS_AS(multistart_maximize(f, box), std::invalid_argument);
    const auto nan = [](const Eigen::VectorXd&) { return std::nan(""); };
    CHECK_THROWS_AS(multistart_maximize(nan, unit_box(2, 0.0, 1.0)), std::runtime_error);
    CHECK_THROWS(nelder_mead_maximize(f, unit_box(2, 0.0, 1.0), Eigen::VectorXd::Constant(3, 0.5)));
}
