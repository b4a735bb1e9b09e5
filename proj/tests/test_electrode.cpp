#include "doctest.h"

#include "nvscc/electrode.hpp"

#include <cmath>
#include <numbers>

using namespace nvscc;

namespace {

// Composite Simpson rule on [a, b] with n (even) panels.
template <typename F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// Potential of the charged disc from its surface charge, σ ∝ 1/sqrt(a² − ρ²),
// written with ρ = a sinθ so the edge singularity disappears.
double disc_potential_on_axis(double v, double a, double z) {
    const auto g = [&](double th) { return a * std::sin(th) / std::sqrt(a * a * std::sin(th) * std::sin(th) + z * z); };
    return 2.0 * v / std::numbers::pi * simpson(g, 0.0, std::numbers::pi / 2, 4000);
}

double disc_potential(double v, double a, double r, double z) {
    const auto inner = [&](double th) {
        const double rho = a * std::sin(th);
        const auto g = [&](double psi) {
            return a * std::sin(th) / std::sqrt(r * r + rho * rho - 2.0 * r * rho * std::cos(psi) + z * z);
        };
        return simpson(g, 0.0, 2.0 * std::numbers::pi, 800);
    };
    return v / (std::numbers::pi * std::numbers::pi) * simpson(inner, 0.0, std::numbers::pi / 2, 800);
}

constexpr double kBesselZero = 2.404825557695773;

}  // namespace

TEST_CASE("disc potential matches surface-charge quadrature") {
    ElectrodeConfig c;
    c.applied_potential = 1.0;
    for (double z : {1.0, 10.0, 50.0, 300.0}) {
        CHECK(potential_at(c, 0.0, z) == doctest::Approx(disc_potential_on_axis(1.0, 100.0, z)).epsilon(1e-9));
    }
    for (auto [r, z] : {std::pair{30.0, 10.0}, {90.0, 20.0}, {150.0, 15.0}, {250.0, 80.0}}) {
        CHECK(potential_at(c, r, z) == doctest::Approx(disc_potential(1.0, 100.0, r, z)).epsilon(1e-5));
    }
}

TEST_CASE("disc potential limits") {
    ElectrodeConfig c;
    c.applied_potential = 2.0;
    // equipotential on the disc, far field of a point charge 2aV/π
    CHECK(potential_at(c, 0.0, 0.0) == doctest::Approx(2.0));
    CHECK(potential_at(c, 50.0, 0.0) == doctest::Approx(2.0));
    CHECK(potential_at(c, 200.0, 0.0) < 2.0);
    const double far = 10.0 * c.electrode_radius;
    const double point = 2.0 * c.electrode_radius * 2.0 / (std::numbers::pi * far);
    CHECK(std::abs(potential_at(c, 0.0, far) - point) <= 0.1 * point);
    CHECK(std::abs(potential_at(c, far, 0.0) - point) <= 0.1 * point);
    CHECK(potential_at(c, 0.0, 5.0) > potential_at(c, 0.0, 10.0));
}

TEST_CASE("NV level shift") {
    ElectrodeConfig c;
    c.applied_potential = 1.0;
    CHECK(nv_level_shift(c) == doctest::Approx(0.937).epsilon(1e-3));
    CHECK(nv_level_shift(c) == doctest::Approx(2.0 / std::numbers::pi * std::atan(10.0)).epsilon(1e-12));
    c.applied_potential = -0.7;
    const double neg = nv_level_shift(c);
    c.applied_potential = 0.7;
    CHECK(neg == doctest::Approx(-nv_level_shift(c)).epsilon(1e-14));
    c.applied_potential = 1.4;
    CHECK(nv_level_shift(c) == doctest::Approx(-2.0 * neg).epsilon(1e-14));
    c.dielectric_constant = 11.0;
    CHECK(nv_level_shift(c) == doctest::Approx(-2.0 * neg).epsilon(1e-14));
    c.insulator_thickness = 5.0;
    CHECK(nv_level_shift(c) == doctest::Approx(2.8 / std::numbers::pi * std::atan(100.0 / 15.0)).epsilon(1e-12));
}

TEST_CASE("envelope solver reproduces the cylindrical box") {
    GridSpec g;
    g.r_max = 10.0;
    g.z_min = 0.0;
    g.z_max = 10.0;
    g.n_radial = 60;
    g.n_axial = 60;
    g.n_levels = 2;
    const EffectiveMass m{1.0, 1.0};
    const auto sol = solve_envelope([](double, double) { return 0.0; }, m, g);
    const double exact = kHbar2Over2MeEvNm2 * (std::pow(kBesselZero / 10.0, 2) + std::pow(std::numbers::pi / 10.0, 2));
    CHECK(sol.energies(0) == doctest::Approx(exact).epsilon(1e-3));
    const double second = kHbar2Over2MeEvNm2 * (std::pow(kBesselZero / 10.0, 2) + std::pow(2.0 * std::numbers::pi / 10.0, 2));
    CHECK(sol.energies(1) == doctest::Approx(second).epsilon(2e-3));
    CHECK(sol.max_residual <= 1e-8);
}

TEST_CASE("envelope solver reproduces the harmonic oscillator") {
    const double hw = 0.02;
    const double k = hw * hw / (2.0 * kHbar2Over2MeEvNm2);
    GridSpec g;
    g.r_max = 12.0;
    g.z_min = -12.0;
    g.z_max = 12.0;
    g.n_radial = 80;
    g.n_axial = 160;
    g.n_levels = 2;
    const auto sol = solve_envelope([k](double r, double z) { return 0.5 * k * (r * r + z * z); }, {1.0, 1.0}, g);
    CHECK(sol.energies(0) == doctest::Approx(1.5 * hw).epsilon(1e-3));
    CHECK(sol.energies(1) == doctest::Approx(2.5 * hw).epsilon(1e-3));

    // anisotropic mass: transverse and longitudinal frequencies differ
    const EffectiveMass aniso{1.56, 0.28};
    const double wz = hw / std::sqrt(aniso.longitudinal);
    const double wr = hw / std::sqrt(aniso.transverse);
    g.r_max = 8.0;
    g.n_levels = 1;
    const auto sol2 = solve_envelope([k](double r, double z) { return 0.5 * k * (r * r + z * z); }, aniso, g);
    CHECK(sol2.energies(0) == doctest::Approx(wr + 0.5 * wz).epsilon(1e-3));
}

TEST_CASE("electrode envelope converges and is grid-stable") {
    ElectrodeConfig c;
    c.applied_potential = 1.0;
    const EffectiveMass m;
    GridSpec g;
    g.n_levels = 1;
    const auto coarse = envelope_eigenstates(c, m, g);
    CHECK(coarse.max_residual <= 1e-8);
    GridSpec fine = g;
    fine.n_radial *= 2;
    fine.n_axial *= 2;
    const auto refined = envelope_eigenstates(c, m, fine);
    CHECK(std::abs(refined.energies(0) - coarse.energies(0)) <= 2e-3 * std::abs(refined.energies(0)));

    // states are normalized with the cylindrical weight
    const Eigen::VectorXd f = coarse.states.col(0);
    double norm = 0.0;
    for (int j = 0; j < g.n_axial; ++j)
        for (int i = 0; i < g.n_radial; ++i)
            norm += f(j * g.n_radial + i) * f(j * g.n_radial + i) * g.radial_node(i) * g.radial_step() * g.axial_step();
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("too coarse a grid for the surface well is rejected") {
    ElectrodeConfig c;
    c.applied_potential = 3.0;
    GridSpec g;
    g.n_axial = 8;
    CHECK_THROWS_AS(envelope_eigenstates(c, EffectiveMass{}, g), std::invalid_argument);
    g.n_axial = 120;
    g.z_min = -1.0;
    CHECK_THROWS_AS(envelope_eigenstates(c, EffectiveMass{}, g), std::invalid_argument);
}

TEST_CASE("gap shift sweep") {
    ElectrodeConfig base;
    const EffectiveMass m;
    GridSpec g;
    const std::vector<double> vs{-1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
    const auto curve = gap_shift(base, m, vs, g);
    REQUIRE(curve.size() == vs.size());
    double last_gap = std::numeric_limits<double>::infinity();
    for (const auto& p : curve) {
        if (p.potential <= 0.0) CHECK(p.cbm_shift == 0.0);
        if (p.potential > 0.0) {
            CHECK(p.cbm_shift > 0.0);
            CHECK(p.nv_shift > p.cbm_shift);
        }
        CHECK(p.gap_shift <= last_gap);
        last_gap = p.gap_shift;
        CHECK(p.gap_shift == doctest::Approx(p.potential == 0.0 ? 0.0 : p.cbm_shift - p.nv_shift));
    }
    CHECK_THROWS_AS(gap_shift(base, m, {0.5, 1.0}, g), std::invalid_argument);
}

TEST_CASE("invalid electrode configuration") {
    ElectrodeConfig c;
    c.electrode_radius = 0.0;
    CHECK_THROWS_AS(nv_level_shift(c), std::invalid_argument);
    c = {};
    c.dielectric_constant = 0.5;
    CHECK_THROWS_AS(dielectric_screening(c), std::invalid_argument);
    c = {};
    c.insulator_thickness = -1.0;
    CHECK_THROWS_AS(potential_at(c, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(validate(EffectiveMass{0.0, 1.0}), std::invalid_argument);
    GridSpec g;
    g.n_radial = 1;
    CHECK_THROWS_AS(validate(g), std::invalid_argument);
}
