#include "nvscc/electrode.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace nvscc {

void validate(const ElectrodeConfig& c) {
    if (!std::isfinite(c.applied_potential)) throw std::invalid_argument("electrode: applied potential must be finite");
    if (!(c.electrode_radius > 0.0) || !std::isfinite(c.electrode_radius)) {
        throw std::invalid_argument("electrode: electrode radius must be positive");
    }
    if (!(c.nv_depth > 0.0) || !std::isfinite(c.nv_depth)) throw std::invalid_argument("electrode: NV depth must be positive");
    if (!(c.dielectric_constant > 1.0) || !std::isfinite(c.dielectric_constant)) {
        throw std::invalid_argument("electrode: dielectric constant must exceed 1");
    }
    if (!(c.insulator_thickness >= 0.0) || !std::isfinite(c.insulator_thickness)) {
        throw std::invalid_argument("electrode: insulator thickness must be non-negative");
    }
}

void validate(const EffectiveMass& m) {
    if (!(m.longitudinal > 0.0) || !(m.transverse > 0.0) || !std::isfinite(m.longitudinal) ||
        !std::isfinite(m.transverse)) {
        throw std::invalid_argument("electrode: effective masses must be positive");
    }
}

double potential_at(const ElectrodeConfig& c, double r, double z) {
    validate(c);
    if (!(z >= 0.0) || !std::isfinite(z) || !std::isfinite(r)) {
        throw std::invalid_argument("electrode: evaluation point must lie inside the diamond (z >= 0)");
    }
    if (c.applied_potential == 0.0) return 0.0;
    const double a = c.electrode_radius;
    const double rho = std::abs(r);
    const double h = z + c.insulator_thickness;
    const double d1 = std::hypot(rho - a, h);
    const double d2 = std::hypot(rho + a, h);
    const double arg = std::min(1.0, 2.0 * a / (d1 + d2));
    return 2.0 * c.applied_potential / std::numbers::pi * std::asin(arg);
}

double nv_level_shift(const ElectrodeConfig& c) { return potential_at(c, 0.0, c.nv_depth); }

double dielectric_screening(const ElectrodeConfig& c) {
    validate(c);
    return 2.0 / (1.0 + c.dielectric_constant);
}

void validate(const GridSpec& g) {
    if (!(g.r_max > 0.0) || !(g.z_max > g.z_min) || !std::isfinite(g.r_max) || !std::isfinite(g.z_min) ||
        !std::isfinite(g.z_max)) {
        throw std::invalid_argument("electrode: grid extents are invalid");
    }
    if (g.n_radial < 2 || g.n_axial < 2) throw std::invalid_argument("electrode: grid needs at least 2 nodes per axis");
    if (g.n_levels < 1 || g.n_levels > g.n_radial * g.n_axial) {
        throw std::invalid_argument("electrode: requested level count does not fit the grid");
    }
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Symmetrized operator W^{1/2}·H·W^{-1/2} with W = diag(r_i).
SpMat build_operator(const PotentialEnergy& potential, const EffectiveMass& mass, const GridSpec& g,
                     double& min_potential) {
    const int nr = g.n_radial;
    const int nz = g.n_axial;
    const double hr = g.radial_step();
    const double hz = g.axial_step();
    const double ct = kHbar2Over2MeEvNm2 / mass.transverse;
    const double cl = kHbar2Over2MeEvNm2 / mass.longitudinal;

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(nr) * nz * 5);
    min_potential = std::numeric_limits<double>::infinity();
    const auto idx = [nr](int i, int j) { return j * nr + i; };
    for (int j = 0; j < nz; ++j) {
        const double z = g.axial_node(j);
        for (int i = 0; i < nr; ++i) {
            const double r = g.radial_node(i);
            const double u = potential(r, z);
            if (!std::isfinite(u)) throw std::invalid_argument("electrode: potential energy is not finite on the grid");
            min_potential = std::min(min_potential, u);
            const double r_out = (i + 1) * hr;
            const double r_in = i * hr;
            const double diag = ct * (r_out + r_in) / (r * hr * hr) + 2.0 * cl / (hz * hz) + u;
            trips.emplace_back(idx(i, j), idx(i, j), diag);
            if (i + 1 < nr) {
                const double off = -ct * r_out / (hr * hr * std::sqrt(r * g.radial_node(i + 1)));
                trips.emplace_back(idx(i, j), idx(i + 1, j), off);
                trips.emplace_back(idx(i + 1, j), idx(i, j), off);
            }
            if (j + 1 < nz) {
                trips.emplace_back(idx(i, j), idx(i, j + 1), -cl / (hz * hz));
                trips.emplace_back(idx(i, j + 1), idx(i, j), -cl / (hz * hz));
            }
        }
    }
    SpMat s(nr * nz, nr * nz);
    s.setFromTriplets(trips.begin(), trips.end());
    s.makeCompressed();
    return s;
}

}  // namespace

EnvelopeSolution solve_envelope(const PotentialEnergy& potential, const EffectiveMass& mass, const GridSpec& grid) {
    validate(mass);
    validate(grid);
    double umin = 0.0;
    const SpMat h = build_operator(potential, mass, grid, umin);
    const Eigen::Index n = h.rows();
    const int k = grid.n_levels;
    const Eigen::Index b = std::min<Eigen::Index>(n, k + 6);
    constexpr double tol = 1e-10;
    constexpr int max_iterations = 2000;

    SpMat id(n, n);
    id.setIdentity();
    // T is positive definite under Dirichlet walls, so H − min(U) is too.
    double shift = umin - 1e-9 * (1.0 + std::abs(umin));
    Eigen::SimplicialLDLT<SpMat> solver(h - shift * id);
    if (solver.info() != Eigen::Success) throw std::runtime_error("electrode: factorization of the shifted operator failed");

    std::mt19937_64 rng(12345);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd q(n, b);
    for (Eigen::Index c = 0; c < b; ++c)
        for (Eigen::Index r = 0; r < n; ++r) q(r, c) = gauss(rng);

    Eigen::VectorXd theta;
    Eigen::VectorXd res;
    int it = 0;
    for (; it < max_iterations; ++it) {
        Eigen::MatrixXd y = solver.solve(q);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
        q = qr.householderQ() * Eigen::MatrixXd::Identity(n, b);
        const Eigen::MatrixXd hq = h * q;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.transpose() * hq);
        theta = es.eigenvalues();
        q = q * es.eigenvectors();
        const Eigen::MatrixXd r = hq * es.eigenvectors() - q * theta.asDiagonal();
        res = r.colwise().norm().transpose();
        if (res.head(k).maxCoeff() <= tol) break;
        // Move the shift up under the lowest Ritz value to sharpen convergence
        // inside clusters of nearly degenerate levels.
        if (it % 8 == 7) {
            const double next = theta(0) - std::max(res(0), 0.1 * (theta(b - 1) - theta(0)));
            if (next > shift) {
                shift = next;
                solver.compute(h - shift * id);
                if (solver.info() != Eigen::Success) throw std::runtime_error("electrode: refactorization failed");
            }
        }
    }
    if (it == max_iterations) throw std::runtime_error("electrode: envelope eigensolve did not converge");

    EnvelopeSolution out;
    out.grid = grid;
    out.energies = theta.head(k);
    out.max_residual = res.head(k).maxCoeff();
    out.iterations = it + 1;
    out.states.resize(n, k);
    const double cell = std::sqrt(grid.radial_step() * grid.axial_step());
    for (int c = 0; c < k; ++c) {
        Eigen::VectorXd u = q.col(c) / cell;
        for (int j = 0; j < grid.n_axial; ++j)
            for (int i = 0; i < grid.n_radial; ++i) u(j * grid.n_radial + i) /= std::sqrt(grid.radial_node(i));
        out.states.col(c) = u;
    }
    return out;
}

double surface_decay_length(const ElectrodeConfig& c, const EffectiveMass& mass) {
    validate(c);
    validate(mass);
    if (!(c.applied_potential > 0.0)) return std::numeric_limits<double>::infinity();
    const double a = c.electrode_radius;
    const double t = c.insulator_thickness;
    const double field = dielectric_screening(c) * 2.0 * c.applied_potential / std::numbers::pi * a / (a * a + t * t);
    return std::cbrt(kHbar2Over2MeEvNm2 / mass.longitudinal / field);
}

EnvelopeSolution envelope_eigenstates(const ElectrodeConfig& c, const EffectiveMass& mass, const GridSpec& grid) {
    validate(c);
    validate(grid);
    if (grid.z_min < 0.0) throw std::invalid_argument("electrode: envelope grid must lie inside the diamond (z_min >= 0)");
    const double decay = surface_decay_length(c, mass);
    if (grid.axial_step() * 3.0 > decay) {
        throw std::invalid_argument("electrode: axial grid too coarse for the surface decay length (need >= 3 nodes)");
    }
    const double screen = dielectric_screening(c);
    const ElectrodeConfig cfg = c;
    return solve_envelope([cfg, screen](double r, double z) { return -screen * potential_at(cfg, r, z); }, mass, grid);
}

std::vector<GapShiftPoint> gap_shift(const ElectrodeConfig& base, const EffectiveMass& mass,
                                     const std::vector<double>& potentials, const GridSpec& grid) {
    validate(base);
    if (std::find(potentials.begin(), potentials.end(), 0.0) == potentials.end()) {
        throw std::invalid_argument("electrode: potential sweep must include 0");
    }
    GridSpec ground = grid;
    ground.n_levels = 1;
    ElectrodeConfig flat = base;
    flat.applied_potential = 0.0;
    double flat_level = std::numeric_limits<double>::quiet_NaN();

    std::vector<GapShiftPoint> out;
    for (double v : potentials) {
        ElectrodeConfig c = base;
        c.applied_potential = v;
        GapShiftPoint p;
        p.potential = v;
        p.nv_shift = nv_level_shift(c);
        if (v > 0.0) {
            if (std::isnan(flat_level)) flat_level = envelope_eigenstates(flat, mass, ground).energies(0);
            p.cbm_shift = flat_level - envelope_eigenstates(c, mass, ground).energies(0);
        }
        p.gap_shift = (v == 0.0) ? 0.0 : p.cbm_shift - p.nv_shift;
        out.push_back(p);
    }
    return out;
}

}  // namespace nvscc
