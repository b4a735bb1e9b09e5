// electrode.hpp: electrode potential, NV level shift and effective-mass
// conduction-band envelope states.
//
// Lengths in nm, potentials in V, energies in eV.
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace nvscc {

inline constexpr double kHbar2Over2MeEvNm2 = 0.0380998212;  // ħ²/2mₑ in eV·nm²

struct ElectrodeConfig {
    double applied_potential = 0.0;    // V
    double electrode_radius = 100.0;   // nm
    double nv_depth = 10.0;            // nm below the diamond surface
    double dielectric_constant = 5.7;  // diamond
    double insulator_thickness = 0.0;  // nm; stand-off between disc and diamond surface
};

void validate(const ElectrodeConfig& c);

/// Anisotropic conduction-valley mass (units of mₑ); the longitudinal axis is
/// the surface normal.
struct EffectiveMass {
    double longitudinal = 1.56;
    double transverse = 0.28;
};

void validate(const EffectiveMass& m);

/// Conducting disc held at the applied potential, evaluated at radial offset r
/// and depth z below the diamond surface. The interface outside the disc is a
/// symmetry plane of the free-space solution, so the potential does not depend
/// on the dielectric constant.
double potential_at(const ElectrodeConfig& c, double r, double z);

/// Rigid shift of the NV levels, e·V at the defect site (positive V raises the levels).
double nv_level_shift(const ElectrodeConfig& c);

/// Macroscopic screening 2/(1+ε) applied to the potential felt by the
/// delocalized conduction-band envelope.
double dielectric_screening(const ElectrodeConfig& c);

/// Cylindrical (r, z) finite-difference grid, azimuthal m = 0 sector.
/// Radial nodes are cell-centred, r_i = (i+½)·h_r with the wall at r_max;
/// axial nodes are interior to [z_min, z_max]. All walls are Dirichlet.
struct GridSpec {
    double r_max = 200.0;
    double z_min = 0.0;
    double z_max = 40.0;
    int n_radial = 60;
    int n_axial = 120;
    int n_levels = 4;

    double radial_step() const { return r_max / (n_radial + 0.5); }
    double axial_step() const { return (z_max - z_min) / (n_axial + 1); }
    double radial_node(int i) const { return (i + 0.5) * radial_step(); }
    double axial_node(int j) const { return z_min + (j + 1) * axial_step(); }
};

void validate(const GridSpec& g);

struct EnvelopeSolution {
    Eigen::VectorXd energies;  // ascending, eV
    Eigen::MatrixXd states;    // one column per level, indexed j·n_radial + i; Σ F² r Δr Δz = 1
    GridSpec grid;
    double max_residual = 0.0; // max ‖(T+V)F − E·F‖ over returned levels
    int iterations = 0;
};

using PotentialEnergy = std::function<double(double r, double z)>;

/// Lowest grid.n_levels eigenpairs of T + U for an arbitrary potential energy U (eV).
EnvelopeSolution solve_envelope(const PotentialEnergy& potential, const EffectiveMass& mass, const GridSpec& grid);

/// Envelope states in the electrode well U = −screening·e·φ(r, z). The grid
/// must resolve the surface decay length with at least three axial nodes.
EnvelopeSolution envelope_eigenstates(const ElectrodeConfig& c, const EffectiveMass& mass, const GridSpec& grid = {});

/// Characteristic decay length (c_l/F)^{1/3} of the surface-bound envelope,
/// with F the screened surface field on axis; +inf when V <= 0.
double surface_decay_length(const ElectrodeConfig& c, const EffectiveMass& mass);

struct GapShiftPoint {
    double potential = 0.0;
    double nv_shift = 0.0;
    double cbm_shift = 0.0;
    double gap_shift = 0.0;
};

/// ΔE_gap(V) = ΔE_CBM − ΔE_NV. For V > 0 the CBM shift is the depth of the
/// confined ground level below the flat-band ground level on the same grid;
/// for V <= 0 the CBM is left unshifted.
std::vector<GapShiftPoint> gap_shift(const ElectrodeConfig& base, const EffectiveMass& mass,
                                     const std::vector<double>& potentials, const GridSpec& grid = {});

}  // namespace nvscc
