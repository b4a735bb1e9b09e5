// sideband.hpp: Huang-Rhys vibronic absorption sidebands on uniform energy grids.
#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace nvscc {

inline constexpr double kBoltzmannEv = 8.617333262e-5;  // eV/K
inline constexpr double kPlanckEvS = 4.135667696e-15;   // eV·s
inline constexpr double kZplEnergyEv = 1.945;           // 637 nm

/// Non-negative density sampled at start + i·step (eV).
struct Spectrum {
    double start = 0.0;
    double step = 1.0;
    Eigen::VectorXd values;

    Eigen::Index size() const { return values.size(); }
    double energy(Eigen::Index i) const { return start + static_cast<double>(i) * step; }
    double last_energy() const { return energy(size() - 1); }
    bool empty() const { return values.size() == 0; }
};

void validate(const Spectrum& s);

/// Trapezoid rule, the canonical quadrature for spectra.
double integrate(const Spectrum& s);
Spectrum normalized(const Spectrum& s);

struct SpectralMoments {
    double mass = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};
SpectralMoments moments(const Spectrum& s);

/// Linear interpolation; throws outside [start, last_energy].
double value_at(const Spectrum& s, double energy);
Spectrum shifted(const Spectrum& s, double offset_ev);
/// Linear resampling onto start + i·step, zero outside the source support.
Spectrum resampled(const Spectrum& s, double start, double step, Eigen::Index count);

double bose_einstein(double omega_ev, double temperature_k);

/// Two-sided one-phonon band: (n+1)·f(ω) for ω > 0, n(−ω)·f(−ω) for ω < 0, on
/// the symmetric grid −ω_max … ω_max with f's spacing.
Spectrum one_phonon_band(const Spectrum& f, double temperature_k);

/// Discrete convolution scaled by the grid spacing.
Spectrum self_convolve(const Spectrum& a, const Spectrum& b);

struct HuangRhysParams {
    double huang_rhys = 3.49;  // S at 0 K
    double temperature = 0.0;  // K
    int n_max = 8;
};
void validate(const HuangRhysParams& p);

/// S(T) = S(0)·∫(2n+1)·f̂ dω with f̂ the unit-area one-phonon density.
double effective_huang_rhys(const Spectrum& f, const HuangRhysParams& p);

/// Truncated Poisson mass e^{−S} Σ_{i=1..n_max} S^i/i!.
double truncated_poisson_mass(double s, int n_max);

/// F(ω,T) = e^{−S_T} Σ_{i=1..n_max} S_T^i/i! F̂_i, on the detuning axis, where
/// each F̂_i is the unit-area i-fold convolution of the one-phonon band.
/// Requires ∫f = 1 within 1e-6.
Spectrum sideband(const Spectrum& f, const HuangRhysParams& p);

struct ZplParams {
    double center = kZplEnergyEv;
    double fwhm = kPlanckEvS * 1e12;  // 1 THz
    double weight = 0.0;
};

double thz_to_ev(double thz);

/// Adds a Lorentzian of the given FWHM whose trapezoid integral over the grid
/// equals `weight`.
Spectrum add_zpl(const Spectrum& s, const ZplParams& zpl);

/// photoionization(E) / absorption(E), both linearly interpolated.
double cross_section_ratio(const Spectrum& absorption, const Spectrum& photoionization, double energy_ev);

/// Synthetic one-phonon density on 0–170 meV: acoustic onset with a 65 meV
/// quasi-local peak and a 140 meV optical-band peak; unit area.
Spectrum synthetic_one_phonon(double step_ev = 0.5e-3);

}  // namespace nvscc
