// rate_model.hpp: six-level NV⁻ rate equations evolved by matrix exponentials.
//
// Level ordering used throughout:
//   0  ³A₂ ms=0      1  ³A₂ ms=±1
//   2  ³E  ms=0      3  ³E  ms=±1
//   4  ¹E  singlet   5  ²E + e⁻ (ionized, absorbing)
//
// Units: rates in MHz, times in µs, so rate·time is dimensionless.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace nvscc {

inline constexpr int kNumLevels = 6;

enum Level : int {
    kGroundMs0 = 0,
    kGroundMs1 = 1,
    kExcitedMs0 = 2,
    kExcitedMs1 = 3,
    kSinglet = 4,
    kIonized = 5,
};

template <typename Scalar>
using Populations = Eigen::Matrix<Scalar, kNumLevels, 1>;

template <typename Scalar>
using Generator = Eigen::Matrix<Scalar, kNumLevels, kNumLevels>;

/// Intrinsic radiative and intersystem-crossing rates (MHz).
template <typename Scalar>
struct NvRates {
    Scalar radiative{65.3};
    Scalar upper_isc_0{6.7};
    Scalar upper_isc_pm{53.0};
    Scalar lower_isc_0{2.38};
    Scalar lower_isc_pm{0.35};
};

/// One constant-illumination interval of a pulse sequence.
template <typename Scalar>
struct PulseSegment {
    Scalar excitation{0};  // X, MHz
    Scalar ionization{0};  // I, MHz
    Scalar sigma{0};       // σ = σ_I/σ_A, enters as σ·X
    Scalar duration{0};    // µs
};

template <typename Scalar>
using PulseSequence = std::vector<PulseSegment<Scalar>>;

namespace detail {

template <typename Scalar>
void require_rate(Scalar v, const char* what) {
    using std::isfinite;
    if (!isfinite(v) || v < Scalar(0)) {
        throw std::invalid_argument(std::string("rate_model: ") + what +
                                    " must be finite and non-negative");
    }
}

}  // namespace detail

template <typename Scalar>
void validate(const NvRates<Scalar>& r) {
    detail::require_rate(r.radiative, "radiative rate");
    detail::require_rate(r.upper_isc_0, "upper ISC rate (ms=0)");
    detail::require_rate(r.upper_isc_pm, "upper ISC rate (ms=±1)");
    detail::require_rate(r.lower_isc_0, "lower ISC rate (ms=0)");
    detail::require_rate(r.lower_isc_pm, "lower ISC rate (ms=±1)");
}

template <typename Scalar>
void validate(const PulseSegment<Scalar>& s) {
    detail::require_rate(s.excitation, "excitation rate");
    detail::require_rate(s.ionization, "ionization rate");
    detail::require_rate(s.sigma, "sigma");
    detail::require_rate(s.duration, "segment duration");
}

/// Throws unless every entry lies in [-tol, 1+tol] and the entries sum to 1 within tol.
template <typename Scalar>
void validate(const Populations<Scalar>& p, Scalar tol = Scalar(1e-10)) {
    using std::abs;
    using std::isfinite;
    for (int i = 0; i < kNumLevels; ++i) {
        if (!isfinite(p(i)) || p(i) < -tol || p(i) > Scalar(1) + tol) {
            throw std::invalid_argument("rate_model: population entry outside [0,1]");
        }
    }
    if (abs(p.sum() - Scalar(1)) > tol) {
        throw std::invalid_argument("rate_model: populations do not sum to 1");
    }
}

template <typename Scalar>
Populations<Scalar> basis_state(Level level) {
    Populations<Scalar> p = Populations<Scalar>::Zero();
    p(level) = Scalar(1);
    return p;
}

/// Transition-rate matrix for one segment; dP/dt = M·P.
template <typename Scalar>
Generator<Scalar> build_generator(const NvRates<Scalar>& rates, const PulseSegment<Scalar>& seg) {
    validate(rates);
    validate(seg);
    const Scalar X = seg.excitation;
    const Scalar I = seg.ionization;
    const Scalar sX = seg.sigma * seg.excitation;
    const Scalar R = rates.radiative;
    const Scalar U0 = rates.upper_isc_0;
    const Scalar Upm = rates.upper_isc_pm;
    const Scalar L0 = rates.lower_isc_0;
    const Scalar Lpm = rates.lower_isc_pm;

    Generator<Scalar> m = Generator<Scalar>::Zero();
    m(0, 0) = -X;
    m(0, 2) = R;
    m(0, 4) = L0;

    m(1, 1) = -X;
    m(1, 3) = R;
    m(1, 4) = Lpm;

    m(2, 0) = X;
    m(2, 2) = -(R + U0 + sX);

    m(3, 1) = X;
    m(3, 3) = -(R + Upm + sX);

    m(4, 2) = U0;
    m(4, 3) = Upm;
    m(4, 4) = -(L0 + Lpm + I);

    m(5, 2) = sX;
    m(5, 3) = sX;
    m(5, 4) = I;
    return m;
}

/// e^{M t}; the propagator for a constant generator over duration t (µs).
template <typename Scalar>
Generator<Scalar> propagator(const Generator<Scalar>& g, Scalar t) {
    using std::isfinite;
    if (!isfinite(t) || t < Scalar(0)) {
        throw std::invalid_argument("rate_model: evolution time must be finite and non-negative");
    }
    if (t == Scalar(0)) return Generator<Scalar>::Identity();
    Generator<Scalar> scaled = g * t;
    return scaled.exp();
}

template <typename Scalar>
Populations<Scalar> evolve(const Generator<Scalar>& g, const Populations<Scalar>& p0, Scalar t) {
    validate(p0);
    return propagator(g, t) * p0;
}

/// Product of segment propagators, first segment applied first.
template <typename Scalar>
Generator<Scalar> sequence_propagator(const NvRates<Scalar>& rates, const PulseSequence<Scalar>& seq) {
    if (seq.empty()) throw std::invalid_argument("rate_model: pulse sequence is empty");
    Generator<Scalar> total = Generator<Scalar>::Identity();
    for (const auto& seg : seq) {
        total = propagator(build_generator(rates, seg), seg.duration) * total;
    }
    return total;
}

template <typename Scalar>
Populations<Scalar> run_sequence(const NvRates<Scalar>& rates, const PulseSequence<Scalar>& seq,
                                 const Populations<Scalar>& p0) {
    validate(p0);
    if (seq.empty()) throw std::invalid_argument("rate_model: pulse sequence is empty");
    Populations<Scalar> p = p0;
    for (const auto& seg : seq) {
        p = propagator(build_generator(rates, seg), seg.duration) * p;
    }
    return p;
}

/// Initial states after spin preparation. `init_mixing` is the probability of
/// preparing the wrong spin projection (0 = perfect initialization).
template <typename Scalar>
struct SpinInitialStates {
    Populations<Scalar> ms0;
    Populations<Scalar> ms1;
};

template <typename Scalar>
SpinInitialStates<Scalar> spin_initial_states(Scalar init_mixing = Scalar(0)) {
    if (!(init_mixing >= Scalar(0) && init_mixing <= Scalar(1))) {
        throw std::invalid_argument("rate_model: init_mixing must lie in [0,1]");
    }
    const auto a = basis_state<Scalar>(kGroundMs0);
    const auto b = basis_state<Scalar>(kGroundMs1);
    return {(Scalar(1) - init_mixing) * a + init_mixing * b,
            (Scalar(1) - init_mixing) * b + init_mixing * a};
}

/// C = P₆(ms=±1) − P₆(ms=0) after the full sequence.
template <typename Scalar>
Scalar contrast(const NvRates<Scalar>& rates, const PulseSequence<Scalar>& seq,
                Scalar init_mixing = Scalar(0)) {
    const auto init = spin_initial_states(init_mixing);
    const Generator<Scalar> u = sequence_propagator(rates, seq);
    return (u * init.ms1)(kIonized) - (u * init.ms0)(kIonized);
}

using NvRatesd = NvRates<double>;
using PulseSegmentd = PulseSegment<double>;
using PulseSequenced = PulseSequence<double>;
using Populationsd = Populations<double>;
using Generatord = Generator<double>;

}  // namespace nvscc
