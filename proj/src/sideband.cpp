#include "nvscc/sideband.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nvscc {

void validate(const Spectrum& s) {
    if (s.empty()) throw std::invalid_argument("sideband: spectrum is empty");
    if (!std::isfinite(s.start) || !std::isfinite(s.step) || !(s.step > 0.0)) {
        throw std::invalid_argument("sideband: spectrum grid must have a finite positive step");
    }
    if (!s.values.allFinite() || (s.values.array() < 0.0).any()) {
        throw std::invalid_argument("sideband: spectrum values must be finite and non-negative");
    }
}

double integrate(const Spectrum& s) {
    if (s.size() < 2) return 0.0;
    return s.step * (s.values.sum() - 0.5 * (s.values(0) + s.values(s.size() - 1)));
}

Spectrum normalized(const Spectrum& s) {
    const double area = integrate(s);
    if (!(area > 0.0)) throw std::invalid_argument("sideband: cannot normalize a spectrum with zero area");
    Spectrum out = s;
    out.values /= area;
    return out;
}

SpectralMoments moments(const Spectrum& s) {
    validate(s);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(s.size(), s.step);
    if (s.size() >= 2) {
        w(0) *= 0.5;
        w(s.size() - 1) *= 0.5;
    }
    Eigen::VectorXd e(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) e(i) = s.energy(i);
    const Eigen::VectorXd m = w.cwiseProduct(s.values);
    SpectralMoments out;
    out.mass = m.sum();
    if (!(out.mass > 0.0)) throw std::invalid_argument("sideband: moments of a zero spectrum");
    out.mean = m.dot(e) / out.mass;
    out.variance = m.dot((e.array() - out.mean).square().matrix()) / out.mass;
    return out;
}

double value_at(const Spectrum& s, double energy) {
    validate(s);
    const double pos = (energy - s.start) / s.step;
    const double last = static_cast<double>(s.size() - 1);
    constexpr double eps = 1e-9;
    if (!(pos >= -eps && pos <= last + eps)) {
        throw std::out_of_range("sideband: energy outside the spectrum grid");
    }
    const double p = std::clamp(pos, 0.0, last);
    const auto i = static_cast<Eigen::Index>(std::floor(p));
    if (i >= s.size() - 1) return s.values(s.size() - 1);
    const double t = p - static_cast<double>(i);
    return (1.0 - t) * s.values(i) + t * s.values(i + 1);
}

Spectrum shifted(const Spectrum& s, double offset_ev) {
    Spectrum out = s;
    out.start += offset_ev;
    return out;
}

Spectrum resampled(const Spectrum& s, double start, double step, Eigen::Index count) {
    validate(s);
    if (!(step > 0.0) || count < 1) throw std::invalid_argument("sideband: invalid resampling grid");
    Spectrum out{start, step, Eigen::VectorXd::Zero(count)};
    const double lo = s.start;
    const double hi = s.last_energy();
    for (Eigen::Index i = 0; i < count; ++i) {
        const double e = out.energy(i);
        if (e >= lo - 1e-12 * step && e <= hi + 1e-12 * step) out.values(i) = value_at(s, e);
    }
    return out;
}

double bose_einstein(double omega_ev, double temperature_k) {
    if (!(omega_ev > 0.0) || !std::isfinite(omega_ev)) {
        throw std::invalid_argument("sideband: phonon energy must be positive");
    }
    if (!(temperature_k >= 0.0) || !std::isfinite(temperature_k)) {
        throw std::invalid_argument("sideband: temperature must be non-negative");
    }
    if (temperature_k == 0.0) return 0.0;
    return 1.0 / std::expm1(omega_ev / (kBoltzmannEv * temperature_k));
}

namespace {

// Grid offset of s.start in units of s.step; spectra that are combined must
// sit on the common lattice ω = k·step.
Eigen::Index lattice_offset(const Spectrum& s) {
    const double k = s.start / s.step;
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-6) throw std::invalid_argument("sideband: grid start is not a multiple of the step");
    return static_cast<Eigen::Index>(r);
}

}  // namespace

Spectrum one_phonon_band(const Spectrum& f, double temperature_k) {
    validate(f);
    if (!(temperature_k >= 0.0)) throw std::invalid_argument("sideband: temperature must be non-negative");
    const Eigen::Index first = lattice_offset(f);
    if (first < 0) throw std::invalid_argument("sideband: one-phonon density must be defined for ω >= 0 only");
    const Eigen::Index top = first + f.size() - 1;

    Spectrum out{-static_cast<double>(top) * f.step, f.step, Eigen::VectorXd::Zero(2 * top + 1)};
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const Eigen::Index k = first + i;
        const double v = f.values(i);
        if (k == 0) {
            if (v != 0.0 && temperature_k > 0.0) {
                throw std::invalid_argument("sideband: one-phonon density must vanish at ω = 0 for T > 0");
            }
            out.values(top) = v;
            continue;
        }
        const double n = bose_einstein(static_cast<double>(k) * f.step, temperature_k);
        out.values(top + k) = (n + 1.0) * v;
        out.values(top - k) = n * v;
    }
    return out;
}

Spectrum self_convolve(const Spectrum& a, const Spectrum& b) {
    validate(a);
    validate(b);
    if (std::abs(a.step - b.step) > 1e-12 * std::max(a.step, b.step)) {
        throw std::invalid_argument("sideband: convolution needs identical grid spacing");
    }
    const Eigen::Index na = a.size();
    const Eigen::Index nb = b.size();
    Spectrum out{a.start + b.start, a.step, Eigen::VectorXd::Zero(na + nb - 1)};
    for (Eigen::Index i = 0; i < na; ++i) {
        const double ai = a.values(i);
        if (ai == 0.0) continue;
        out.values.segment(i, nb) += ai * b.values;
    }
    out.values *= a.step;
    return out;
}

void validate(const HuangRhysParams& p) {
    if (!(p.huang_rhys > 0.0) || !std::isfinite(p.huang_rhys)) {
        throw std::invalid_argument("sideband: Huang-Rhys factor must be positive");
    }
    if (!(p.temperature >= 0.0) || !std::isfinite(p.temperature)) {
        throw std::invalid_argument("sideband: temperature must be non-negative");
    }
    if (p.n_max < 1) throw std::invalid_argument("sideband: n_max must be at least 1");
}

double effective_huang_rhys(const Spectrum& f, const HuangRhysParams& p) {
    validate(p);
    const Spectrum fhat = normalized(f);
    const Eigen::Index first = lattice_offset(fhat);
    Spectrum weighted = fhat;
    for (Eigen::Index i = 0; i < fhat.size(); ++i) {
        const Eigen::Index k = first + i;
        if (k <= 0 || fhat.values(i) == 0.0) continue;
        weighted.values(i) *= 2.0 * bose_einstein(static_cast<double>(k) * f.step, p.temperature) + 1.0;
    }
    return p.huang_rhys * integrate(weighted);
}

double truncated_poisson_mass(double s, int n_max) {
    double term = 1.0;
    double sum = 0.0;
    for (int i = 1; i <= n_max; ++i) {
        term *= s / i;
        sum += term;
    }
    return std::exp(-s) * sum;
}

Spectrum sideband(const Spectrum& f, const HuangRhysParams& p) {
    validate(f);
    validate(p);
    if (std::abs(integrate(f) - 1.0) > 1e-6) {
        throw std::invalid_argument("sideband: one-phonon density must have unit area");
    }
    const double s_t = effective_huang_rhys(f, p);
    const Spectrum band = normalized(one_phonon_band(f, p.temperature));
    const Eigen::Index half = (band.size() - 1) / 2;

    Spectrum out{-static_cast<double>(p.n_max * half) * f.step, f.step,
                 Eigen::VectorXd::Zero(2 * p.n_max * half + 1)};
    Spectrum order = band;
    double weight = std::exp(-s_t);
    for (int i = 1; i <= p.n_max; ++i) {
        if (i > 1) order = normalized(self_convolve(order, band));
        weight *= s_t / i;
        const Eigen::Index offset = (p.n_max - i) * half;
        out.values.segment(offset, order.size()) += weight * order.values;
    }
    return out;
}

double thz_to_ev(double thz) { return kPlanckEvS * thz * 1e12; }

Spectrum add_zpl(const Spectrum& s, const ZplParams& zpl) {
    validate(s);
    if (!(zpl.fwhm > 0.0) || !std::isfinite(zpl.fwhm)) throw std::invalid_argument("sideband: ZPL width must be positive");
    if (!(zpl.weight >= 0.0) || !std::isfinite(zpl.weight)) {
        throw std::invalid_argument("sideband: ZPL weight must be non-negative");
    }
    if (!(zpl.center >= s.start && zpl.center <= s.last_energy())) {
        throw std::out_of_range("sideband: ZPL center outside the spectrum grid");
    }
    if (zpl.weight == 0.0) return s;
    const double gamma = 0.5 * zpl.fwhm;
    Spectrum peak{s.start, s.step, Eigen::VectorXd(s.size())};
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double d = s.energy(i) - zpl.center;
        peak.values(i) = gamma / std::numbers::pi / (d * d + gamma * gamma);
    }
    Spectrum out = s;
    out.values += zpl.weight / integrate(peak) * peak.values;
    return out;
}

double cross_section_ratio(const Spectrum& absorption, const Spectrum& photoionization, double energy_ev) {
    const double a = value_at(absorption, energy_ev);
    const double b = value_at(photoionization, energy_ev);
    if (!(a > 0.0)) throw std::domain_error("sideband: absorption vanishes at the requested energy");
    return b / a;
}

Spectrum synthetic_one_phonon(double step_ev) {
    if (!(step_ev > 0.0)) throw std::invalid_argument("sideband: step must be positive");
    constexpr double cutoff = 0.170;
    const auto count = static_cast<Eigen::Index>(std::floor(cutoff / step_ev + 1e-9)) + 1;
    Spectrum f{0.0, step_ev, Eigen::VectorXd(count)};
    const auto gauss = [](double x, double mu, double w) { return std::exp(-0.5 * (x - mu) * (x - mu) / (w * w)); };
    for (Eigen::Index i = 0; i < count; ++i) {
        const double w = f.energy(i);
        const double onset = 1.0 - std::exp(-(w / 0.02) * (w / 0.02));
        const double edge = std::max(0.0, 1.0 - (w / cutoff) * (w / cutoff));
        f.values(i) = (0.6 * gauss(w, 0.065, 0.012) + 0.4 * gauss(w, 0.140, 0.015)) * onset * edge * edge;
    }
    return normalized(f);
}

}  // namespace nvscc
