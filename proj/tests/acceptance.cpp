// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
#include "nvscc/cli.hpp"
#include "nvscc/csv.hpp"
#include "nvscc/electrode.hpp"
#include "nvscc/protocol.hpp"
#include "nvscc/rate_model.hpp"
#include "nvscc/sideband.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

using namespace nvscc;
namespace fs = std::filesystem;

namespace {

constexpr double kContrastTol = 0.03;
constexpr double kFourRunGainMax = 0.01;
constexpr double kSigmaEnvelopeSlack = 1e-3;
constexpr double kClosedFormTol = 1e-9;
constexpr double kRoundingTol = 0.005;  // half a unit in the last quoted digit
constexpr double kRk4Tol = 1e-8;
constexpr double kConservationTol = 1e-10;
constexpr double kColumnSumTol = 1e-12;
constexpr double kDetailedBalanceTol = 1e-9;
constexpr double kMassTol = 1e-6;
constexpr double kRatioRelTol = 0.15;
constexpr double kOracleRelTol = 1e-3;
constexpr double kSingleRunSeconds = 120.0;
constexpr double kReproduceSeconds = 900.0;

int failures = 0;

void report(int id, bool pass, const std::string& what) {
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << what << std::endl;
    if (!pass) ++failures;
}

void report_skip(int id, const std::string& what) { std::cout << "SKIP  criterion " << id << ": " << what << std::endl; }

std::string fmt(double v) { return io::format_number(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool near(double got, double want, double tol) { return std::abs(got - want) <= tol; }

Populationsd rk4(const Generatord& m, Populationsd p, double t, int steps) {
    const double h = t / steps;
    for (int s = 0; s < steps; ++s) {
        const Populationsd k1 = m * p;
        const Populationsd k2 = m * (p + 0.5 * h * k1);
        const Populationsd k3 = m * (p + 0.5 * h * k2);
        const Populationsd k4 = m * (p + h * k3);
        p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return p;
}

double poisson_mass(double s, int n_max) {
    double sum = 0.0;
    for (int n = 1; n <= n_max; ++n) sum += std::pow(s, n) / std::tgamma(n + 1.0);
    return std::exp(-s) * sum;
}

void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const OptimizationResult r = optimize_contrast(ProtocolSpec::electrode_scc());
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << "single-run optimum " << fmt(r.best_contrast) << " vs 0.33 +/- " << kContrastTol << ", " << fmt(secs)
       << " s (limit " << kSingleRunSeconds << " s)";
    report(1, near(r.best_contrast, 0.33, kContrastTol) && secs < kSingleRunSeconds, os.str());
}

void criterion2() {
    const double c3 = optimize_contrast(ProtocolSpec::repeated_scc(3)).best_contrast;
    const double c4 = optimize_contrast(ProtocolSpec::repeated_scc(4)).best_contrast;
    const double gain = c4 - c3;
    std::ostringstream os;
    os << "three-run optimum " << fmt(c3) << " vs 0.42 +/- " << kContrastTol << "; four-run gain " << fmt(gain)
       << " (must be < " << kFourRunGainMax << ")";
    report(2, near(c3, 0.42, kContrastTol) && gain < kFourRunGainMax, os.str());
}

void criterion3() {
    const ProtocolSpec s = ProtocolSpec::jaskula();
    const OptimizationResult r = optimize_contrast(s);
    std::ostringstream os;
    os << "Jaskula optimum " << fmt(r.best_contrast) << " vs 0.37 +/- " << kContrastTol << " (sigma_pump "
       << s.sigma_pump << ", sigma_ion " << s.sigma_ion << ", I = 0)";
    report(3, near(r.best_contrast, 0.37, kContrastTol), os.str());
}

void criterion4() {
    const std::vector<double> sigmas{0.0, 0.05, 0.1, 0.15, 0.2, 0.26, 0.3, 0.4, 0.5};
    const auto one = sigma_sweep(ProtocolSpec::electrode_scc(), sigmas);
    const auto three = sigma_sweep(ProtocolSpec::repeated_scc(3), sigmas);
    double rise = -1.0;
    for (const auto* curve : {&one, &three})
        for (std::size_t i = 1; i < curve->size(); ++i)
            rise = std::max(rise, (*curve)[i].result.best_contrast - (*curve)[i - 1].result.best_contrast);
    const double c1 = one.front().result.best_contrast;
    const double c3 = three.front().result.best_contrast;
    std::ostringstream os;
    os << "sigma=0 single-run " << fmt(c1) << " vs 0.58, three-run " << fmt(c3) << " vs 0.61 (+/- " << kContrastTol
       << "); largest rise along sigma " << fmt(rise) << " (must be <= " << kSigmaEnvelopeSlack << ")";
    report(4, near(c1, 0.58, kContrastTol) && near(c3, 0.61, kContrastTol) && rise <= kSigmaEnvelopeSlack, os.str());
}

void criterion5() {
    const double a = sensitivity_improvement(0.25, 0.61);
    const double b = sensitivity_improvement(0.25, 0.42);
    // reference values from exact rational arithmetic: 4 - 100/61 and 4 - 50/21
    const double a_exact = 144.0 / 61.0;
    const double b_exact = 34.0 / 21.0;
    const bool closed_form = near(a, a_exact, kClosedFormTol) && near(b, b_exact, kClosedFormTol);
    const bool quoted = near(a, 2.36, kRoundingTol) && near(b, 1.62, kRoundingTol);
    std::ostringstream os;
    os << "1/C_ref - 1/C_new = " << fmt(a) << " for (0.25, 0.61) and " << fmt(b)
       << " for (0.25, 0.42); closed form within " << kClosedFormTol << ", rounds to 2.36 / 1.62";
    report(5, closed_form && quoted, os.str());
}

void criterion6() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> x(0.0, 500.0), ion(0.0, 5000.0), sig(0.0, 1.0), dur(0.01, 0.5), u(0.0, 1.0);
    const NvRatesd rates;
    double worst_rk4 = 0.0, worst_sum = 0.0, worst_col = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const PulseSegmentd seg{x(rng), ion(rng), sig(rng), dur(rng)};
        const Generatord m = build_generator(rates, seg);
        Populationsd p0;
        for (int k = 0; k < kNumLevels; ++k) p0(k) = u(rng);
        p0 /= p0.sum();
        const int steps = 10000;  // dt = 1e-4 × duration
        const Populationsd ref = rk4(m, p0, seg.duration, steps);
        const Populationsd got = evolve(m, p0, seg.duration);
        worst_rk4 = std::max(worst_rk4, (got - ref).cwiseAbs().maxCoeff());
        worst_sum = std::max(worst_sum, std::abs(got.sum() - 1.0));
        worst_col = std::max(worst_col, m.colwise().sum().cwiseAbs().maxCoeff());
    }
    std::ostringstream os;
    os << "100 random segments: max |expm - RK4| " << fmt(worst_rk4) << ", max |sum - 1| " << fmt(worst_sum)
       << ", max |column sum| " << fmt(worst_col);
    report(6, worst_rk4 <= kRk4Tol && worst_sum <= kConservationTol && worst_col <= kColumnSumTol, os.str());
}

void criterion7() {
    const Spectrum f = synthetic_one_phonon();
    double worst_balance = 0.0;
    for (double t : {100.0, 300.0}) {
        const Spectrum band = one_phonon_band(f, t);
        const Eigen::Index mid = (band.size() - 1) / 2;
        for (Eigen::Index k = 1; k <= mid; ++k) {
            if (band.values(mid + k) == 0.0) continue;
            const double expect = std::exp(-band.energy(mid + k) / (kBoltzmannEv * t)) * band.values(mid + k);
            worst_balance = std::max(worst_balance, std::abs(band.values(mid - k) - expect) / expect);
        }
    }
    const double mass = integrate(sideband(f, {3.49, 0.0, 8}));
    const double mass_ref = poisson_mass(3.49, 8);
    const double v0 = moments(sideband(f, {3.49, 0.0, 8})).variance;
    const double v300 = moments(sideband(f, {3.49, 300.0, 8})).variance;
    std::ostringstream os;
    os << "detailed balance rel. error " << fmt(worst_balance) << "; mass " << fmt(mass) << " vs Poisson "
       << fmt(mass_ref) << "; variance 300 K " << fmt(v300) << " > 0 K " << fmt(v0);
    report(7, worst_balance <= kDetailedBalanceTol && std::abs(mass - mass_ref) <= kMassTol && v300 > v0, os.str());

    const char* dir = std::getenv("NVSCC_DATA_DIR");
    if (!dir || !fs::exists(fs::path(dir) / "photoionization.csv")) {
        report_skip(7, "cross-section ratios need NVSCC_DATA_DIR/photoionization.csv (external dataset not supplied)");
        return;
    }
    const fs::path out = fs::temp_directory_path() / "nvscc_acceptance_ratios";
    std::ostringstream sink;
    const int code = cli::run({"sideband", "temperatures=300", "--out", out.string()}, sink, std::cerr);
    if (code != 0) {
        report(7, false, "sideband run for cross-section ratios failed");
        return;
    }
    const io::Table t = io::read_table(out / "sigma_ratios.csv");
    const double green = std::stod(t.rows.at(0).at(2));
    const double zpl = std::stod(t.rows.at(1).at(2));
    std::ostringstream rs;
    rs << "sigma ratio " << fmt(green) << " at 2.3 eV vs 0.26, " << fmt(zpl) << " at ZPL vs 0.1 (+/- 15%)";
    report(7, std::abs(green - 0.26) <= kRatioRelTol * 0.26 && std::abs(zpl - 0.1) <= kRatioRelTol * 0.1, rs.str());
}

void criterion8() {
    constexpr double j01 = 2.404825557695773;
    GridSpec box;
    box.r_max = 10.0;
    box.z_max = 10.0;
    box.n_radial = 60;
    box.n_axial = 60;
    box.n_levels = 1;
    const double e_box = solve_envelope([](double, double) { return 0.0; }, {1.0, 1.0}, box).energies(0);
    const double box_exact = kHbar2Over2MeEvNm2 * (std::pow(j01 / 10.0, 2) + std::pow(std::numbers::pi / 10.0, 2));

    const double hw = 0.02;
    const double k = hw * hw / (2.0 * kHbar2Over2MeEvNm2);
    GridSpec ho;
    ho.r_max = 12.0;
    ho.z_min = -12.0;
    ho.z_max = 12.0;
    ho.n_radial = 80;
    ho.n_axial = 160;
    ho.n_levels = 1;
    const double e_ho = solve_envelope([k](double r, double z) { return 0.5 * k * (r * r + z * z); }, {1.0, 1.0}, ho).energies(0);
    const double ho_exact = 1.5 * hw;
    const double err_box = std::abs(e_box - box_exact) / box_exact;
    const double err_ho = std::abs(e_ho - ho_exact) / ho_exact;

    std::vector<double> vs;
    for (int i = -8; i <= 8; ++i) vs.push_back(0.25 * i);
    const auto curve = gap_shift(ElectrodeConfig{}, EffectiveMass{}, vs, GridSpec{});
    bool odd = true, flat_negative = true, ordered = true;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const auto& p = curve[i];
        const auto& mirror = curve[curve.size() - 1 - i];
        odd = odd && std::abs(p.nv_shift + mirror.nv_shift) <= 1e-12;
        if (p.potential < 0.0) flat_negative = flat_negative && p.cbm_shift == 0.0;
        if (p.potential > 0.0) ordered = ordered && p.nv_shift > p.cbm_shift;
    }
    std::ostringstream os;
    os << std::boolalpha << "box oracle rel. error " << fmt(err_box) << ", oscillator oracle rel. error " << fmt(err_ho) << " (limit "
       << kOracleRelTol << "); NV branch odd " << odd << ", CBM flat for V<0 " << flat_negative
       << ", NV above CBM for V>0 " << ordered;
    report(8, err_box <= kOracleRelTol && err_ho <= kOracleRelTol && odd && flat_negative && ordered, os.str());
}

void criterion9() {
    const fs::path out = fs::temp_directory_path() / "nvscc_acceptance_reproduce";
    fs::remove_all(out);
    std::ostringstream log;
    const auto t0 = std::chrono::steady_clock::now();
    const int code = cli::run({"reproduce-all", "--out", out.string()}, log, std::cerr);
    const double secs = seconds_since(t0);
    std::string failed;
    if (fs::exists(out / "summary.csv")) {
        const io::Table t = io::read_table(out / "summary.csv");
        for (const auto& row : t.rows)
            if (row.back() != "true") failed += (failed.empty() ? "" : ", ") + row.front();
    }
    std::ostringstream os;
    os << "reproduce-all exit " << code << " in " << fmt(secs) << " s (limit " << kReproduceSeconds << " s)";
    if (!failed.empty()) os << "; failing rows: " << failed;
    report(9, code == 0 && secs < kReproduceSeconds, os.str());
}

}  // namespace

int main() {
    try {
        criterion1();
        criterion2();
        criterion3();
        criterion4();
        criterion5();
        criterion6();
        criterion7();
        criterion8();
        criterion9();
    } catch (const std::exception& e) {
        std::cout << "FAIL  acceptance aborted: " << e.what() << std::endl;
        return 1;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion check(s) failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
