#include "nvscc/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace nvscc {

std::string to_string(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::electrode_scc: return "electrode_scc";
        case ProtocolKind::repeated_scc: return "repeated_scc";
        case ProtocolKind::jaskula: return "jaskula";
    }
    throw std::invalid_argument("protocol: unknown kind");
}

ProtocolKind protocol_kind_from_string(const std::string& name) {
    if (name == "electrode_scc" || name == "electrode-scc" || name == "electrode") return ProtocolKind::electrode_scc;
    if (name == "repeated_scc" || name == "repeated-scc" || name == "repeated") return ProtocolKind::repeated_scc;
    if (name == "jaskula") return ProtocolKind::jaskula;
    throw std::invalid_argument("protocol: unknown kind '" + name + "'");
}

ProtocolSpec ProtocolSpec::electrode_scc() { return ProtocolSpec{}; }

ProtocolSpec ProtocolSpec::repeated_scc(int n_runs) {
    if (n_runs < 1) throw std::invalid_argument("protocol: a repeated protocol needs at least one run");
    ProtocolSpec s;
    s.kind = ProtocolKind::repeated_scc;
    s.n_runs = n_runs;
    return s;
}

ProtocolSpec ProtocolSpec::jaskula() {
    ProtocolSpec s;
    s.kind = ProtocolKind::jaskula;
    s.sigma_pump = 0.16;
    s.sigma_ion = 0.1;
    return s;
}

namespace {

void check_range(const ParamRange& r, const char* what) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo < 0.0 || r.hi < r.lo) {
        throw std::invalid_argument(std::string("protocol: invalid bounds for ") + what);
    }
}

int runs(const ProtocolSpec& s) { return s.kind == ProtocolKind::jaskula ? 1 : s.n_runs; }

}  // namespace

void validate(const ProtocolSpec& spec) {
    if (spec.n_runs < 1) throw std::invalid_argument("protocol: n_runs must be at least 1");
    if (spec.kind == ProtocolKind::electrode_scc && spec.n_runs != 1) {
        throw std::invalid_argument("protocol: electrode_scc is a single run; use repeated_scc");
    }
    if (!(spec.sigma_pump >= 0.0) || !(spec.sigma_ion >= 0.0) || !std::isfinite(spec.sigma_pump) ||
        !std::isfinite(spec.sigma_ion)) {
        throw std::invalid_argument("protocol: sigma values must be finite and non-negative");
    }
    if (!(spec.init_mixing >= 0.0 && spec.init_mixing <= 1.0)) {
        throw std::invalid_argument("protocol: init_mixing must lie in [0,1]");
    }
    check_range(spec.excitation, "excitation rate");
    check_range(spec.ionization, "ionization rate");
    check_range(spec.duration, "duration");
    validate(spec.rates);
}

std::vector<std::string> parameter_names(const ProtocolSpec& spec) {
    validate(spec);
    std::vector<std::string> names;
    if (spec.kind == ProtocolKind::jaskula) {
        if (spec.share_powers) return {"X", "t_pump", "t_ion"};
        return {"X_pump", "t_pump", "X_ion", "t_ion"};
    }
    const int n = runs(spec);
    const auto suffix = [n](int k) { return n == 1 ? std::string() : "_" + std::to_string(k + 1); };
    if (spec.share_powers) {
        names = {"X", "I"};
        for (int k = 0; k < n; ++k) {
            names.push_back("t_pump" + suffix(k));
            names.push_back("t_ion" + suffix(k));
        }
    } else {
        for (int k = 0; k < n; ++k) {
            names.push_back("X" + suffix(k));
            names.push_back("I" + suffix(k));
            names.push_back("t_pump" + suffix(k));
            names.push_back("t_ion" + suffix(k));
        }
    }
    return names;
}

std::vector<std::string> parameter_units(const ProtocolSpec& spec) {
    std::vector<std::string> units;
    for (const auto& name : parameter_names(spec)) units.push_back(name.rfind("t_", 0) == 0 ? "us" : "MHz");
    return units;
}

optim::Box parameter_box(const ProtocolSpec& spec) {
    const auto names = parameter_names(spec);
    const auto n = static_cast<Eigen::Index>(names.size());
    optim::Box box{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::string& nm = names[static_cast<std::size_t>(i)];
        const ParamRange& r = nm.rfind("t_", 0) == 0 ? spec.duration
                              : nm.rfind("I", 0) == 0 ? spec.ionization
                                                      : spec.excitation;
        box.lo(i) = r.lo;
        box.hi(i) = r.hi;
    }
    return box;
}

int parameter_index(const ProtocolSpec& spec, const std::string& name) {
    const auto names = parameter_names(spec);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<int>(i);
    }
    // Single-run names resolve to the first run of a repeated protocol.
    if (runs(spec) > 1 && name.find('_', 2) == std::string::npos) {
        const std::string first = spec.share_powers && (name == "X" || name == "I") ? name : name + "_1";
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == first) return static_cast<int>(i);
        }
    }
    throw std::invalid_argument("protocol: unknown parameter '" + name + "'");
}

PulseSequenced build_protocol(const ProtocolSpec& spec, const Eigen::VectorXd& params) {
    const optim::Box box = parameter_box(spec);
    if (params.size() != box.lo.size()) throw std::invalid_argument("protocol: wrong number of parameters");
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        if (!(params(i) >= box.lo(i) && params(i) <= box.hi(i))) {
            throw std::invalid_argument("protocol: parameter outside its bounds");
        }
    }

    PulseSequenced seq;
    if (spec.kind == ProtocolKind::jaskula) {
        const double x_pump = params(0);
        const double t_pump = params(1);
        const double x_ion = spec.share_powers ? params(0) : params(2);
        const double t_ion = spec.share_powers ? params(2) : params(3);
        seq.push_back({x_pump, 0.0, spec.sigma_pump, t_pump});
        seq.push_back({x_ion, 0.0, spec.sigma_ion, t_ion});
        return seq;
    }

    const int n = runs(spec);
    for (int k = 0; k < n; ++k) {
        double x, i, tp, ti;
        if (spec.share_powers) {
            x = params(0);
            i = params(1);
            tp = params(2 + 2 * k);
            ti = params(3 + 2 * k);
        } else {
            x = params(4 * k);
            i = params(4 * k + 1);
            tp = params(4 * k + 2);
            ti = params(4 * k + 3);
        }
        seq.push_back({x, 0.0, spec.sigma_pump, tp});
        seq.push_back({0.0, i, spec.sigma_ion, ti});
    }
    return seq;
}

double protocol_contrast(const ProtocolSpec& spec, const Eigen::VectorXd& params) {
    const double c = contrast(spec.rates, build_protocol(spec, params), spec.init_mixing);
    return spec.kind == ProtocolKind::jaskula ? -c : c;
}

namespace {

OptimizationResult optimize_in_box(const ProtocolSpec& spec, const optim::Box& box, const OptimizeOptions& opts) {
    if (opts.starts < 1 || opts.seed_samples < 0) throw std::invalid_argument("protocol: invalid optimizer options");
    optim::MultiStartOptions ms;
    ms.seed = opts.seed;
    ms.starts = opts.starts;
    ms.seed_samples = opts.seed_samples;
    const auto f = [&spec](const Eigen::VectorXd& x) { return protocol_contrast(spec, x); };
    const optim::SearchResult sr = optim::multistart_maximize(f, box, ms);

    OptimizationResult out;
    out.best_contrast = sr.value;
    out.x = sr.x;
    out.evaluations = sr.evaluations;
    out.trace = sr.start_values;
    const auto names = parameter_names(spec);
    const auto units = parameter_units(spec);
    for (std::size_t i = 0; i < names.size(); ++i) {
        out.best_params.push_back({names[i], units[i], sr.x(static_cast<Eigen::Index>(i))});
    }
    return out;
}

}  // namespace

OptimizationResult optimize_contrast(const ProtocolSpec& spec, const OptimizeOptions& opts) {
    return optimize_in_box(spec, parameter_box(spec), opts);
}

std::vector<CurvePoint> sigma_sweep(const ProtocolSpec& spec, const std::vector<double>& sigma_values,
                                    const OptimizeOptions& opts) {
    std::vector<CurvePoint> curve;
    for (double sigma : sigma_values) {
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("protocol: sigma must be >= 0");
        ProtocolSpec s = spec;
        s.sigma_pump = sigma;
        curve.push_back({sigma, optimize_contrast(s, opts)});
    }
    return curve;
}

std::vector<CurvePoint> contrast_vs_param(const ProtocolSpec& spec, const std::string& param_name,
                                          const std::vector<double>& values, const OptimizeOptions& opts) {
    const int idx = parameter_index(spec, param_name);
    const optim::Box full = parameter_box(spec);
    std::vector<CurvePoint> curve;
    for (double v : values) {
        if (!(v >= full.lo(idx) && v <= full.hi(idx))) {
            throw std::invalid_argument("protocol: value for '" + param_name + "' outside its bounds");
        }
        optim::Box box = full;
        box.lo(idx) = v;
        box.hi(idx) = v;
        curve.push_back({v, optimize_in_box(spec, box, opts)});
    }
    return curve;
}

double sensitivity_improvement(double c_ref, double c_new) {
    if (!(c_ref > 0.0 && c_ref <= 1.0) || !(c_new > 0.0 && c_new <= 1.0)) {
        throw std::invalid_argument("protocol: contrasts must lie in (0, 1]");
    }
    return 1.0 / c_ref - 1.0 / c_new;
}

}  // namespace nvscc
