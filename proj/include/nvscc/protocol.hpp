// protocol.hpp: spin-to-charge conversion protocols and their contrast optimization.
#pragma once

#include "nvscc/optimize.hpp"
#include "nvscc/rate_model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace nvscc {

enum class ProtocolKind {
    electrode_scc,  // green pump, then electrode-assisted singlet ionization
    repeated_scc,   // n pump+ionize pairs with per-run durations
    jaskula,        // 594 nm shelving pump, then 637 nm two-photon ionization (I = 0)
};

std::string to_string(ProtocolKind kind);
ProtocolKind protocol_kind_from_string(const std::string& name);

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct ProtocolSpec {
    ProtocolKind kind = ProtocolKind::electrode_scc;
    int n_runs = 1;
    double sigma_pump = 0.26;
    double sigma_ion = 0.0;
    ParamRange excitation{0.0, 500.0};   // X, MHz
    ParamRange ionization{0.0, 5000.0};  // I, MHz
    ParamRange duration{0.0, 5.0};       // µs, every segment
    // repeated_scc: X and I are common to all runs. jaskula: one excitation
    // rate drives both the 594 nm and the 637 nm segment.
    bool share_powers = true;
    double init_mixing = 0.0;
    NvRatesd rates{};

    static ProtocolSpec electrode_scc();
    static ProtocolSpec repeated_scc(int n_runs);
    static ProtocolSpec jaskula();
};

void validate(const ProtocolSpec& spec);

struct NamedParam {
    std::string name;
    std::string unit;
    double value = 0.0;
};

/// Names of the free parameters, in the order build_protocol consumes them.
std::vector<std::string> parameter_names(const ProtocolSpec& spec);
std::vector<std::string> parameter_units(const ProtocolSpec& spec);
optim::Box parameter_box(const ProtocolSpec& spec);
int parameter_index(const ProtocolSpec& spec, const std::string& name);

PulseSequenced build_protocol(const ProtocolSpec& spec, const Eigen::VectorXd& params);

/// Signed so that the protocol's intended spin-to-charge mapping gives a
/// positive value: P₆(±1) − P₆(0) for the electrode protocols, P₆(0) − P₆(±1)
/// for jaskula, where ms=0 is the ionized projection.
double protocol_contrast(const ProtocolSpec& spec, const Eigen::VectorXd& params);

struct OptimizeOptions {
    std::uint64_t seed = 1;
    int starts = 16;
    int seed_samples = 512;
};

struct OptimizationResult {
    double best_contrast = 0.0;
    std::vector<NamedParam> best_params;
    Eigen::VectorXd x;
    std::size_t evaluations = 0;
    std::vector<double> trace;  // refined optimum of each start
};

OptimizationResult optimize_contrast(const ProtocolSpec& spec, const OptimizeOptions& opts = {});

struct CurvePoint {
    double param_value = 0.0;
    OptimizationResult result;
};

std::vector<CurvePoint> sigma_sweep(const ProtocolSpec& spec, const std::vector<double>& sigma_values,
                                    const OptimizeOptions& opts = {});

/// Holds `param_name` at each value and optimizes the remaining parameters.
std::vector<CurvePoint> contrast_vs_param(const ProtocolSpec& spec, const std::string& param_name,
                                          const std::vector<double>& values, const OptimizeOptions& opts = {});

/// Inverse-contrast sensitivity gain 1/c_ref − 1/c_new.
double sensitivity_improvement(double c_ref, double c_new);

}  // namespace nvscc
