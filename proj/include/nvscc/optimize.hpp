// optimize.hpp: bounded derivative-free maximization (multi-start Nelder-Mead).
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace nvscc::optim {

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Axis-aligned box. Dimensions with lo == hi are held fixed and never searched.
struct Box {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
};

void validate(const Box& box);
bool contains(const Box& box, const Eigen::VectorXd& x);

struct NelderMeadOptions {
    double initial_step = 0.08;  // fraction of each box edge
    double ftol = 1e-13;
    double xtol = 1e-10;         // simplex diameter in normalized coordinates
    int max_evaluations = 20000;
};

struct MultiStartOptions {
    int seed_samples = 512;   // quasi-random coarse samples scored before local search
    int starts = 16;          // best-scoring samples refined by Nelder-Mead
    int polish_rounds = 6;    // restarts from the incumbent with a shrinking simplex
    std::uint64_t seed = 1;
    NelderMeadOptions local;
    std::vector<Eigen::VectorXd> extra_seeds;  // always refined, ahead of sampled starts
};

struct SearchResult {
    Eigen::VectorXd x;
    double value = 0.0;
    std::size_t evaluations = 0;
    std::vector<double> start_values;  // refined optimum per start, in start order
};

SearchResult nelder_mead_maximize(const Objective& f, const Box& box, const Eigen::VectorXd& x0,
                                  const NelderMeadOptions& opts = {});

/// Deterministic for a fixed seed: starts are refined in index order and ties
/// resolve to the lowest start index.
SearchResult multistart_maximize(const Objective& f, const Box& box, const MultiStartOptions& opts = {});

/// Scrambled Halton point in [0,1)^dim (index ≥ 0).
Eigen::VectorXd halton_point(int index, int dim, const Eigen::VectorXd& shift);

}  // namespace nvscc::optim
