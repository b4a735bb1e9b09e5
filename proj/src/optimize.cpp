#include "nvscc/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace nvscc::optim {

void validate(const Box& box) {
    if (box.lo.size() != box.hi.size() || box.lo.size() == 0) {
        throw std::invalid_argument("optimize: box bounds have mismatched or zero size");
    }
    for (Eigen::Index i = 0; i < box.lo.size(); ++i) {
        if (!std::isfinite(box.lo(i)) || !std::isfinite(box.hi(i)) || box.lo(i) > box.hi(i)) {
            throw std::invalid_argument("optimize: bounds must be finite with lo <= hi");
        }
    }
}

bool contains(const Box& box, const Eigen::VectorXd& x) {
    if (x.size() != box.lo.size()) return false;
    return ((x.array() >= box.lo.array()) && (x.array() <= box.hi.array())).all();
}

namespace {

// Search runs over the free (lo < hi) coordinates, normalized to [0,1].
class Reduced {
public:
    Reduced(const Objective& f, const Box& box) : f_(f), box_(box) {
        for (Eigen::Index i = 0; i < box.lo.size(); ++i) {
            if (box.hi(i) > box.lo(i)) free_.push_back(i);
        }
    }

    int dim() const { return static_cast<int>(free_.size()); }

    Eigen::VectorXd expand(const Eigen::VectorXd& u) const {
        Eigen::VectorXd x = box_.lo;
        for (int k = 0; k < dim(); ++k) {
            const Eigen::Index i = free_[k];
            const double t = std::clamp(u(k), 0.0, 1.0);
            x(i) = (t == 1.0) ? box_.hi(i) : box_.lo(i) + t * (box_.hi(i) - box_.lo(i));
        }
        return x;
    }

    Eigen::VectorXd reduce(const Eigen::VectorXd& x) const {
        Eigen::VectorXd u(dim());
        for (int k = 0; k < dim(); ++k) {
            const Eigen::Index i = free_[k];
            u(k) = std::clamp((x(i) - box_.lo(i)) / (box_.hi(i) - box_.lo(i)), 0.0, 1.0);
        }
        return u;
    }

    // Negated so the simplex minimizes.
    double cost(const Eigen::VectorXd& u) {
        const double v = f_(expand(u));
        ++evaluations;
        if (!std::isfinite(v)) throw std::runtime_error("optimize: objective returned a non-finite value");
        return -v;
    }

    std::size_t evaluations = 0;

private:
    const Objective& f_;
    const Box& box_;
    std::vector<Eigen::Index> free_;
};

Eigen::VectorXd clamp01(Eigen::VectorXd u) { return u.cwiseMax(0.0).cwiseMin(1.0); }

struct LocalResult {
    Eigen::VectorXd u;
    double cost;
};

LocalResult simplex_minimize(Reduced& r, const Eigen::VectorXd& u0, double step, const NelderMeadOptions& o) {
    const int n = r.dim();
    const double dn = static_cast<double>(n);
    const double alpha = 1.0;
    const double beta = 1.0 + 2.0 / dn;
    const double gamma = 0.75 - 1.0 / (2.0 * dn);
    const double delta = 1.0 - 1.0 / dn;

    std::vector<Eigen::VectorXd> pts(n + 1, clamp01(u0));
    std::vector<double> vals(n + 1);
    for (int k = 0; k < n; ++k) {
        double& c = pts[k + 1](k);
        c = (c + step <= 1.0) ? c + step : c - step;
    }
    for (int k = 0; k <= n; ++k) vals[k] = r.cost(pts[k]);

    std::vector<int> order(n + 1);
    const std::size_t budget_end = r.evaluations + static_cast<std::size_t>(o.max_evaluations);
    while (r.evaluations < budget_end) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        const int best = order.front();
        const int worst = order.back();
        const int second = order[n - 1];

        double diameter = 0.0;
        for (int k = 0; k <= n; ++k) {
            diameter = std::max(diameter, (pts[k] - pts[best]).lpNorm<Eigen::Infinity>());
        }
        if (vals[worst] - vals[best] <= o.ftol || diameter <= o.xtol) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int k = 0; k <= n; ++k) {
            if (k != worst) centroid += pts[k];
        }
        centroid /= dn;

        const Eigen::VectorXd xr = clamp01(centroid + alpha * (centroid - pts[worst]));
        const double fr = r.cost(xr);
        if (fr < vals[best]) {
            const Eigen::VectorXd xe = clamp01(centroid + beta * (xr - centroid));
            const double fe = r.cost(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        const Eigen::VectorXd xc = outside ? clamp01(centroid + gamma * (xr - centroid))
                                           : clamp01(centroid - gamma * (centroid - pts[worst]));
        const double fc = r.cost(xc);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        for (int k = 0; k <= n; ++k) {
            if (k == best) continue;
            pts[k] = pts[best] + delta * (pts[k] - pts[best]);
            vals[k] = r.cost(pts[k]);
        }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    const auto idx = static_cast<std::size_t>(it - vals.begin());
    return {pts[idx], vals[idx]};
}

// Local search plus restarts from the incumbent until a restart stops paying.
LocalResult refine(Reduced& r, const Eigen::VectorXd& u0, const NelderMeadOptions& o, int polish_rounds) {
    LocalResult cur = simplex_minimize(r, u0, o.initial_step, o);
    double step = o.initial_step;
    for (int round = 0; round < polish_rounds; ++round) {
        step *= 0.5;
        LocalResult next = simplex_minimize(r, cur.u, step, o);
        const bool improved = next.cost < cur.cost - o.ftol;
        if (next.cost < cur.cost) cur = next;
        if (!improved) break;
    }
    return cur;
}

}  // namespace

Eigen::VectorXd halton_point(int index, int dim, const Eigen::VectorXd& shift) {
    static constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                      43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
    if (dim > static_cast<int>(std::size(kPrimes))) {
        throw std::invalid_argument("optimize: too many dimensions for the Halton sampler");
    }
    Eigen::VectorXd u(dim);
    for (int d = 0; d < dim; ++d) {
        const int base = kPrimes[d];
        double frac = 1.0;
        double v = 0.0;
        for (int i = index + 1; i > 0; i /= base) {
            frac /= base;
            v += frac * (i % base);
        }
        if (shift.size() > d) v = std::fmod(v + shift(d), 1.0);
        u(d) = v;
    }
    return u;
}

SearchResult nelder_mead_maximize(const Objective& f, const Box& box, const Eigen::VectorXd& x0,
                                  const NelderMeadOptions& opts) {
    validate(box);
    if (!contains(box, x0)) throw std::invalid_argument("optimize: start point outside bounds");
    Reduced r(f, box);
    SearchResult out;
    if (r.dim() == 0) {
        out.x = box.lo;
        out.value = -r.cost(Eigen::VectorXd());
    } else {
        const LocalResult lr = simplex_minimize(r, r.reduce(x0), opts.initial_step, opts);
        out.x = r.expand(lr.u);
        out.value = -lr.cost;
    }
    out.evaluations = r.evaluations;
    out.start_values.push_back(out.value);
    return out;
}

SearchResult multistart_maximize(const Objective& f, const Box& box, const MultiStartOptions& opts) {
    validate(box);
    Reduced r(f, box);
    SearchResult out;
    const int n = r.dim();
    if (n == 0) {
        out.x = box.lo;
        out.value = -r.cost(Eigen::VectorXd());
        out.evaluations = r.evaluations;
        out.start_values.push_back(out.value);
        return out;
    }

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd shift(n);
    for (int d = 0; d < n; ++d) shift(d) = unit(rng);

    // Coarse quasi-random seeding; the corner of the box is included since
    // optima on the bounds are common.
    std::vector<std::pair<double, Eigen::VectorXd>> samples;
    samples.reserve(static_cast<std::size_t>(opts.seed_samples) + 2);
    for (const Eigen::VectorXd& c : {Eigen::VectorXd(Eigen::VectorXd::Zero(n)), Eigen::VectorXd(Eigen::VectorXd::Constant(n, 0.5))}) {
        samples.emplace_back(r.cost(c), c);
    }
    for (int i = 0; i < opts.seed_samples; ++i) {
        Eigen::VectorXd u = halton_point(i, n, shift);
        samples.emplace_back(r.cost(u), std::move(u));
    }
    std::stable_sort(samples.begin(), samples.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<Eigen::VectorXd> starts;
    for (const auto& s : opts.extra_seeds) {
        if (!contains(box, s)) throw std::invalid_argument("optimize: extra seed outside bounds");
        starts.push_back(r.reduce(s));
    }
    for (int i = 0; i < opts.starts && i < static_cast<int>(samples.size()); ++i) {
        starts.push_back(samples[static_cast<std::size_t>(i)].second);
    }

    bool have = false;
    LocalResult best{};
    for (const auto& u0 : starts) {
        const LocalResult lr = refine(r, u0, opts.local, opts.polish_rounds);
        out.start_values.push_back(-lr.cost);
        if (!have || lr.cost < best.cost) {
            best = lr;
            have = true;
        }
    }
    out.x = r.expand(best.u);
    out.value = -best.cost;
    out.evaluations = r.evaluations;
    return out;
}

}  // namespace nvscc::optim
