#include "ctdn/theory.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ctdn {

namespace {

constexpr double kGridLo = -10.0;
constexpr double kGridHi = 1.0 - 1e-6;
constexpr double kGridCoarseStep = 1e-3;
constexpr double kGridFineStep = 1e-7;

// Per-point integrand of the inner maximization: p_x*t + p_G*log(1-t).
double point_objective(double px, double pg, double t) {
    return px * t + pg * std::log(1.0 - t);
}

} // namespace

DiscreteDistribution DiscreteDistribution::create(std::vector<double> probs) {
    if (probs.empty()) throw std::invalid_argument("distribution needs nonempty support");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("distribution probabilities must be >= 0");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("distribution probabilities sum to " + std::to_string(sum) +
                                    ", expected 1");
    }
    DiscreteDistribution d;
    d.probs = std::move(probs);
    return d;
}

DiscreteDiscriminator DiscreteDiscriminator::create(std::vector<double> values) {
    // The boundary value 1 is admitted because d_opt attains it exactly where
    // p_G vanishes; objective_value rejects it wherever p_G carries mass.
    for (double v : values) {
        if (!(v <= 1.0)) throw std::invalid_argument("discriminator values must be <= 1");
    }
    DiscreteDiscriminator d;
    d.values = std::move(values);
    return d;
}

double kl(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    if (p.probs.size() != q.probs.size()) throw std::invalid_argument("kl: support sizes differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.probs.size(); ++i) {
        if (p.probs[i] == 0.0) continue;
        if (q.probs[i] == 0.0) {
            throw std::invalid_argument("kl undefined: q vanishes where p > 0 (point " +
                                        std::to_string(i) + ")");
        }
        acc += p.probs[i] * std::log(p.probs[i] / q.probs[i]);
    }
    return acc;
}

double cross_entropy(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    if (p.probs.size() != q.probs.size()) {
        throw std::invalid_argument("cross_entropy: support sizes differ");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < p.probs.size(); ++i) {
        if (p.probs[i] == 0.0) continue;
        if (q.probs[i] == 0.0) {
            throw std::invalid_argument("cross_entropy undefined: q vanishes where p > 0 (point " +
                                        std::to_string(i) + ")");
        }
        acc -= p.probs[i] * std::log(q.probs[i]);
    }
    return acc;
}

double entropy(const DiscreteDistribution& p) {
    double acc = 0.0;
    for (double v : p.probs) {
        if (v > 0.0) acc -= v * std::log(v);
    }
    return acc;
}

DiscreteDiscriminator d_opt(const DiscreteDistribution& p_x, const DiscreteDistribution& p_g) {
    if (p_x.probs.size() != p_g.probs.size()) throw std::invalid_argument("d_opt: support sizes differ");
    std::vector<double> values(p_x.probs.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (p_x.probs[i] == 0.0) {
            if (p_g.probs[i] > 0.0) {
                throw std::invalid_argument("d_opt undefined: p_x vanishes where p_G > 0 (point " +
                                            std::to_string(i) + ")");
            }
            values[i] = 0.0; // point carries no mass; any D < 1 is optimal
        } else {
            values[i] = 1.0 - p_g.probs[i] / p_x.probs[i];
        }
    }
    return DiscreteDiscriminator::create(std::move(values));
}

double objective_value(const DiscreteDistribution& p_x, const DiscreteDistribution& p_g,
                       const DiscreteDiscriminator& d, double fidelity, double lambda) {
    if (d.values.size() != p_x.probs.size() || p_x.probs.size() != p_g.probs.size()) {
        throw std::invalid_argument("objective_value: support sizes differ");
    }
    double acc = lambda * fidelity;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        acc += p_x.probs[i] * d.values[i];
        if (p_g.probs[i] > 0.0) {
            if (d.values[i] >= 1.0) {
                throw std::invalid_argument("objective undefined: D = 1 where p_G > 0 (point " +
                                            std::to_string(i) + ")");
            }
            acc += p_g.probs[i] * std::log(1.0 - d.values[i]);
        }
    }
    return acc;
}

int map_estimate(const std::vector<double>& z, const std::vector<std::vector<double>>& candidates,
                 const DiscreteDistribution& prior, double lambda) {
    if (candidates.empty()) throw std::invalid_argument("map_estimate needs candidate signals");
    if (static_cast<std::size_t>(prior.support_size()) != candidates.size()) {
        throw std::invalid_argument("map_estimate: prior support does not match candidate count");
    }
    if (lambda < 0.0) throw std::invalid_argument("map_estimate: lambda must be >= 0");
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].size() != z.size()) {
            throw std::invalid_argument("map_estimate: candidate " + std::to_string(i) +
                                        " has dimension " + std::to_string(candidates[i].size()) +
                                        ", expected " + std::to_string(z.size()));
        }
        double dist = 0.0;
        for (std::size_t k = 0; k < z.size(); ++k) {
            double d = candidates[i][k] - z[k];
            dist += d * d;
        }
        double score = std::log(prior.probs[i]) - lambda * dist;
        if (score > best_score) { // strict: ties keep the lowest index
            best_score = score;
            best = static_cast<int>(i);
        }
    }
    return best;
}

std::string Theorem1Report::to_text() const {
    std::ostringstream os;
    os.precision(12);
    os << "theorem1 verification\n"
       << "  status:              " << (passed ? "PASS" : "FAIL") << '\n'
       << "  tolerance:           " << tolerance << '\n'
       << "  max grid-over-opt:   " << max_grid_gap << '\n'
       << "  identity deviation:  " << identity_deviation << '\n'
       << "  objective at D_opt:  " << objective_at_opt << '\n'
       << "  kl(p_G, p_x):        " << kl_value << '\n';
    return os.str();
}

Theorem1Report verify_theorem1(const DiscreteDistribution& p_x, const DiscreteDistribution& p_g,
                               double fidelity, double lambda, double tolerance) {
    DiscreteDiscriminator opt = d_opt(p_x, p_g);
    Theorem1Report rep;
    rep.tolerance = tolerance;

    // (a) Coarse-to-fine grid search per support point; the integrand is
    // concave in t, so refining around the coarse argmax is exhaustive.
    double max_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p_x.probs.size(); ++i) {
        double px = p_x.probs[i], pg = p_g.probs[i];
        double best_t = kGridLo;
        double best_v = point_objective(px, pg, kGridLo);
        for (double t = kGridLo; t <= kGridHi; t += kGridCoarseStep) {
            double v = point_objective(px, pg, t);
            if (v > best_v) {
                best_v = v;
                best_t = t;
            }
        }
        double lo = std::max(kGridLo, best_t - kGridCoarseStep);
        double hi = std::min(kGridHi, best_t + kGridCoarseStep);
        for (double t = lo; t <= hi; t += kGridFineStep) {
            double v = point_objective(px, pg, t);
            if (v > best_v) best_v = v;
        }
        max_gap = std::max(max_gap, best_v - point_objective(px, pg, opt.values[i]));
    }
    rep.max_grid_gap = max_gap;

    // (b) Value identity J(D_opt) = KL(p_G, p_x) + lambda * fidelity.
    rep.objective_at_opt = objective_value(p_x, p_g, opt, fidelity, lambda);
    rep.kl_value = kl(p_g, p_x);
    rep.identity_deviation = std::fabs(rep.objective_at_opt - (rep.kl_value + lambda * fidelity));

    rep.passed = rep.max_grid_gap <= tolerance && rep.identity_deviation <= tolerance;
    return rep;
}

} // namespace ctdn
