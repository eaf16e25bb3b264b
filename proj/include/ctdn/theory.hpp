// Exact finite-support verification of the objective's mathematics: KL and
// cross-entropy, the closed-form optimal discriminator, the value identity
// J(D_opt, G) = KL + lambda * fidelity, and brute-force MAP estimation.
// Natural logs (nats) throughout.
#pragma once

#include <string>
#include <vector>

namespace ctdn {

struct DiscreteDistribution {
    std::vector<double> probs;

    // Validates probs >= 0 and sum == 1 within 1e-12.
    static DiscreteDistribution create(std::vector<double> probs);
    int support_size() const { return static_cast<int>(probs.size()); }
};

// Per-point values D(w) <= 1; the boundary 1 is legal only where p_G has no
// mass (there log(1 - D) never enters the objective).
struct DiscreteDiscriminator {
    std::vector<double> values;

    static DiscreteDiscriminator create(std::vector<double> values);
};

double kl(const DiscreteDistribution& p, const DiscreteDistribution& q);
double cross_entropy(const DiscreteDistribution& p, const DiscreteDistribution& q);
double entropy(const DiscreteDistribution& p);

// D_opt(w) = 1 - p_G(w)/p_x(w). Rejects p_x(w)=0 with p_G(w)>0; where both
// vanish the point is irrelevant to the objective and D is set to 0.
DiscreteDiscriminator d_opt(const DiscreteDistribution& p_x, const DiscreteDistribution& p_g);

// Sum_w p_x D + Sum_w p_G log(1-D) + lambda * fidelity.
double objective_value(const DiscreteDistribution& p_x, const DiscreteDistribution& p_g,
                       const DiscreteDiscriminator& d, double fidelity, double lambda);

// Exhaustive argmax of log prior(y) - lambda*||y - z||^2 over the candidate
// signals; ties broken by lowest index. Returns the candidate index.
int map_estimate(const std::vector<double>& z, const std::vector<std::vector<double>>& candidates,
                 const DiscreteDistribution& prior, double lambda);

struct Theorem1Report {
    bool passed = false;
    // Largest amount by which any grid-searched per-point objective beats
    // the closed form (positive would mean the closed form lost).
    double max_grid_gap = 0.0;
    // |objective(d_opt) - (kl + lambda*fidelity)|
    double identity_deviation = 0.0;
    double objective_at_opt = 0.0;
    double kl_value = 0.0;
    double tolerance = 0.0;

    std::string to_text() const;
};

// Checks (a) the closed-form D_opt against a dense per-point grid search
// over t in [-10, 1-1e-6] refined to 1e-7 steps, and (b) the value
// identity, both within `tolerance`.
Theorem1Report verify_theorem1(const DiscreteDistribution& p_x, const DiscreteDistribution& p_g,
                               double fidelity, double lambda, double tolerance);

} // namespace ctdn
