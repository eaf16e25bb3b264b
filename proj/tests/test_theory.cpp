#include "ctdn/theory.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ctdn/rng.hpp"
#include "doctest.h"

using namespace ctdn;

namespace {

DiscreteDistribution random_dist(int k, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> p(k);
    double sum = 0.0;
    for (double& v : p) {
        v = 0.5 + rng.uniform(); // bounded away from 0 => density ratios <= 3
        sum += v;
    }
    for (double& v : p) v /= sum;
    return DiscreteDistribution::create(std::move(p));
}

} // namespace

TEST_CASE("distribution validation") {
    CHECK_NOTHROW(DiscreteDistribution::create({0.25, 0.75}));
    CHECK_THROWS_AS(DiscreteDistribution::create({0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteDistribution::create({-0.1, 1.1}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteDistribution::create({}), std::invalid_argument);
    CHECK_NOTHROW(DiscreteDiscriminator::create({0.5, -3.0, 1.0}));
    CHECK_THROWS_AS(DiscreteDiscriminator::create({1.0 + 1e-9}), std::invalid_argument);
}

TEST_CASE("kl matches hand-computed values") {
    auto p = DiscreteDistribution::create({0.5, 0.5});
    auto q = DiscreteDistribution::create({0.25, 0.75});
    CHECK(kl(p, p) == 0.0);
    double expect = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
    CHECK(kl(p, q) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(0.14384103622589046).epsilon(1e-12));
}

TEST_CASE("kl is non-negative and needs absolute continuity") {
    for (int trial = 0; trial < 1000; ++trial) {
        auto p = random_dist(5, mix_seed(100, trial));
        auto q = random_dist(5, mix_seed(200, trial));
        CHECK(kl(p, q) >= -1e-12);
    }
    auto p = DiscreteDistribution::create({0.5, 0.5});
    auto q = DiscreteDistribution::create({1.0, 0.0});
    CHECK_THROWS_AS(kl(p, q), std::invalid_argument);
    // p may have zeros where q does not: 0 log 0 = 0.
    auto r = DiscreteDistribution::create({0.0, 1.0});
    CHECK(kl(r, p) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("cross entropy ties the kl identity together") {
    auto p = DiscreteDistribution::create({1.0, 0.0});
    auto q = DiscreteDistribution::create({0.5, 0.5});
    CHECK(cross_entropy(p, q) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    auto u = DiscreteDistribution::create({0.25, 0.25, 0.25, 0.25});
    CHECK(cross_entropy(u, u) == doctest::Approx(entropy(u)).epsilon(1e-12));
    CHECK(entropy(u) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    for (int trial = 0; trial < 200; ++trial) {
        auto a = random_dist(6, mix_seed(300, trial));
        auto b = random_dist(6, mix_seed(400, trial));
        CHECK(kl(a, b) ==
              doctest::Approx(cross_entropy(a, b) - entropy(a)).epsilon(1e-12));
    }
}

TEST_CASE("d_opt closed form") {
    auto p = DiscreteDistribution::create({0.5, 0.5});
    auto qe = DiscreteDistribution::create({0.5, 0.5});
    auto d_eq = d_opt(p, qe);
    CHECK(d_eq.values[0] == 0.0);
    CHECK(d_eq.values[1] == 0.0);

    auto q = DiscreteDistribution::create({0.25, 0.75});
    auto d = d_opt(p, q);
    CHECK(d.values[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d.values[1] == doctest::Approx(-0.5).epsilon(1e-14));

    auto px0 = DiscreteDistribution::create({0.0, 1.0});
    auto pg = DiscreteDistribution::create({0.5, 0.5});
    CHECK_THROWS_AS(d_opt(px0, pg), std::invalid_argument);
    // Where both vanish the point is irrelevant; D defaults to 0.
    auto both0 = d_opt(DiscreteDistribution::create({0.0, 1.0}),
                       DiscreteDistribution::create({0.0, 1.0}));
    CHECK(both0.values[0] == 0.0);
}

TEST_CASE("per-point grid search recovers the closed-form optimum") {
    // Independent oracle: maximize p_x*t + p_G*log(1-t) by brute scan.
    auto p_x = random_dist(4, 71);
    auto p_g = random_dist(4, 72);
    auto closed = d_opt(p_x, p_g);
    for (int w = 0; w < 4; ++w) {
        double best_t = -10.0, best_v = -1e300;
        for (double t = -10.0; t <= 1.0 - 1e-6; t += 1e-4) {
            double v = p_x.probs[w] * t + p_g.probs[w] * std::log(1.0 - t);
            if (v > best_v) {
                best_v = v;
                best_t = t;
            }
        }
        CHECK(std::abs(best_t - closed.values[w]) < 2e-4);
    }
}

TEST_CASE("objective value and the Eq-style identity at the optimum") {
    auto p_x = random_dist(6, 81);
    auto p_g = random_dist(6, 82);

    auto zero = DiscreteDiscriminator::create(std::vector<double>(6, 0.0));
    CHECK(objective_value(p_x, p_g, zero, 0.0, 0.0) == 0.0);

    double fid = 0.37, lambda = 2.5;
    auto d = d_opt(p_x, p_g);
    double val = objective_value(p_x, p_g, d, fid, lambda);
    CHECK(val == doctest::Approx(kl(p_g, p_x) + lambda * fid).epsilon(1e-10));

    // Coordinate-wise concavity: nudging any D value off the optimum can
    // only lower the objective.
    for (int w = 0; w < 6; ++w) {
        for (double eps : {-1e-3, 1e-3}) {
            auto nudged = d;
            nudged.values[w] += eps;
            if (nudged.values[w] >= 1.0) continue;
            double v2 = objective_value(p_x, p_g, DiscreteDiscriminator::create(nudged.values),
                                        fid, lambda);
            CHECK(v2 <= val + 1e-12);
        }
    }
}

TEST_CASE("objective rejects D = 1 where the generator has mass") {
    auto p_x = DiscreteDistribution::create({0.5, 0.5});
    auto p_g = DiscreteDistribution::create({1.0, 0.0});
    // D = 1 on a p_G-null point is the closed-form boundary and is fine.
    auto d = d_opt(p_x, p_g); // (-1, 1)
    CHECK(d.values[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_NOTHROW(objective_value(p_x, p_g, d, 0.0, 0.0));
    auto bad = DiscreteDiscriminator::create({1.0, 0.0});
    CHECK_THROWS_AS(objective_value(p_x, p_g, bad, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("map_estimate brute-force behaviors") {
    std::vector<std::vector<double>> cands = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.0}};
    auto uniform = DiscreteDistribution::create({1.0 / 3, 1.0 / 3, 1.0 / 3});
    // Uniform prior: nearest candidate wins.
    CHECK(map_estimate({0.9, 1.1}, cands, uniform, 1.0) == 1);
    CHECK(map_estimate({1.9, 0.1}, cands, uniform, 1.0) == 2);
    // lambda = 0: the prior mode wins regardless of z.
    auto peaked = DiscreteDistribution::create({0.2, 0.1, 0.7});
    CHECK(map_estimate({0.0, 0.0}, cands, peaked, 0.0) == 2);
    // Exact tie: lowest index.
    CHECK(map_estimate({0.5, 0.5}, {{0.0, 0.5}, {1.0, 0.5}}, DiscreteDistribution::create({0.5, 0.5}),
                       1.0) == 0);
    CHECK_THROWS_AS(map_estimate({0.0}, {}, uniform, 1.0), std::invalid_argument);

    // The Gaussian-noise correspondence lambda = 1/(2 sigma^2) at sigma=25.
    double lambda = 1.0 / (2.0 * 25.0 * 25.0);
    CHECK(lambda == doctest::Approx(0.0008).epsilon(1e-15));
    CHECK(map_estimate({0.9, 1.1}, cands, uniform, lambda) == 1);
}

TEST_CASE("verify_theorem1 passes on random distributions") {
    for (int trial = 0; trial < 4; ++trial) {
        auto p_x = random_dist(8, mix_seed(500, trial));
        auto p_g = random_dist(8, mix_seed(600, trial));
        auto report = verify_theorem1(p_x, p_g, 0.25, 0.5, 1e-8);
        CHECK(report.passed);
        CHECK(report.max_grid_gap <= 1e-8);
        CHECK(report.identity_deviation <= 1e-8);
        CHECK(!report.to_text().empty());
    }
}

TEST_CASE("verify_theorem1 equality case: p_G = p_x") {
    auto p = random_dist(8, 700);
    auto report = verify_theorem1(p, p, 0.0, 0.5, 1e-10);
    CHECK(report.passed);
    CHECK(report.objective_at_opt == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(report.kl_value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("objective falls off smoothly away from the optimum") {
    auto p_x = random_dist(5, 801);
    auto p_g = random_dist(5, 802);
    auto d = d_opt(p_x, p_g);
    double at_opt = objective_value(p_x, p_g, d, 0.0, 0.0);
    double prev = at_opt;
    for (double eps : {1e-3, 1e-2, 1e-1}) {
        auto moved = d;
        for (double& v : moved.values) v -= eps; // move down, stays < 1
        double val = objective_value(p_x, p_g, DiscreteDiscriminator::create(moved.values), 0.0, 0.0);
        CHECK(val < prev);
        prev = val;
    }
}
