#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "ctdn/rng.hpp"

using namespace ctdn;

TEST_CASE("uniform stays in [0,1) and is deterministic under seed") {
    RngStream a(42), b(42), c(43);
    bool same = true, differs = false;
    for (int i = 0; i < 1000; ++i) {
        double u = a.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        same = same && (u == b.uniform());
        differs = differs || (u != c.uniform());
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("uniform_int has no visible modulo bias on a small range") {
    RngStream rng(7);
    std::vector<int> counts(5, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++counts[rng.uniform_int(5)];
    // 4 sigma around the expected bin count.
    double expect = draws / 5.0;
    double sigma = std::sqrt(draws * 0.2 * 0.8);
    for (int c : counts) CHECK(std::fabs(c - expect) < 4.0 * sigma);
}

TEST_CASE("normal moments match a standard gaussian") {
    RngStream rng(11);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    double mean = sum / n;
    double var = sq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01);
    CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("poisson mean and variance track the rate on both algorithm branches") {
    for (double rate : {3.0, 40.0}) {
        RngStream rng(5);
        const int n = 100000;
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < n; ++i) {
            double x = static_cast<double>(rng.poisson(rate));
            sum += x;
            sq += x * x;
        }
        double mean = sum / n;
        double var = sq / n - mean * mean;
        CHECK(std::fabs(mean - rate) < 0.02 * rate);
        CHECK(std::fabs(var - rate) < 0.05 * rate);
    }
}

TEST_CASE("state save/load resumes the exact sequence") {
    RngStream rng(99);
    for (int i = 0; i < 17; ++i) rng.normal();
    std::string state = rng.save_state();
    std::vector<double> expected;
    for (int i = 0; i < 50; ++i) expected.push_back(rng.uniform());
    RngStream resumed;
    resumed.load_state(state);
    for (int i = 0; i < 50; ++i) CHECK(resumed.uniform() == expected[i]);
}

TEST_CASE("shuffle is a permutation and seed-stable") {
    std::vector<int> v(100);
    std::iota(v.begin(), v.end(), 0);
    RngStream rng(3);
    rng.shuffle(v);
    std::vector<int> w = v;
    std::sort(w.begin(), w.end());
    for (int i = 0; i < 100; ++i) CHECK(w[i] == i);

    std::vector<int> v2(100);
    std::iota(v2.begin(), v2.end(), 0);
    RngStream rng2(3);
    rng2.shuffle(v2);
    CHECK(v == v2);
}

TEST_CASE("mix_seed separates nearby salts") {
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
    CHECK(mix_seed(0, 0) != 0);
}
