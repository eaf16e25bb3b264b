#include "ctdn/network.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "testutil.hpp"

using namespace ctdn;

TEST_CASE("generator preserves the input shape") {
    GeneratorConfig cfg;
    cfg.scales = 2;
    cfg.base_channels = 4;
    Generator g(cfg, 1);
    auto x = testutil::random_tensor({1, 1, 32, 32}, 2);
    auto y = g.forward(x, BatchNormMode::kTrain);
    CHECK(y->shape == std::vector<int>{1, 1, 32, 32});
    for (double v : y->values) CHECK(std::isfinite(v));

    // Rectangular extents and batches work too.
    auto x2 = testutil::random_tensor({2, 1, 16, 24}, 3);
    auto y2 = g.forward(x2, BatchNormMode::kTrain);
    CHECK(y2->shape == std::vector<int>{2, 1, 16, 24});
}

TEST_CASE("generator rejects extents not divisible by 2^scales") {
    GeneratorConfig cfg;
    cfg.scales = 2;
    cfg.base_channels = 2;
    Generator g(cfg, 1);
    CHECK_THROWS_AS(g.forward(testutil::random_tensor({1, 1, 30, 32}, 4), BatchNormMode::kTrain),
                    std::invalid_argument);
    CHECK_THROWS_AS(g.forward(testutil::random_tensor({1, 2, 32, 32}, 5), BatchNormMode::kTrain),
                    std::invalid_argument);
}

TEST_CASE("same seed builds bit-identical networks, different seeds differ") {
    GeneratorConfig cfg;
    cfg.scales = 1;
    cfg.base_channels = 3;
    Generator a(cfg, 42), b(cfg, 42), c(cfg, 43);
    auto pa = a.named_parameters();
    auto pb = b.named_parameters();
    auto pc = c.named_parameters();
    REQUIRE(pa.size() == pb.size());
    bool any_diff_seed43 = false;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(pa[i].first == pb[i].first);
        CHECK(pa[i].second->values == pb[i].second->values);
        if (pa[i].second->values != pc[i].second->values) any_diff_seed43 = true;
    }
    CHECK(any_diff_seed43);

    // Forward agrees bit-for-bit as well.
    auto x = testutil::random_tensor({1, 1, 8, 8}, 6);
    auto ya = a.forward(x, BatchNormMode::kTrain);
    auto yb = b.forward(x, BatchNormMode::kTrain);
    CHECK(ya->values == yb->values);
}

TEST_CASE("parameter names are unique and grouped") {
    GeneratorConfig cfg;
    cfg.scales = 2;
    cfg.base_channels = 2;
    Generator g(cfg, 9);
    std::set<std::string> names;
    for (auto& [name, t] : g.named_parameters()) {
        CHECK(names.insert(name).second); // no duplicates
        CHECK(name.rfind("gen.", 0) == 0);
        CHECK(t->requires_grad);
    }
    CHECK(names.count("gen.enc0.conv0.weight") == 1);
    CHECK(names.count("gen.final.weight") == 1);
    // Two per-channel stats vectors per conv-bn block.
    std::set<std::string> buffers;
    for (auto& [name, vec] : g.named_buffers()) {
        CHECK(buffers.insert(name).second);
        CHECK(vec != nullptr);
    }
    CHECK(buffers.count("gen.enc0.conv0.running_mean") == 1);
    CHECK(buffers.count("gen.enc0.conv0.running_var") == 1);

    DiscriminatorConfig dcfg;
    dcfg.base_channels = 2;
    Discriminator d(dcfg, 10);
    std::set<std::string> dnames;
    for (auto& [name, t] : d.named_parameters()) {
        CHECK(dnames.insert(name).second);
        CHECK(name.rfind("disc.", 0) == 0);
    }
}

TEST_CASE("discriminator score map follows the size recurrence") {
    CHECK(Discriminator::score_map_extent(128) == 64);
    // Applying the recurrence three times: 128 -> 64 -> 32 -> 16.
    int n = 128;
    for (int i = 0; i < 3; ++i) n = Discriminator::score_map_extent(n);
    CHECK(n == 16);
    int m = 32;
    for (int i = 0; i < 3; ++i) m = Discriminator::score_map_extent(m);
    CHECK(m == 4);

    DiscriminatorConfig cfg;
    cfg.base_channels = 2;
    Discriminator d(cfg, 3);
    auto s = d.forward(testutil::random_tensor({1, 1, 32, 32}, 7), BatchNormMode::kTrain);
    CHECK(s->shape == std::vector<int>{1, 1, 4, 4});
    auto s2 = d.forward(testutil::random_tensor({2, 1, 16, 16}, 8), BatchNormMode::kTrain);
    CHECK(s2->shape == std::vector<int>{2, 1, 2, 2});
}

TEST_CASE("discriminator rejects inputs smaller than its receptive stack") {
    DiscriminatorConfig cfg;
    cfg.base_channels = 2;
    Discriminator d(cfg, 3);
    CHECK_THROWS_AS(d.forward(testutil::random_tensor({1, 1, 4, 4}, 9), BatchNormMode::kTrain),
                    std::invalid_argument);
}

TEST_CASE("discriminator_value realizes D = 1 - exp(s)") {
    CHECK(discriminator_value(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(discriminator_value(std::log(0.5)) == doctest::Approx(0.5).epsilon(1e-14));
    // s -> -inf pushes D toward 1 from below; at -40 the gap rounds away.
    CHECK(discriminator_value(-30.0) < 1.0);
    CHECK(discriminator_value(-40.0) <= 1.0);
    CHECK(discriminator_value(-40.0) == doctest::Approx(1.0).epsilon(1e-12));
    // Positive scores mean "looks generated": D < 0.
    CHECK(discriminator_value(1.0) < 0.0);

    // log(1 - D(s)) = s to machine precision, elementwise.
    auto s = testutil::random_tensor({1, 1, 2, 2}, 11);
    auto dv = discriminator_value(s);
    for (int i = 0; i < 4; ++i)
        CHECK(std::log(1.0 - dv->values[i]) == doctest::Approx(s->values[i]).epsilon(1e-12));
}

TEST_CASE("generator gradients match finite differences on a tiny config") {
    GeneratorConfig cfg;
    cfg.scales = 1;
    cfg.base_channels = 2;
    Generator g(cfg, 21);
    auto x = testutil::random_tensor({1, 1, 8, 8}, 22);
    auto params = g.trainable();
    auto err = testutil::max_grad_rel_err(params, [&] {
        auto y = g.forward(x, BatchNormMode::kTrain);
        return mean(mul(y, y));
    });
    CHECK(err < 1e-4);
}

TEST_CASE("discriminator gradients match finite differences on a tiny config") {
    DiscriminatorConfig cfg;
    cfg.base_channels = 2;
    Discriminator d(cfg, 31);
    // 16x16 keeps the deepest batch norm at 2x2 spatial: with only two
    // values per channel the normalized outputs are pinned to +-1 and the
    // gradient becomes eps-sized, which finite differences cannot resolve.
    auto x = testutil::random_tensor({1, 1, 16, 16}, 32);
    auto params = d.trainable();
    auto err = testutil::max_grad_rel_err(params, [&] {
        auto s = d.forward(x, BatchNormMode::kTrain);
        return mean(mul(s, s));
    });
    CHECK(err < 1e-4);
}

TEST_CASE("gradients also flow back into the generator input") {
    GeneratorConfig cfg;
    cfg.scales = 1;
    cfg.base_channels = 2;
    Generator g(cfg, 41);
    auto x = testutil::random_tensor({1, 1, 8, 8}, 42, /*requires_grad=*/true);
    auto err = testutil::max_grad_rel_err({x}, [&] {
        auto y = g.forward(x, BatchNormMode::kTrain);
        return mse_loss(y, x);
    });
    CHECK(err < 1e-4);
}

TEST_CASE("eval mode uses frozen statistics and is deterministic") {
    GeneratorConfig cfg;
    cfg.scales = 1;
    cfg.base_channels = 2;
    Generator g(cfg, 51);
    auto x = testutil::random_tensor({2, 1, 8, 8}, 52);
    // Prime the running stats with a few train-mode passes.
    for (int i = 0; i < 3; ++i) g.forward(x, BatchNormMode::kTrain);
    auto a = g.forward(x, BatchNormMode::kEval);
    auto b = g.forward(x, BatchNormMode::kEval);
    CHECK(a->values == b->values); // eval does not mutate state
}
