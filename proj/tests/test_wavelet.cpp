#include "ctdn/wavelet.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "testutil.hpp"

using namespace ctdn;

namespace {

double dot(const TensorPtr& a, const TensorPtr& b) {
    REQUIRE(a->values.size() == b->values.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a->values.size(); ++i) s += a->values[i] * b->values[i];
    return s;
}

double sq_norm(const TensorPtr& a) { return dot(a, a); }

} // namespace

TEST_CASE("wave_dec matches the per-block Haar formulas") {
    // Single 2x2 block [1 2; 3 4].
    auto x = Tensor::from_values({1, 1, 2, 2}, {1.0, 2.0, 3.0, 4.0});
    auto s = wave_dec(x);
    CHECK(s.ll->shape == std::vector<int>{1, 1, 1, 1});
    CHECK(s.ll->values[0] == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(s.lh->values[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(s.hl->values[0] == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(s.hh->values[0] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("wave_dec of a constant image concentrates in ll") {
    auto x = Tensor::full({1, 2, 4, 6}, 3.0);
    auto s = wave_dec(x);
    for (double v : s.ll->values) CHECK(v == doctest::Approx(6.0).epsilon(1e-14));
    for (double v : s.lh->values) CHECK(v == 0.0);
    for (double v : s.hl->values) CHECK(v == 0.0);
    for (double v : s.hh->values) CHECK(v == 0.0);
}

TEST_CASE("wave_rec of an hh impulse is a +-1/2 checkerboard block") {
    Subbands s;
    s.ll = Tensor::full({1, 1, 2, 2}, 0.0);
    s.lh = Tensor::full({1, 1, 2, 2}, 0.0);
    s.hl = Tensor::full({1, 1, 2, 2}, 0.0);
    s.hh = Tensor::full({1, 1, 2, 2}, 0.0);
    s.hh->values[1 * 2 + 0] = 1.0; // block row 1, block col 0
    auto x = wave_rec(s);
    REQUIRE(x->shape == std::vector<int>{1, 1, 4, 4});
    // Block (1,0) occupies rows 2..3, cols 0..1: [d=+1/2 at (2,0)? work it out:
    // a=(ll+lh+hl+hh)/2=1/2, b=-1/2, c=-1/2, d=1/2.
    auto at = [&](int r, int c) { return x->values[r * 4 + c]; };
    CHECK(at(2, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(at(2, 1) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(at(3, 0) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(at(3, 1) == doctest::Approx(0.5).epsilon(1e-14));
    // Everything outside the block is zero.
    double rest = 0.0;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            if (!(r >= 2 && r <= 3 && c <= 1)) rest += std::abs(at(r, c));
    CHECK(rest == 0.0);
}

TEST_CASE("wave_rec(wave_dec(x)) reproduces x exactly") {
    auto x = testutil::random_tensor({2, 3, 8, 6}, 77);
    auto y = wave_rec(wave_dec(x));
    REQUIRE(y->shape == x->shape);
    for (std::size_t i = 0; i < x->values.size(); ++i)
        CHECK(y->values[i] == doctest::Approx(x->values[i]).epsilon(1e-12));
}

TEST_CASE("Haar transform preserves energy (Parseval)") {
    auto x = testutil::random_tensor({1, 2, 16, 16}, 5);
    auto s = wave_dec(x);
    double lhs = sq_norm(x);
    double rhs = sq_norm(s.ll) + sq_norm(s.lh) + sq_norm(s.hl) + sq_norm(s.hh);
    CHECK(rhs == doctest::Approx(lhs).epsilon(1e-12));
}

TEST_CASE("wave_rec is the adjoint of wave_dec") {
    // <dec(x), s> == <x, rec(s)> for arbitrary x and s.
    auto x = testutil::random_tensor({1, 1, 6, 8}, 11);
    Subbands s;
    s.ll = testutil::random_tensor({1, 1, 3, 4}, 12);
    s.lh = testutil::random_tensor({1, 1, 3, 4}, 13);
    s.hl = testutil::random_tensor({1, 1, 3, 4}, 14);
    s.hh = testutil::random_tensor({1, 1, 3, 4}, 15);
    auto d = wave_dec(x);
    double lhs = dot(d.ll, s.ll) + dot(d.lh, s.lh) + dot(d.hl, s.hl) + dot(d.hh, s.hh);
    double rhs = dot(x, wave_rec(s));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("wave_dec rejects odd extents") {
    CHECK_THROWS_AS(wave_dec(Tensor::full({1, 1, 3, 4}, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(wave_dec(Tensor::full({1, 1, 4, 3}, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(wave_dec(Tensor::full({1, 1}, 0.0)), std::invalid_argument);
}

TEST_CASE("gradients flow through wave_dec") {
    auto x = testutil::random_tensor({1, 2, 4, 4}, 21, /*requires_grad=*/true);
    auto err = testutil::max_grad_rel_err({x}, [&] {
        auto s = wave_dec(x);
        // Mix all four subbands so every path is exercised.
        auto t = add(mean(mul(s.ll, s.ll)), mean(mul(s.lh, s.lh)));
        auto u = add(mean(mul(s.hl, s.hl)), mean(s.hh));
        return add(t, u);
    });
    CHECK(err < 1e-4);
}

TEST_CASE("gradients flow through wave_rec") {
    Subbands s;
    s.ll = testutil::random_tensor({1, 1, 2, 3}, 31, /*requires_grad=*/true);
    s.lh = testutil::random_tensor({1, 1, 2, 3}, 32, /*requires_grad=*/true);
    s.hl = testutil::random_tensor({1, 1, 2, 3}, 33, /*requires_grad=*/true);
    s.hh = testutil::random_tensor({1, 1, 2, 3}, 34, /*requires_grad=*/true);
    auto err = testutil::max_grad_rel_err({s.ll, s.lh, s.hl, s.hh}, [&] {
        auto y = wave_rec(s);
        return mean(mul(y, y));
    });
    CHECK(err < 1e-4);
}
