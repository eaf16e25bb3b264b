// Shared test helpers, chiefly the central finite-difference gradient oracle
// every differentiable primitive is checked against.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "ctdn/rng.hpp"
#include "ctdn/tensor.hpp"

namespace testutil {

// Rebuilds the loss via make_loss (which must read the inputs' current
// values), compares analytic gradients against central differences with a
// relative step, and returns the worst relative error over all elements.
inline double max_grad_rel_err(const std::vector<ctdn::TensorPtr>& inputs,
                               const std::function<ctdn::TensorPtr()>& make_loss,
                               double step = 1e-5) {
    for (const auto& t : inputs) t->zero_grad();
    ctdn::TensorPtr loss = make_loss();
    ctdn::backward(loss);
    std::vector<std::vector<double>> analytic;
    for (const auto& t : inputs) {
        t->ensure_grad();
        analytic.push_back(t->grad);
    }

    double worst = 0.0;
    for (std::size_t ti = 0; ti < inputs.size(); ++ti) {
        ctdn::Tensor& t = *inputs[ti];
        for (std::size_t j = 0; j < t.values.size(); ++j) {
            double x = t.values[j];
            double h = step * std::max(1.0, std::fabs(x));
            t.values[j] = x + h;
            double up = make_loss()->item();
            t.values[j] = x - h;
            double down = make_loss()->item();
            t.values[j] = x;
            double numeric = (up - down) / (2.0 * h);
            double a = analytic[ti][j];
            double diff = std::fabs(a - numeric);
            if (diff < 1e-9) continue; // both effectively zero
            worst = std::max(worst, diff / std::max(std::fabs(a) + std::fabs(numeric), 1e-6));
        }
    }
    return worst;
}

inline ctdn::TensorPtr random_tensor(std::vector<int> shape, ctdn::RngStream& rng,
                                     bool requires_grad = true, double sd = 1.0) {
    return ctdn::Tensor::randn(std::move(shape), 0.0, sd, rng, requires_grad);
}

// Seed-based convenience; gradients only when asked for.
inline ctdn::TensorPtr random_tensor(std::vector<int> shape, std::uint64_t seed,
                                     bool requires_grad = false, double sd = 1.0) {
    ctdn::RngStream rng(seed);
    return ctdn::Tensor::randn(std::move(shape), 0.0, sd, rng, requires_grad);
}

} // namespace testutil
