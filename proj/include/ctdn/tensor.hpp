// Minimal N-D double tensor with reverse-mode automatic differentiation.
// Operations build a graph of shared_ptr nodes; backward() linearizes the
// graph into a Tape and runs adjoints in reverse topological order.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ctdn/rng.hpp"

namespace ctdn {

class Tensor;
using TensorPtr = std::shared_ptr<Tensor>;

class Tensor : public std::enable_shared_from_this<Tensor> {
public:
    std::vector<int> shape;     // row-major extents
    std::vector<double> values;
    bool requires_grad = false;
    std::vector<double> grad;   // same size as values once tracked

    // Graph edges; empty for leaves. backprop reads this->grad and
    // accumulates into the parents' grad buffers.
    std::vector<TensorPtr> parents;
    std::function<void()> backprop;

    static TensorPtr create(std::vector<int> shape, bool requires_grad = false);
    static TensorPtr full(std::vector<int> shape, double value, bool requires_grad = false);
    static TensorPtr from_values(std::vector<int> shape, std::vector<double> v,
                                 bool requires_grad = false);
    static TensorPtr randn(std::vector<int> shape, double mean, double sd, RngStream& rng,
                           bool requires_grad = false);

    std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
    int rank() const { return static_cast<int>(shape.size()); }
    bool is_leaf() const { return parents.empty(); }
    double item() const;

    void zero_grad();
    void ensure_grad();
    // Copy of the values with no graph attached.
    TensorPtr detach() const;

    bool backward_done = false; // set on the node backward() was called on
};

std::string shape_string(const std::vector<int>& shape);
std::int64_t shape_numel(const std::vector<int>& shape);

// Execution-ordered record of the nodes reachable from a root, in forward
// topological order. Each node appears exactly once.
class Tape {
public:
    explicit Tape(const TensorPtr& root);
    const std::vector<Tensor*>& nodes() const { return nodes_; }

private:
    std::vector<Tensor*> nodes_;
    std::vector<TensorPtr> keepalive_;
};

// --- elementwise and reduction primitives -------------------------------

TensorPtr add(const TensorPtr& a, const TensorPtr& b);
TensorPtr sub(const TensorPtr& a, const TensorPtr& b);
TensorPtr mul(const TensorPtr& a, const TensorPtr& b);
TensorPtr scale(const TensorPtr& x, double c);
TensorPtr add_scalar(const TensorPtr& x, double c);
TensorPtr exp_op(const TensorPtr& x);
TensorPtr leaky_relu(const TensorPtr& x, double slope);
TensorPtr sum(const TensorPtr& x);
TensorPtr mean(const TensorPtr& x);
TensorPtr mse_loss(const TensorPtr& a, const TensorPtr& b);

// --- structured primitives ----------------------------------------------

// Cross-correlation with bias. input [N,C,H,W], weight [F,C,kh,kw], bias [F].
TensorPtr conv2d(const TensorPtr& input, const TensorPtr& weight, const TensorPtr& bias,
                 int stride, int zero_padding);

enum class BatchNormMode { kTrain, kEval };

struct BatchNormState {
    std::vector<double> running_mean;
    std::vector<double> running_var;
};

// Per-channel normalization over (N,H,W). Train mode uses biased batch
// statistics and updates running stats with momentum 0.9; eval mode uses the
// running stats.
TensorPtr batch_norm2d(const TensorPtr& input, const TensorPtr& gamma, const TensorPtr& beta,
                       BatchNormMode mode, BatchNormState& stats, double eps = 1e-5,
                       double momentum = 0.9);

// Channel concatenation of [N,Ca,H,W] and [N,Cb,H,W].
TensorPtr concat_channels(const TensorPtr& a, const TensorPtr& b);

// Populates grad of every requires_grad tensor reachable from loss.
// loss must be scalar; calling twice on the same node is an error.
void backward(const TensorPtr& loss);

} // namespace ctdn
