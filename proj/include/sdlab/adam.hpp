#pragma once

#include "sdlab/tensor.hpp"

namespace sdlab {

// Adam with bias correction. The same parameter list (same order) must be
// passed on every step; moment state is kept per position. step() applies
// the update from each tensor's accumulated grad and then clears the grad.
struct Adam {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit Adam(double learning_rate = 1e-3) : lr(learning_rate) {}

    void step(const std::vector<Tensor*>& params);

    long t() const { return t_; }

private:
    long t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

}  // namespace sdlab
