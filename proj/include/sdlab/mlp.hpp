#pragma once

#include "sdlab/tensor.hpp"

namespace sdlab {

enum class Act { relu, tanh };

// Fully connected net: hidden layers use `act`, the output layer is linear.
struct Mlp {
    std::vector<int> widths;      // {in, hidden..., out}
    std::vector<Tensor> weights;  // [in x out] per layer
    std::vector<Tensor> biases;   // {out} per layer
    Act act = Act::relu;

    static Mlp make(const std::vector<int>& widths, Act act, Rng& rng);

    int in_dim() const { return widths.front(); }
    int out_dim() const { return widths.back(); }
    int n_layers() const { return static_cast<int>(weights.size()); }

    // Graph-building forward for a 2-D batch node [n x in]. With
    // trainable=false the weights enter the tape as constants, so gradients
    // stop at this net (used when another learner's loss passes through it).
    int forward(Tape& tape, int x, bool trainable = true);

    // Forward without gradient tracking. Accepts {in} or [n x in].
    Tensor forward(const Tensor& x) const;

    std::vector<Tensor*> params();
    void zero_grads();
};

}  // namespace sdlab
