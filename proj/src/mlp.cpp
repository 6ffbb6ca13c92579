#include "sdlab/mlp.hpp"

#include <cmath>

namespace sdlab {

Mlp Mlp::make(const std::vector<int>& widths, Act act, Rng& rng) {
    require(widths.size() >= 2, "mlp: need at least input and output widths");
    Mlp mlp;
    mlp.widths = widths;
    mlp.act = act;
    for (size_t l = 0; l + 1 < widths.size(); ++l) {
        const int in = widths[l], out = widths[l + 1];
        mlp.weights.push_back(
            Tensor::randn({in, out}, rng, 1.0 / std::sqrt(static_cast<double>(in))));
        mlp.biases.push_back(Tensor::zeros({out}));
    }
    return mlp;
}

int Mlp::forward(Tape& tape, int x, bool trainable) {
    require(tape.shape(x).size() == 2 && tape.shape(x)[1] == in_dim(),
            "mlp forward: input width mismatch");
    int h = x;
    for (int l = 0; l < n_layers(); ++l) {
        const int w = trainable ? tape.param(weights[l]) : tape.constant(weights[l]);
        const int b = trainable ? tape.param(biases[l]) : tape.constant(biases[l]);
        h = tape.add_rowvec(tape.matmul(h, w), b);
        if (l + 1 < n_layers()) h = (act == Act::relu) ? tape.relu(h) : tape.tanh_(h);
    }
    return h;
}

Tensor Mlp::forward(const Tensor& x) const {
    const bool vec = x.shape.size() == 1;
    const int n = vec ? 1 : x.shape[0];
    require(x.cols() == in_dim() && (vec || x.shape.size() == 2),
            "mlp forward: input width mismatch");
    std::vector<double> cur = x.data;
    std::vector<double> next;
    for (int l = 0; l < n_layers(); ++l) {
        const int in = widths[l], out = widths[l + 1];
        next.assign(static_cast<size_t>(n) * out, 0.0);
        kern::matmul(cur.data(), weights[l].data.data(), next.data(), n, in, out);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < out; ++j) next[static_cast<size_t>(i) * out + j] += biases[l].data[j];
        if (l + 1 < n_layers()) {
            if (act == Act::relu)
                for (double& v : next) v = v > 0.0 ? v : 0.0;
            else
                for (double& v : next) v = std::tanh(v);
        }
        cur.swap(next);
    }
    if (vec) return Tensor({out_dim()}, std::move(cur));
    return Tensor({n, out_dim()}, std::move(cur));
}

std::vector<Tensor*> Mlp::params() {
    std::vector<Tensor*> ps;
    for (size_t l = 0; l < weights.size(); ++l) {
        ps.push_back(&weights[l]);
        ps.push_back(&biases[l]);
    }
    return ps;
}

void Mlp::zero_grads() {
    for (Tensor* p : params()) p->zero_grad();
}

}  // namespace sdlab
