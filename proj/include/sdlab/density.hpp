#pragma once

#include "sdlab/adam.hpp"
#include "sdlab/mlp.hpp"

namespace sdlab {

// State-conditioned diagonal Gaussian q(s'|s), fit by maximum likelihood on
// transition pairs. With `normalize` on, distance queries use variances
// divided by their per-state geometric mean, so their product is 1.
struct CondGaussian {
    static constexpr double kLogVarLo = -10.0;
    static constexpr double kLogVarHi = 10.0;

    Mlp mu_net;      // state -> predicted next-state mean
    Mlp logvar_net;  // state -> per-dim log variance, clamped
    bool normalize = true;

    static CondGaussian make(int state_dim, int hidden, int hidden_layers, Rng& rng,
                             bool normalize = true);

    int dim() const { return mu_net.out_dim(); }

    std::vector<double> mean_at(const std::vector<double>& s) const { return mu_net.forward(Tensor::row(s)).data; }
    // clamped log variances; normalized subtracts the per-state mean
    std::vector<double> log_variances(const std::vector<double>& s, bool normalized) const;
    std::vector<double> variances(const std::vector<double>& s, bool normalized) const;

    // -log q(s'|s) with raw variances
    double nll(const std::vector<double>& s, const std::vector<double>& s_next) const;

    // Mahalanobis quadratic form (s'-mu)^T Sigma^-1 (s'-mu); uses normalized
    // variances when the flag is on
    double csd_distance(const std::vector<double>& s, const std::vector<double>& s_next) const;

    double mean_nll(const Tensor& s, const Tensor& s_next) const;

    // one optimizer step on mean NLL over the batch; returns pre-step loss
    double fit_step(const Tensor& s, const Tensor& s_next, Adam& opt);

    std::vector<Tensor*> params();
};

}  // namespace sdlab
