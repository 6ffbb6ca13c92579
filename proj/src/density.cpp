#include "sdlab/density.hpp"

#include <cmath>
#include <numbers>

namespace sdlab {
namespace {
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
}

CondGaussian CondGaussian::make(int state_dim, int hidden, int hidden_layers, Rng& rng,
                                bool normalize) {
    std::vector<int> widths{state_dim};
    for (int i = 0; i < hidden_layers; ++i) widths.push_back(hidden);
    widths.push_back(state_dim);
    CondGaussian cg;
    cg.mu_net = Mlp::make(widths, Act::relu, rng);
    cg.logvar_net = Mlp::make(widths, Act::relu, rng);
    cg.normalize = normalize;
    return cg;
}

std::vector<double> CondGaussian::log_variances(const std::vector<double>& s,
                                                bool normalized) const {
    std::vector<double> lv = logvar_net.forward(Tensor::row(s)).data;
    for (double& v : lv) v = std::clamp(v, kLogVarLo, kLogVarHi);
    if (normalized) {
        double mean = 0.0;
        for (double v : lv) mean += v;
        mean /= static_cast<double>(lv.size());
        for (double& v : lv) v -= mean;
    }
    return lv;
}

std::vector<double> CondGaussian::variances(const std::vector<double>& s, bool normalized) const {
    std::vector<double> lv = log_variances(s, normalized);
    for (double& v : lv) v = std::exp(v);
    return lv;
}

double CondGaussian::nll(const std::vector<double>& s, const std::vector<double>& s_next) const {
    require(static_cast<int>(s.size()) == mu_net.in_dim() && s_next.size() == s.size(),
            "density nll: dimension mismatch");
    const std::vector<double> mu = mean_at(s);
    const std::vector<double> lv = log_variances(s, false);
    double nll = 0.0;
    for (size_t k = 0; k < mu.size(); ++k) {
        const double diff = s_next[k] - mu[k];
        nll += 0.5 * (kLog2Pi + lv[k] + diff * diff * std::exp(-lv[k]));
    }
    return nll;
}

double CondGaussian::csd_distance(const std::vector<double>& s,
                                  const std::vector<double>& s_next) const {
    require(static_cast<int>(s.size()) == mu_net.in_dim() && s_next.size() == s.size(),
            "csd_distance: dimension mismatch");
    const std::vector<double> mu = mean_at(s);
    const std::vector<double> lv = log_variances(s, normalize);
    double dist = 0.0;
    for (size_t k = 0; k < mu.size(); ++k) {
        const double diff = s_next[k] - mu[k];
        dist += diff * diff * std::exp(-lv[k]);
    }
    return dist;
}

double CondGaussian::mean_nll(const Tensor& s, const Tensor& s_next) const {
    require(s.shape.size() == 2 && s.shape == s_next.shape, "density: bad batch shape");
    const int n = s.shape[0];
    double total = 0.0;
    const Tensor mu = mu_net.forward(s);
    const Tensor lv = logvar_net.forward(s);
    const int d = dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            const size_t ix = static_cast<size_t>(i) * d + j;
            const double l = std::clamp(lv.data[ix], kLogVarLo, kLogVarHi);
            const double diff = s_next.data[ix] - mu.data[ix];
            total += 0.5 * (kLog2Pi + l + diff * diff * std::exp(-l));
        }
    return total / static_cast<double>(n);
}

double CondGaussian::fit_step(const Tensor& s, const Tensor& s_next, Adam& opt) {
    require(s.shape.size() == 2 && s.shape == s_next.shape && s.shape[0] >= 1,
            "density fit: batch must be non-empty with matching shapes");
    Tape tape;
    const int sx = tape.constant(s);
    const int target = tape.constant(s_next);
    const int mu = mu_net.forward(tape, sx);
    const int lv = tape.clamp(logvar_net.forward(tape, sx), kLogVarLo, kLogVarHi);
    const int diff2 = tape.square(tape.sub(target, mu));
    const int quad = tape.mul(diff2, tape.exp_(tape.neg(lv)));
    const int per_dim = tape.add_scalar(tape.add(lv, quad), kLog2Pi);
    const int loss = tape.mean(tape.scale(tape.row_sum(per_dim), 0.5));
    const double pre = tape.scalar(loss);
    tape.backward(loss);
    auto ps = params();
    opt.step(ps);
    return pre;
}

std::vector<Tensor*> CondGaussian::params() {
    std::vector<Tensor*> ps = mu_net.params();
    for (Tensor* p : logvar_net.params()) ps.push_back(p);
    return ps;
}

}  // namespace sdlab
