#include "sdlab/adam.hpp"

#include <cmath>

namespace sdlab {

void Adam::step(const std::vector<Tensor*>& params) {
    if (m_.empty()) {
        for (const Tensor* p : params) {
            m_.emplace_back(p->data.size(), 0.0);
            v_.emplace_back(p->data.size(), 0.0);
        }
    }
    require(m_.size() == params.size(), "adam: parameter list changed between steps");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    for (size_t pi = 0; pi < params.size(); ++pi) {
        Tensor& p = *params[pi];
        p.ensure_grad();
        require(m_[pi].size() == p.data.size(), "adam: parameter shape changed");
        auto& m = m_[pi];
        auto& v = v_[pi];
        for (size_t i = 0; i < p.data.size(); ++i) {
            const double g = p.grad[i];
            m[i] = beta1 * m[i] + (1.0 - beta1) * g;
            v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p.data[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
        p.zero_grad();
    }
}

}  // namespace sdlab
