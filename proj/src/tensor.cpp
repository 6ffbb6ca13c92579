#include "sdlab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace sdlab {
namespace kern {

void matmul(const double* a, const double* b, double* c, int n, int k, int m) {
    for (int i = 0; i < n; ++i) {
        double* ci = c + static_cast<size_t>(i) * m;
        std::fill(ci, ci + m, 0.0);
        const double* ai = a + static_cast<size_t>(i) * k;
        for (int kk = 0; kk < k; ++kk) {
            const double aik = ai[kk];
            const double* bk = b + static_cast<size_t>(kk) * m;
            for (int j = 0; j < m; ++j) ci[j] += aik * bk[j];
        }
    }
}

void matmul_acc_abt(const double* dc, const double* b, double* da, int n, int k, int m) {
    for (int i = 0; i < n; ++i) {
        const double* dci = dc + static_cast<size_t>(i) * m;
        double* dai = da + static_cast<size_t>(i) * k;
        for (int kk = 0; kk < k; ++kk) {
            const double* bk = b + static_cast<size_t>(kk) * m;
            double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
            int j = 0;
            for (; j + 4 <= m; j += 4) {
                s0 += dci[j] * bk[j];
                s1 += dci[j + 1] * bk[j + 1];
                s2 += dci[j + 2] * bk[j + 2];
                s3 += dci[j + 3] * bk[j + 3];
            }
            double s = (s0 + s1) + (s2 + s3);
            for (; j < m; ++j) s += dci[j] * bk[j];
            dai[kk] += s;
        }
    }
}

void matmul_acc_atb(const double* a, const double* dc, double* db, int n, int k, int m) {
    for (int i = 0; i < n; ++i) {
        const double* ai = a + static_cast<size_t>(i) * k;
        const double* dci = dc + static_cast<size_t>(i) * m;
        for (int kk = 0; kk < k; ++kk) {
            const double aik = ai[kk];
            if (aik == 0.0) continue;
            double* dbk = db + static_cast<size_t>(kk) * m;
            for (int j = 0; j < m; ++j) dbk[j] += aik * dci[j];
        }
    }
}

}  // namespace kern

int Tape::constant(const Tensor& t) {
    Node n;
    n.shape = t.shape;
    n.val = t.data;
    return push(std::move(n));
}

int Tape::constant(std::vector<double> v) {
    Node n;
    n.shape = {static_cast<int>(v.size())};
    n.val = std::move(v);
    return push(std::move(n));
}

int Tape::constant_scalar(double v) { return constant(std::vector<double>{v}); }

int Tape::param(Tensor& t) {
    t.ensure_grad();
    Node n;
    n.shape = t.shape;
    n.val = t.data;
    n.sink = &t;
    n.back = [](Tape& tp, int id) {
        Node& self = tp.at(id);
        for (size_t i = 0; i < self.grad.size(); ++i) self.sink->grad[i] += self.grad[i];
    };
    return push(std::move(n));
}

int Tape::add(int a, int b) {
    require(at(a).shape == at(b).shape, "add: shape mismatch");
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) n.val[i] = at(a).val[i] + at(b).val[i];
    n.p0 = a;
    n.p1 = b;
    n.back = [](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        auto& gb = tp.grad_of(self.p1);
        for (size_t i = 0; i < self.grad.size(); ++i) {
            ga[i] += self.grad[i];
            gb[i] += self.grad[i];
        }
    };
    return push(std::move(n));
}

int Tape::sub(int a, int b) {
    require(at(a).shape == at(b).shape, "sub: shape mismatch");
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) n.val[i] = at(a).val[i] - at(b).val[i];
    n.p0 = a;
    n.p1 = b;
    n.back = [](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        auto& gb = tp.grad_of(self.p1);
        for (size_t i = 0; i < self.grad.size(); ++i) {
            ga[i] += self.grad[i];
            gb[i] -= self.grad[i];
        }
    };
    return push(std::move(n));
}

int Tape::mul(int a, int b) {
    require(at(a).shape == at(b).shape, "mul: shape mismatch");
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) n.val[i] = at(a).val[i] * at(b).val[i];
    n.p0 = a;
    n.p1 = b;
    n.back = [](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        auto& gb = tp.grad_of(self.p1);
        const auto& va = tp.at(self.p0).val;
        const auto& vb = tp.at(self.p1).val;
        for (size_t i = 0; i < self.grad.size(); ++i) {
            ga[i] += self.grad[i] * vb[i];
            gb[i] += self.grad[i] * va[i];
        }
    };
    return push(std::move(n));
}

int Tape::minimum(int a, int b) {
    require(at(a).shape == at(b).shape, "minimum: shape mismatch");
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) n.val[i] = std::min(at(a).val[i], at(b).val[i]);
    n.p0 = a;
    n.p1 = b;
    n.back = [](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        auto& gb = tp.grad_of(self.p1);
        const auto& va = tp.at(self.p0).val;
        const auto& vb = tp.at(self.p1).val;
        for (size_t i = 0; i < self.grad.size(); ++i) {
            if (va[i] <= vb[i])
                ga[i] += self.grad[i];
            else
                gb[i] += self.grad[i];
        }
    };
    return push(std::move(n));
}

int Tape::scale(int a, double c) {
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) n.val[i] = c * at(a).val[i];
    n.p0 = a;
    n.back = [c](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        for (size_t i = 0; i < self.grad.size(); ++i) ga[i] += c * self.grad[i];
    };
    return push(std::move(n));
}

int Tape::add_scalar(int a, double c) {
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) n.val[i] = at(a).val[i] + c;
    n.p0 = a;
    n.back = [](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        for (size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i];
    };
    return push(std::move(n));
}

int Tape::min_scalar(int a, double c) {
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) n.val[i] = std::min(at(a).val[i], c);
    n.p0 = a;
    n.back = [c](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        const auto& va = tp.at(self.p0).val;
        for (size_t i = 0; i < self.grad.size(); ++i)
            if (va[i] <= c) ga[i] += self.grad[i];
    };
    return push(std::move(n));
}

int Tape::clamp(int a, double lo, double hi) {
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) n.val[i] = std::clamp(at(a).val[i], lo, hi);
    n.p0 = a;
    n.back = [lo, hi](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        const auto& va = tp.at(self.p0).val;
        for (size_t i = 0; i < self.grad.size(); ++i)
            if (va[i] > lo && va[i] < hi) ga[i] += self.grad[i];
    };
    return push(std::move(n));
}

int Tape::relu(int a) {
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) n.val[i] = std::max(0.0, at(a).val[i]);
    n.p0 = a;
    n.back = [](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        const auto& va = tp.at(self.p0).val;
        for (size_t i = 0; i < self.grad.size(); ++i)
            if (va[i] > 0.0) ga[i] += self.grad[i];
    };
    return push(std::move(n));
}

int Tape::tanh_(int a) {
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) n.val[i] = std::tanh(at(a).val[i]);
    n.p0 = a;
    n.back = [](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        for (size_t i = 0; i < self.grad.size(); ++i)
            ga[i] += self.grad[i] * (1.0 - self.val[i] * self.val[i]);
    };
    return push(std::move(n));
}

int Tape::exp_(int a) {
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) n.val[i] = std::exp(at(a).val[i]);
    n.p0 = a;
    n.back = [](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        for (size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i] * self.val[i];
    };
    return push(std::move(n));
}

int Tape::log_(int a) {
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) n.val[i] = std::log(at(a).val[i]);
    n.p0 = a;
    n.back = [](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        const auto& va = tp.at(self.p0).val;
        for (size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i] / va[i];
    };
    return push(std::move(n));
}

int Tape::square(int a) {
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) n.val[i] = at(a).val[i] * at(a).val[i];
    n.p0 = a;
    n.back = [](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        const auto& va = tp.at(self.p0).val;
        for (size_t i = 0; i < self.grad.size(); ++i) ga[i] += 2.0 * self.grad[i] * va[i];
    };
    return push(std::move(n));
}

int Tape::sqrt_(int a) {
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) n.val[i] = std::sqrt(at(a).val[i]);
    n.p0 = a;
    n.back = [](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        for (size_t i = 0; i < self.grad.size(); ++i)
            if (self.val[i] > 0.0) ga[i] += 0.5 * self.grad[i] / self.val[i];
    };
    return push(std::move(n));
}

int Tape::softplus(int a) {
    Node n;
    n.shape = at(a).shape;
    n.val.resize(at(a).val.size());
    for (size_t i = 0; i < n.val.size(); ++i) {
        const double x = at(a).val[i];
        n.val[i] = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    }
    n.p0 = a;
    n.back = [](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        const auto& va = tp.at(self.p0).val;
        for (size_t i = 0; i < self.grad.size(); ++i) {
            const double x = va[i];
            const double sig = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                        : std::exp(x) / (1.0 + std::exp(x));
            ga[i] += self.grad[i] * sig;
        }
    };
    return push(std::move(n));
}

int Tape::matmul(int a, int b) {
    require(at(a).shape.size() == 2 && at(b).shape.size() == 2, "matmul: operands must be 2-D");
    const int n = at(a).shape[0], k = at(a).shape[1];
    const int k2 = at(b).shape[0], m = at(b).shape[1];
    require(k == k2, "matmul: inner dimensions differ");
    Node nd;
    nd.shape = {n, m};
    nd.val.resize(static_cast<size_t>(n) * m);
    kern::matmul(at(a).val.data(), at(b).val.data(), nd.val.data(), n, k, m);
    nd.p0 = a;
    nd.p1 = b;
    nd.back = [n, k, m](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        auto& gb = tp.grad_of(self.p1);
        kern::matmul_acc_abt(self.grad.data(), tp.at(self.p1).val.data(), ga.data(), n, k, m);
        kern::matmul_acc_atb(tp.at(self.p0).val.data(), self.grad.data(), gb.data(), n, k, m);
    };
    return push(std::move(nd));
}

int Tape::add_rowvec(int a, int bias) {
    require(at(a).shape.size() == 2, "add_rowvec: lhs must be 2-D");
    const int n = at(a).shape[0], m = at(a).shape[1];
    require(static_cast<int>(at(bias).val.size()) == m, "add_rowvec: bias length mismatch");
    Node nd;
    nd.shape = at(a).shape;
    nd.val.resize(at(a).val.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            nd.val[static_cast<size_t>(i) * m + j] =
                at(a).val[static_cast<size_t>(i) * m + j] + at(bias).val[j];
    nd.p0 = a;
    nd.p1 = bias;
    nd.back = [n, m](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        auto& gb = tp.grad_of(self.p1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                const double g = self.grad[static_cast<size_t>(i) * m + j];
                ga[static_cast<size_t>(i) * m + j] += g;
                gb[j] += g;
            }
    };
    return push(std::move(nd));
}

int Tape::sum(int a) {
    Node n;
    n.shape = {1};
    double s = 0.0;
    for (double v : at(a).val) s += v;
    n.val = {s};
    n.p0 = a;
    n.back = [](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        for (double& g : ga) g += self.grad[0];
    };
    return push(std::move(n));
}

int Tape::mean(int a) {
    const double inv = 1.0 / static_cast<double>(at(a).val.size());
    Node n;
    n.shape = {1};
    double s = 0.0;
    for (double v : at(a).val) s += v;
    n.val = {s * inv};
    n.p0 = a;
    n.back = [inv](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        for (double& g : ga) g += self.grad[0] * inv;
    };
    return push(std::move(n));
}

int Tape::row_sum(int a) {
    require(at(a).shape.size() == 2, "row_sum: operand must be 2-D");
    const int n = at(a).shape[0], m = at(a).shape[1];
    Node nd;
    nd.shape = {n};
    nd.val.resize(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += at(a).val[static_cast<size_t>(i) * m + j];
        nd.val[i] = s;
    }
    nd.p0 = a;
    nd.back = [n, m](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) ga[static_cast<size_t>(i) * m + j] += self.grad[i];
    };
    return push(std::move(nd));
}

int Tape::row_dot(int a, int b) {
    require(at(a).shape == at(b).shape && at(a).shape.size() == 2,
            "row_dot: operands must be 2-D with equal shape");
    const int n = at(a).shape[0], m = at(a).shape[1];
    Node nd;
    nd.shape = {n};
    nd.val.resize(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j)
            s += at(a).val[static_cast<size_t>(i) * m + j] *
                 at(b).val[static_cast<size_t>(i) * m + j];
        nd.val[i] = s;
    }
    nd.p0 = a;
    nd.p1 = b;
    nd.back = [n, m](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        auto& gb = tp.grad_of(self.p1);
        const auto& va = tp.at(self.p0).val;
        const auto& vb = tp.at(self.p1).val;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                const size_t ix = static_cast<size_t>(i) * m + j;
                ga[ix] += self.grad[i] * vb[ix];
                gb[ix] += self.grad[i] * va[ix];
            }
    };
    return push(std::move(nd));
}

int Tape::row_l2norm(int a) {
    require(at(a).shape.size() == 2, "row_l2norm: operand must be 2-D");
    const int n = at(a).shape[0], m = at(a).shape[1];
    Node nd;
    nd.shape = {n};
    nd.val.resize(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) {
            const double v = at(a).val[static_cast<size_t>(i) * m + j];
            s += v * v;
        }
        nd.val[i] = std::sqrt(s);
    }
    nd.p0 = a;
    nd.back = [n, m](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        const auto& va = tp.at(self.p0).val;
        for (int i = 0; i < n; ++i) {
            if (self.val[i] <= 0.0) continue;
            const double g = self.grad[i] / self.val[i];
            for (int j = 0; j < m; ++j) {
                const size_t ix = static_cast<size_t>(i) * m + j;
                ga[ix] += g * va[ix];
            }
        }
    };
    return push(std::move(nd));
}

int Tape::log_softmax_rows(int a) {
    require(at(a).shape.size() == 2, "log_softmax_rows: operand must be 2-D");
    const int n = at(a).shape[0], m = at(a).shape[1];
    Node nd;
    nd.shape = at(a).shape;
    nd.val.resize(at(a).val.size());
    for (int i = 0; i < n; ++i) {
        const double* xi = at(a).val.data() + static_cast<size_t>(i) * m;
        double mx = xi[0];
        for (int j = 1; j < m; ++j) mx = std::max(mx, xi[j]);
        double lse = 0.0;
        for (int j = 0; j < m; ++j) lse += std::exp(xi[j] - mx);
        lse = mx + std::log(lse);
        for (int j = 0; j < m; ++j) nd.val[static_cast<size_t>(i) * m + j] = xi[j] - lse;
    }
    nd.p0 = a;
    nd.back = [n, m](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        for (int i = 0; i < n; ++i) {
            double gsum = 0.0;
            for (int j = 0; j < m; ++j) gsum += self.grad[static_cast<size_t>(i) * m + j];
            for (int j = 0; j < m; ++j) {
                const size_t ix = static_cast<size_t>(i) * m + j;
                ga[ix] += self.grad[ix] - std::exp(self.val[ix]) * gsum;
            }
        }
    };
    return push(std::move(nd));
}

int Tape::pick_cols(int a, const std::vector<int>& idx) {
    require(at(a).shape.size() == 2, "pick_cols: operand must be 2-D");
    const int n = at(a).shape[0], m = at(a).shape[1];
    require(static_cast<int>(idx.size()) == n, "pick_cols: index count mismatch");
    for (int i : idx) require(i >= 0 && i < m, "pick_cols: index out of range");
    Node nd;
    nd.shape = {n};
    nd.val.resize(n);
    for (int i = 0; i < n; ++i) nd.val[i] = at(a).val[static_cast<size_t>(i) * m + idx[i]];
    nd.p0 = a;
    nd.back = [n, m, idx](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        for (int i = 0; i < n; ++i) ga[static_cast<size_t>(i) * m + idx[i]] += self.grad[i];
    };
    return push(std::move(nd));
}

int Tape::concat_cols(int a, int b) {
    require(at(a).shape.size() == 2 && at(b).shape.size() == 2 &&
                at(a).shape[0] == at(b).shape[0],
            "concat_cols: operands must be 2-D with equal row count");
    const int n = at(a).shape[0], p = at(a).shape[1], q = at(b).shape[1];
    Node nd;
    nd.shape = {n, p + q};
    nd.val.resize(static_cast<size_t>(n) * (p + q));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j)
            nd.val[static_cast<size_t>(i) * (p + q) + j] =
                at(a).val[static_cast<size_t>(i) * p + j];
        for (int j = 0; j < q; ++j)
            nd.val[static_cast<size_t>(i) * (p + q) + p + j] =
                at(b).val[static_cast<size_t>(i) * q + j];
    }
    nd.p0 = a;
    nd.p1 = b;
    nd.back = [n, p, q](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        auto& gb = tp.grad_of(self.p1);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < p; ++j)
                ga[static_cast<size_t>(i) * p + j] +=
                    self.grad[static_cast<size_t>(i) * (p + q) + j];
            for (int j = 0; j < q; ++j)
                gb[static_cast<size_t>(i) * q + j] +=
                    self.grad[static_cast<size_t>(i) * (p + q) + p + j];
        }
    };
    return push(std::move(nd));
}

int Tape::slice_cols(int a, int c0, int c1) {
    require(at(a).shape.size() == 2, "slice_cols: operand must be 2-D");
    const int n = at(a).shape[0], m = at(a).shape[1];
    require(0 <= c0 && c0 < c1 && c1 <= m, "slice_cols: bad column range");
    const int w = c1 - c0;
    Node nd;
    nd.shape = {n, w};
    nd.val.resize(static_cast<size_t>(n) * w);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < w; ++j)
            nd.val[static_cast<size_t>(i) * w + j] =
                at(a).val[static_cast<size_t>(i) * m + c0 + j];
    nd.p0 = a;
    nd.back = [n, m, c0, w](Tape& tp, int id) {
        Node& self = tp.at(id);
        auto& ga = tp.grad_of(self.p0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < w; ++j)
                ga[static_cast<size_t>(i) * m + c0 + j] +=
                    self.grad[static_cast<size_t>(i) * w + j];
    };
    return push(std::move(nd));
}

double Tape::scalar(int id) const {
    require(nodes_[id].val.size() == 1, "scalar: node is not a scalar");
    return nodes_[id].val[0];
}

void Tape::backward(int loss) {
    require(loss >= 0 && loss < static_cast<int>(nodes_.size()), "backward: bad node id");
    require(nodes_[loss].val.size() == 1, "backward: loss must be a scalar");
    grad_of(loss)[0] = 1.0;
    for (int i = loss; i >= 0; --i) {
        Node& n = nodes_[i];
        if (n.grad.empty() || !n.back) continue;
        n.back(*this, i);
    }
}

}  // namespace sdlab
