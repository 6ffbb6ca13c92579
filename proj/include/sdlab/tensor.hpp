#pragma once

#include <functional>
#include <vector>

#include "sdlab/contract.hpp"
#include "sdlab/rng.hpp"

namespace sdlab {

// Dense 1-D or 2-D tensor of doubles. 2-D data is row-major. `grad` is the
// accumulator used when the tensor is registered as a trainable parameter
// on a Tape.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;
    std::vector<double> grad;

    Tensor() = default;
    Tensor(std::vector<int> shp, std::vector<double> values)
        : shape(std::move(shp)), data(std::move(values)) {
        require(static_cast<int>(data.size()) == numel_of(shape),
                "tensor data length does not match shape");
    }

    static int numel_of(const std::vector<int>& shp) {
        int n = 1;
        for (int d : shp) n *= d;
        return n;
    }

    static Tensor zeros(std::vector<int> shp) {
        const int n = numel_of(shp);
        return Tensor(std::move(shp), std::vector<double>(static_cast<size_t>(n), 0.0));
    }

    static Tensor full(std::vector<int> shp, double v) {
        const int n = numel_of(shp);
        return Tensor(std::move(shp), std::vector<double>(static_cast<size_t>(n), v));
    }

    static Tensor randn(std::vector<int> shp, Rng& rng, double scale = 1.0) {
        Tensor t = zeros(std::move(shp));
        for (double& x : t.data) x = scale * rng.normal();
        return t;
    }

    static Tensor row(std::vector<double> v) {
        const int n = static_cast<int>(v.size());
        return Tensor({n}, std::move(v));
    }

    int numel() const { return static_cast<int>(data.size()); }
    int rows() const { return shape.size() == 2 ? shape[0] : 1; }
    int cols() const { return shape.empty() ? 0 : shape.back(); }

    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
    }
    void zero_grad() { grad.assign(data.size(), 0.0); }
};

namespace kern {
// c[n x m] = a[n x k] @ b[k x m]
void matmul(const double* a, const double* b, double* c, int n, int k, int m);
// da[n x k] += dc[n x m] @ b^T
void matmul_acc_abt(const double* dc, const double* b, double* da, int n, int k, int m);
// db[k x m] += a^T @ dc[n x m]
void matmul_acc_atb(const double* a, const double* dc, double* db, int n, int k, int m);
}  // namespace kern

// Reverse-mode autodiff tape. Nodes are created in topological order and
// the graph is walked backwards once per scalar loss. A tape instance is
// built per training step and discarded afterwards; parameters persist
// outside the tape and receive accumulated gradients through `param`.
class Tape {
public:
    // leaf carrying a value only; gradients are not propagated past it
    int constant(const Tensor& t);
    int constant(std::vector<double> v);  // 1-D
    int constant_scalar(double v);

    // leaf bound to a parameter; backward() accumulates into t.grad
    int param(Tensor& t);

    // elementwise, shapes must match
    int add(int a, int b);
    int sub(int a, int b);
    int mul(int a, int b);
    int minimum(int a, int b);

    int scale(int a, double c);
    int add_scalar(int a, double c);
    int min_scalar(int a, double c);
    int clamp(int a, double lo, double hi);
    int neg(int a) { return scale(a, -1.0); }

    int relu(int a);
    int tanh_(int a);
    int exp_(int a);
    int log_(int a);
    int square(int a);
    int sqrt_(int a);
    int softplus(int a);

    // [n x k] @ [k x m] -> [n x m]
    int matmul(int a, int b);
    // [n x m] + bias[m] broadcast over rows
    int add_rowvec(int a, int bias);

    int sum(int a);   // -> scalar
    int mean(int a);  // -> scalar
    int row_sum(int a);             // [n x m] -> {n}
    int row_dot(int a, int b);      // [n x m], [n x m] -> {n}
    int row_l2norm(int a);          // [n x m] -> {n}; zero rows get zero grad
    int log_softmax_rows(int a);    // [n x m] -> [n x m]
    int pick_cols(int a, const std::vector<int>& idx);  // [n x m], idx{n} -> {n}
    int concat_cols(int a, int b);  // [n x p], [n x q] -> [n x (p+q)]
    int slice_cols(int a, int c0, int c1);

    const std::vector<double>& val(int id) const { return nodes_[id].val; }
    const std::vector<int>& shape(int id) const { return nodes_[id].shape; }
    double scalar(int id) const;

    // Accumulates d(loss)/d(param) into every registered parameter's grad.
    // `loss` must be a scalar node.
    void backward(int loss);

    size_t size() const { return nodes_.size(); }

private:
    struct Node {
        std::vector<int> shape;
        std::vector<double> val;
        std::vector<double> grad;
        int p0 = -1, p1 = -1;
        std::function<void(Tape&, int)> back;
        Tensor* sink = nullptr;
    };

    int push(Node n) {
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }
    Node& at(int id) { return nodes_[id]; }
    std::vector<double>& grad_of(int id) {
        Node& n = nodes_[id];
        if (n.grad.size() != n.val.size()) n.grad.assign(n.val.size(), 0.0);
        return n.grad;
    }

    std::vector<Node> nodes_;
};

}  // namespace sdlab
