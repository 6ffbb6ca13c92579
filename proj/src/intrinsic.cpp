#include "sdlab/intrinsic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sdlab {
namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kScaleFloor = 1e-6;

std::vector<int> mlp_widths(int in, int out, int hidden, int hidden_layers) {
    std::vector<int> w{in};
    for (int i = 0; i < hidden_layers; ++i) w.push_back(hidden);
    w.push_back(out);
    return w;
}

}  // namespace

PhiNet PhiNet::make(int state_dim, int skill_dim, int hidden, int hidden_layers, Rng& rng) {
    PhiNet p;
    p.net = Mlp::make(mlp_widths(state_dim, skill_dim, hidden, hidden_layers), Act::relu, rng);
    return p;
}

Discriminator Discriminator::make(const SkillSpec& spec, int state_dim, int hidden,
                                  int hidden_layers, Rng& rng) {
    spec.validate();
    Discriminator d;
    d.spec = spec;
    d.net = Mlp::make(mlp_widths(state_dim, spec.vec_dim(), hidden, hidden_layers), Act::relu, rng);
    return d;
}

DynEnsemble DynEnsemble::make(int count, int state_dim, int action_dim, int hidden,
                              int hidden_layers, Rng& rng) {
    require(count >= 2, "dyn ensemble: at least two members required");
    DynEnsemble e;
    for (int i = 0; i < count; ++i)
        e.members.push_back(
            Mlp::make(mlp_widths(state_dim + action_dim, state_dim, hidden, hidden_layers),
                      Act::relu, rng));
    return e;
}

double dsd_reward(const PhiNet& phi, const std::vector<double>& s,
                  const std::vector<double>& s_next, const std::vector<double>& z) {
    require(static_cast<int>(z.size()) == phi.skill_dim(), "dsd_reward: skill dim mismatch");
    const std::vector<double> a = phi.embed(s);
    const std::vector<double> b = phi.embed(s_next);
    double r = 0.0;
    for (size_t i = 0; i < z.size(); ++i) r += (b[i] - a[i]) * z[i];
    return r;
}

std::vector<double> dsd_reward_batch(const PhiNet& phi, const Tensor& s, const Tensor& s_next,
                                     const Tensor& z) {
    const int n = s.rows();
    const int d = phi.skill_dim();
    require(z.rows() == n && z.cols() == d, "dsd_reward_batch: skill shape mismatch");
    const Tensor pa = phi.net.forward(s);
    const Tensor pb = phi.net.forward(s_next);
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double r = 0.0;
        for (int j = 0; j < d; ++j) {
            const size_t ix = static_cast<size_t>(i) * d + j;
            r += (pb.data[ix] - pa.data[ix]) * z.data[ix];
        }
        out[i] = r;
    }
    return out;
}

PhiObjective phi_objective(Tape& tape, PhiNet& phi, const DualState& dual, const PairBatch& batch,
                           const std::vector<double>& d) {
    const int n = batch.size();
    require(n >= 1, "phi_objective: batch must be non-empty");
    require(static_cast<int>(d.size()) == n, "phi_objective: one distance per pair required");
    const int sx = tape.constant(batch.s);
    const int sy = tape.constant(batch.s_next);
    const int zz = tape.constant(batch.z);
    const int pa = phi.net.forward(tape, sx);
    const int pb = phi.net.forward(tape, sy);
    const int dphi = tape.sub(pb, pa);
    const int reward = tape.row_dot(dphi, zz);              // {n}
    const int norm = tape.row_l2norm(dphi);                 // {n}
    const int slack = tape.sub(tape.constant(d), norm);     // {n}
    const int penalty = tape.scale(tape.min_scalar(slack, dual.epsilon), dual.lambda);
    const int objective = tape.mean(tape.add(reward, penalty));
    PhiObjective out;
    out.loss_node = tape.neg(objective);
    out.slacks = tape.val(slack);
    double mr = 0.0;
    for (double r : tape.val(reward)) mr += r;
    out.mean_reward = mr / n;
    return out;
}

PhiStepInfo phi_update(PhiNet& phi, Adam& opt, const DualState& dual, const PairBatch& batch,
                       const DistanceFn& distance_fn) {
    const int n = batch.size();
    require(n >= 1, "phi_update: batch must be non-empty");
    const int sd = batch.s.cols();
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> a(batch.s.data.begin() + static_cast<size_t>(i) * sd,
                              batch.s.data.begin() + static_cast<size_t>(i + 1) * sd);
        std::vector<double> b(batch.s_next.data.begin() + static_cast<size_t>(i) * sd,
                              batch.s_next.data.begin() + static_cast<size_t>(i + 1) * sd);
        d[i] = distance_fn(a, b);
    }
    Tape tape;
    const PhiObjective obj = phi_objective(tape, phi, dual, batch, d);
    PhiStepInfo info;
    info.loss = tape.scalar(obj.loss_node);
    info.mean_reward = obj.mean_reward;
    int violations = 0;
    double mms = 0.0;
    for (double s : obj.slacks) {
        mms += std::min(dual.epsilon, s);
        if (s < -1e-6) ++violations;
    }
    info.mean_min_slack = mms / n;
    info.violation_rate = static_cast<double>(violations) / n;
    tape.backward(obj.loss_node);
    auto ps = phi.net.params();
    opt.step(ps);
    return info;
}

void lambda_update(DualState& dual, const std::vector<double>& slacks, double lr_lambda) {
    require(!slacks.empty(), "lambda_update: slacks must be non-empty");
    double m = 0.0;
    for (double s : slacks) m += std::min(dual.epsilon, s);
    m /= static_cast<double>(slacks.size());
    dual.lambda = std::max(0.0, dual.lambda - lr_lambda * m);
}

double euclidean_distance(const std::vector<double>& s, const std::vector<double>& s_next,
                          const std::vector<double>* per_dim_scale) {
    require(s.size() == s_next.size(), "euclidean_distance: dimension mismatch");
    if (per_dim_scale)
        require(per_dim_scale->size() == s.size(), "euclidean_distance: scale length mismatch");
    double total = 0.0;
    for (size_t k = 0; k < s.size(); ++k) {
        double diff = s_next[k] - s[k];
        if (per_dim_scale) diff /= std::max((*per_dim_scale)[k], kScaleFloor);
        total += diff * diff;
    }
    return std::sqrt(total);
}

void StateNormalizer::set_preset(std::vector<double> std_per_dim) {
    mode = Mode::preset;
    scale = std::move(std_per_dim);
}

void StateNormalizer::update_ema(const Tensor& s, const Tensor& s_next) {
    require(s.shape == s_next.shape && s.shape.size() == 2, "normalizer: bad batch shape");
    const int n = s.shape[0], d = s.shape[1];
    std::vector<double> mean(d, 0.0), sq(d, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            const double diff = s_next.data[static_cast<size_t>(i) * d + j] -
                                s.data[static_cast<size_t>(i) * d + j];
            mean[j] += diff;
            sq[j] += diff * diff;
        }
    std::vector<double> batch_std(d);
    for (int j = 0; j < d; ++j) {
        mean[j] /= n;
        sq[j] /= n;
        batch_std[j] = std::sqrt(std::max(0.0, sq[j] - mean[j] * mean[j]));
    }
    if (scale.empty()) {
        scale = batch_std;
    } else {
        require(static_cast<int>(scale.size()) == d, "normalizer: dimension changed");
        for (int j = 0; j < d; ++j)
            scale[j] = ema_decay * scale[j] + (1.0 - ema_decay) * batch_std[j];
    }
    mode = Mode::ema;
}

double StateNormalizer::distance(const std::vector<double>& s,
                                 const std::vector<double>& s_next) const {
    if (mode == Mode::none || scale.empty()) return euclidean_distance(s, s_next);
    return euclidean_distance(s, s_next, &scale);
}

double diayn_reward(const Discriminator& disc, const SkillSpec& spec, const std::vector<double>& s,
                    const SkillVector& z) {
    const Tensor out = disc.net.forward(Tensor::row(s));
    const double lp = log_prior(spec, z);
    if (spec.kind == SkillKind::discrete) {
        const int cat = category_of(spec, z);
        double mx = out.data[0];
        for (double v : out.data) mx = std::max(mx, v);
        double lse = 0.0;
        for (double v : out.data) lse += std::exp(v - mx);
        const double logq = out.data[cat] - (mx + std::log(lse));
        return logq - lp;
    }
    require(static_cast<int>(z.z.size()) == out.numel(), "diayn_reward: skill dim mismatch");
    double logq = 0.0;
    for (size_t k = 0; k < z.z.size(); ++k) {
        const double diff = z.z[k] - out.data[k];
        logq += -0.5 * diff * diff - 0.5 * kLog2Pi;
    }
    return logq - lp;
}

std::vector<double> diayn_reward_batch(const Discriminator& disc, const SkillSpec& spec,
                                       const Tensor& s, const std::vector<SkillVector>& z) {
    const int n = s.rows();
    require(static_cast<int>(z.size()) == n, "diayn_reward_batch: one skill per row required");
    const Tensor out = disc.net.forward(s);
    const int m = out.cols();
    std::vector<double> rewards(n);
    for (int i = 0; i < n; ++i) {
        const double* row = out.data.data() + static_cast<size_t>(i) * m;
        const double lp = log_prior(spec, z[i]);
        if (spec.kind == SkillKind::discrete) {
            const int cat = category_of(spec, z[i]);
            double mx = row[0];
            for (int j = 1; j < m; ++j) mx = std::max(mx, row[j]);
            double lse = 0.0;
            for (int j = 0; j < m; ++j) lse += std::exp(row[j] - mx);
            rewards[i] = row[cat] - (mx + std::log(lse)) - lp;
        } else {
            double logq = 0.0;
            for (int j = 0; j < m; ++j) {
                const double diff = z[i].z[j] - row[j];
                logq += -0.5 * diff * diff - 0.5 * kLog2Pi;
            }
            rewards[i] = logq - lp;
        }
    }
    return rewards;
}

double discriminator_update(Discriminator& disc, Adam& opt, const Tensor& s,
                            const std::vector<SkillVector>& z) {
    const int n = s.rows();
    require(n >= 1 && static_cast<int>(z.size()) == n,
            "discriminator_update: batch must be non-empty with one skill per row");
    Tape tape;
    const int sx = tape.constant(s);
    const int out = disc.net.forward(tape, sx);
    int loss;
    if (disc.spec.kind == SkillKind::discrete) {
        std::vector<int> cats(n);
        for (int i = 0; i < n; ++i) cats[i] = category_of(disc.spec, z[i]);
        loss = tape.neg(tape.mean(tape.pick_cols(tape.log_softmax_rows(out), cats)));
    } else {
        Tensor target = Tensor::zeros({n, disc.spec.vec_dim()});
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < disc.spec.vec_dim(); ++j)
                target.data[static_cast<size_t>(i) * disc.spec.vec_dim() + j] = z[i].z[j];
        const int diff2 = tape.square(tape.sub(tape.constant(target), out));
        loss = tape.mean(tape.scale(tape.add_scalar(diff2, kLog2Pi), 0.5));
    }
    const double pre = tape.scalar(loss);
    tape.backward(loss);
    auto ps = disc.net.params();
    opt.step(ps);
    return pre;
}

double disagreement_reward(const DynEnsemble& ens, const std::vector<double>& s,
                           const std::vector<double>& a) {
    require(ens.size() >= 2, "disagreement_reward: at least two members required");
    std::vector<double> sa(s);
    sa.insert(sa.end(), a.begin(), a.end());
    const Tensor in = Tensor::row(sa);
    const int d = ens.members[0].out_dim();
    const int e = ens.size();
    std::vector<double> preds(static_cast<size_t>(e) * d);
    for (int m = 0; m < e; ++m) {
        const Tensor p = ens.members[m].forward(in);
        for (int j = 0; j < d; ++j) preds[static_cast<size_t>(m) * d + j] = p.data[j];
    }
    double total = 0.0;
    for (int j = 0; j < d; ++j) {
        double mean = 0.0;
        for (int m = 0; m < e; ++m) mean += preds[static_cast<size_t>(m) * d + j];
        mean /= e;
        double var = 0.0;
        for (int m = 0; m < e; ++m) {
            const double diff = preds[static_cast<size_t>(m) * d + j] - mean;
            var += diff * diff;
        }
        total += var / e;
    }
    return total;
}

std::vector<double> disagreement_reward_batch(const DynEnsemble& ens, const Tensor& s,
                                              const Tensor& a) {
    const int n = s.rows();
    require(a.rows() == n, "disagreement_reward_batch: row count mismatch");
    Tensor sa = Tensor::zeros({n, s.cols() + a.cols()});
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < s.cols(); ++j)
            sa.data[static_cast<size_t>(i) * sa.cols() + j] =
                s.data[static_cast<size_t>(i) * s.cols() + j];
        for (int j = 0; j < a.cols(); ++j)
            sa.data[static_cast<size_t>(i) * sa.cols() + s.cols() + j] =
                a.data[static_cast<size_t>(i) * a.cols() + j];
    }
    const int e = ens.size();
    const int d = ens.members[0].out_dim();
    std::vector<Tensor> preds;
    preds.reserve(e);
    for (int m = 0; m < e; ++m) preds.push_back(ens.members[m].forward(sa));
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double total = 0.0;
        for (int j = 0; j < d; ++j) {
            double mean = 0.0;
            for (int m = 0; m < e; ++m) mean += preds[m].data[static_cast<size_t>(i) * d + j];
            mean /= e;
            double var = 0.0;
            for (int m = 0; m < e; ++m) {
                const double diff = preds[m].data[static_cast<size_t>(i) * d + j] - mean;
                var += diff * diff;
            }
            total += var / e;
        }
        out[i] = total;
    }
    return out;
}

double ensemble_update(DynEnsemble& ens, std::vector<Adam>& opts, const Tensor& s, const Tensor& a,
                       const Tensor& s_next) {
    require(opts.size() == ens.members.size(), "ensemble_update: one optimizer per member");
    const int n = s.rows();
    require(n >= 1, "ensemble_update: batch must be non-empty");
    Tensor sa = Tensor::zeros({n, s.cols() + a.cols()});
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < s.cols(); ++j)
            sa.data[static_cast<size_t>(i) * sa.cols() + j] =
                s.data[static_cast<size_t>(i) * s.cols() + j];
        for (int j = 0; j < a.cols(); ++j)
            sa.data[static_cast<size_t>(i) * sa.cols() + s.cols() + j] =
                a.data[static_cast<size_t>(i) * a.cols() + j];
    }
    double total = 0.0;
    for (size_t m = 0; m < ens.members.size(); ++m) {
        Tape tape;
        const int in = tape.constant(sa);
        const int pred = ens.members[m].forward(tape, in);
        const int loss = tape.mean(tape.square(tape.sub(tape.constant(s_next), pred)));
        total += tape.scalar(loss);
        tape.backward(loss);
        auto ps = ens.members[m].params();
        opts[m].step(ps);
    }
    return total / static_cast<double>(ens.members.size());
}

}  // namespace sdlab
