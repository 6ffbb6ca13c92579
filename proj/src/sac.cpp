#include "sdlab/sac.hpp"

#include <algorithm>
#include <cmath>

namespace sdlab {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kLog2 = 0.6931471805599453094;

std::vector<int> net_widths(int in, int out, int hidden, int layers) {
    std::vector<int> w{in};
    for (int i = 0; i < layers; ++i) w.push_back(hidden);
    w.push_back(out);
    return w;
}

Tensor hcat(const Tensor& a, const Tensor& b) {
    require(a.rows() == b.rows(), "hcat: row count mismatch");
    const int n = a.rows(), p = a.cols(), q = b.cols();
    Tensor out = Tensor::zeros({n, p + q});
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j)
            out.data[static_cast<size_t>(i) * (p + q) + j] = a.data[static_cast<size_t>(i) * p + j];
        for (int j = 0; j < q; ++j)
            out.data[static_cast<size_t>(i) * (p + q) + p + j] =
                b.data[static_cast<size_t>(i) * q + j];
    }
    return out;
}

// log(1 - tanh(u)^2) = 2 * (log 2 - u - softplus(-2u))
double log_one_minus_tanh_sq(double u) {
    const double x = -2.0 * u;
    const double sp = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    return 2.0 * (kLog2 - u - sp);
}

}  // namespace

void ReplayBuffer::push(Transition t) {
    if (store_.size() < cap_) {
        store_.push_back(std::move(t));
    } else {
        store_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % cap_;
}

std::vector<const Transition*> ReplayBuffer::sample(int batch, Rng& rng) const {
    require(batch >= 1 && static_cast<size_t>(batch) <= store_.size(),
            "replay buffer: not enough transitions to sample");
    std::vector<const Transition*> out(batch);
    for (int i = 0; i < batch; ++i)
        out[i] = &store_[static_cast<size_t>(rng.uniform_int(static_cast<int>(store_.size())))];
    return out;
}

SacAgent::SacAgent(int obs_dim, int skill_dim, int action_dim, const SacConfig& cfg,
                   std::uint64_t seed)
    : cfg_(cfg),
      obs_dim_(obs_dim),
      skill_dim_(skill_dim),
      action_dim_(action_dim),
      log_alpha_(std::log(std::max(cfg.alpha, 1e-8))),
      actor_opt_(cfg.lr),
      q1_opt_(cfg.lr),
      q2_opt_(cfg.lr) {
    Rng rng(seed);
    const int in_actor = obs_dim + skill_dim;
    const int in_q = obs_dim + skill_dim + action_dim;
    actor = Mlp::make(net_widths(in_actor, 2 * action_dim, cfg.hidden, cfg.hidden_layers),
                      Act::relu, rng);
    q1 = Mlp::make(net_widths(in_q, 1, cfg.hidden, cfg.hidden_layers), Act::relu, rng);
    q2 = Mlp::make(net_widths(in_q, 1, cfg.hidden, cfg.hidden_layers), Act::relu, rng);
    q1_target = q1;
    q2_target = q2;
}

SacAgent::ActorSample SacAgent::sample_from(const std::vector<double>& mean_logstd,
                                            Rng& rng) const {
    ActorSample out;
    out.u.resize(action_dim_);
    out.action.resize(action_dim_);
    double logp = 0.0;
    for (int d = 0; d < action_dim_; ++d) {
        const double mean = mean_logstd[d];
        const double ls =
            std::clamp(mean_logstd[action_dim_ + d], cfg_.log_std_min, cfg_.log_std_max);
        const double eps = rng.normal();
        const double u = mean + std::exp(ls) * eps;
        out.u[d] = u;
        const double t = std::tanh(u);
        out.action[d] = cfg_.max_action * t;
        logp += -0.5 * kLog2Pi - ls - 0.5 * eps * eps;
        logp -= std::log(cfg_.max_action) + log_one_minus_tanh_sq(u);
    }
    out.log_prob = logp;
    return out;
}

std::vector<double> SacAgent::sample_action(const std::vector<double>& obs, const SkillVector& z,
                                            Rng& rng) const {
    std::vector<double> in(obs);
    in.insert(in.end(), z.z.begin(), z.z.end());
    const Tensor head = actor.forward(Tensor::row(in));
    return sample_from(head.data, rng).action;
}

std::vector<double> SacAgent::mean_action(const std::vector<double>& obs,
                                          const SkillVector& z) const {
    std::vector<double> in(obs);
    in.insert(in.end(), z.z.begin(), z.z.end());
    const Tensor head = actor.forward(Tensor::row(in));
    std::vector<double> a(action_dim_);
    for (int d = 0; d < action_dim_; ++d) a[d] = cfg_.max_action * std::tanh(head.data[d]);
    return a;
}

double SacAgent::critic_target(double r, const std::vector<double>& s_next, const SkillVector& z,
                               bool done, Rng& rng) const {
    if (done) return r;
    std::vector<double> in(s_next);
    in.insert(in.end(), z.z.begin(), z.z.end());
    const Tensor head = actor.forward(Tensor::row(in));
    const ActorSample next = sample_from(head.data, rng);
    std::vector<double> qin(in);
    qin.insert(qin.end(), next.action.begin(), next.action.end());
    const double v1 = q1_target.forward(Tensor::row(qin)).data[0];
    const double v2 = q2_target.forward(Tensor::row(qin)).data[0];
    return r + cfg_.gamma * (std::min(v1, v2) - alpha() * next.log_prob);
}

void SacAgent::polyak() {
    auto blend = [&](Mlp& target, Mlp& online) {
        auto tp = target.params();
        auto op = online.params();
        for (size_t i = 0; i < tp.size(); ++i)
            for (size_t j = 0; j < tp[i]->data.size(); ++j)
                tp[i]->data[j] = cfg_.tau * tp[i]->data[j] + (1.0 - cfg_.tau) * op[i]->data[j];
    };
    blend(q1_target, q1);
    blend(q2_target, q2);
}

SacAgent::UpdateResult SacAgent::update(const ReplayBuffer& buffer, int batch_size,
                                        const IntrinsicFn& intrinsic_fn, Rng& rng) {
    UpdateResult res;
    if (buffer.size() < static_cast<size_t>(batch_size)) return res;
    const std::vector<const Transition*> batch = buffer.sample(batch_size, rng);
    const int n = batch_size;

    Tensor S = Tensor::zeros({n, obs_dim_});
    Tensor A = Tensor::zeros({n, action_dim_});
    Tensor S2 = Tensor::zeros({n, obs_dim_});
    Tensor Z = Tensor::zeros({n, skill_dim_});
    std::vector<double> done(n);
    for (int i = 0; i < n; ++i) {
        const Transition& t = *batch[i];
        require(static_cast<int>(t.s.size()) == obs_dim_ &&
                    static_cast<int>(t.a.size()) == action_dim_ &&
                    static_cast<int>(t.z.z.size()) == skill_dim_,
                "sac update: transition shape mismatch");
        std::copy(t.s.begin(), t.s.end(), S.data.begin() + static_cast<size_t>(i) * obs_dim_);
        std::copy(t.a.begin(), t.a.end(), A.data.begin() + static_cast<size_t>(i) * action_dim_);
        std::copy(t.s_next.begin(), t.s_next.end(),
                  S2.data.begin() + static_cast<size_t>(i) * obs_dim_);
        std::copy(t.z.z.begin(), t.z.z.end(), Z.data.begin() + static_cast<size_t>(i) * skill_dim_);
        done[i] = t.done ? 1.0 : 0.0;
    }
    const std::vector<double> rewards = intrinsic_fn(batch);
    require(static_cast<int>(rewards.size()) == n, "sac update: one reward per transition");

    // targets (no gradients)
    const Tensor in2 = hcat(S2, Z);
    const Tensor head2 = actor.forward(in2);
    Tensor A2 = Tensor::zeros({n, action_dim_});
    std::vector<double> logp2(n, 0.0);
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(head2.data.begin() + static_cast<size_t>(i) * 2 * action_dim_,
                                head2.data.begin() + static_cast<size_t>(i + 1) * 2 * action_dim_);
        const ActorSample smp = sample_from(row, rng);
        std::copy(smp.action.begin(), smp.action.end(),
                  A2.data.begin() + static_cast<size_t>(i) * action_dim_);
        logp2[i] = smp.log_prob;
    }
    const Tensor qin2 = hcat(in2, A2);
    const Tensor v1 = q1_target.forward(qin2);
    const Tensor v2 = q2_target.forward(qin2);
    Tensor y = Tensor::zeros({n, 1});
    const double a_coef = alpha();
    for (int i = 0; i < n; ++i) {
        const double next_v = std::min(v1.data[i], v2.data[i]) - a_coef * logp2[i];
        y.data[i] = rewards[i] + cfg_.gamma * (1.0 - done[i]) * next_v;
    }

    // twin-critic step
    const Tensor qin = hcat(hcat(S, Z), A);
    {
        Tape tape;
        const int in = tape.constant(qin);
        const int target = tape.constant(y);
        const int e1 = tape.square(tape.sub(q1.forward(tape, in), target));
        const int e2 = tape.square(tape.sub(q2.forward(tape, in), target));
        const int loss = tape.add(tape.mean(e1), tape.mean(e2));
        res.critic_loss = tape.scalar(loss);
        tape.backward(loss);
        auto p1 = q1.params();
        q1_opt_.step(p1);
        auto p2 = q2.params();
        q2_opt_.step(p2);
    }

    // actor step; critic weights enter as constants
    const Tensor in1 = hcat(S, Z);
    {
        Tape tape;
        const int obs_z = tape.constant(in1);
        const int head = actor.forward(tape, obs_z);
        const int mean = tape.slice_cols(head, 0, action_dim_);
        const int log_std =
            tape.clamp(tape.slice_cols(head, action_dim_, 2 * action_dim_), cfg_.log_std_min,
                       cfg_.log_std_max);
        Tensor eps = Tensor::zeros({n, action_dim_});
        for (double& v : eps.data) v = rng.normal();
        const int eps_node = tape.constant(eps);
        const int u = tape.add(mean, tape.mul(tape.exp_(log_std), eps_node));
        const int act = tape.scale(tape.tanh_(u), cfg_.max_action);

        // log pi = sum_d [ -0.5 log 2pi - log_std - 0.5 eps^2 ]
        //          - sum_d [ log max_action + 2 (log 2 - u - softplus(-2u)) ]
        Tensor eps_sq_half = eps;
        for (double& v : eps_sq_half.data) v = 0.5 * v * v + 0.5 * kLog2Pi;
        const int gauss = tape.neg(
            tape.row_sum(tape.add(log_std, tape.constant(eps_sq_half))));
        const int corr_inner = tape.add(u, tape.softplus(tape.scale(u, -2.0)));
        const int corr = tape.add_scalar(tape.scale(corr_inner, -2.0),
                                         2.0 * kLog2 + std::log(cfg_.max_action));
        const int logp = tape.sub(gauss, tape.row_sum(corr));

        const int qin_node = tape.concat_cols(obs_z, act);
        const int qa = q1.forward(tape, qin_node, /*trainable=*/false);
        const int qb = q2.forward(tape, qin_node, /*trainable=*/false);
        const int qmin = tape.row_sum(tape.minimum(qa, qb));  // [n x 1] -> {n}
        const int loss = tape.mean(tape.sub(tape.scale(logp, a_coef), qmin));
        res.actor_loss = tape.scalar(loss);
        double mq = 0.0, ent = 0.0;
        for (double v : tape.val(qmin)) mq += v;
        for (double v : tape.val(logp)) ent -= v;
        res.mean_q = mq / n;
        res.entropy = ent / n;
        tape.backward(loss);
        auto pa = actor.params();
        actor_opt_.step(pa);

        if (cfg_.auto_alpha) {
            const double target_entropy = -static_cast<double>(action_dim_);
            double g = 0.0;  // d/d(log_alpha) of -log_alpha * E[logp + target_entropy]
            for (double v : tape.val(logp)) g -= v + target_entropy;
            g /= n;
            log_alpha_ -= cfg_.lr * g;
        }
    }

    polyak();
    res.alpha = a_coef;
    res.updated = true;
    return res;
}

}  // namespace sdlab
