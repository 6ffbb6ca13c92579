#include "sdlab/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdlab/serialize.hpp"

namespace sdlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kStreamPrior = 1, kStreamTrain = 2, kStreamNets = 3, kStreamEpisode = 9,
                        kStreamEval = 11, kStreamPreset = 12, kStreamHl = 13;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int episode_seed(int run_seed, int epoch, int ep) {
    return static_cast<int>(Rng::derive({kStreamEpisode, static_cast<std::uint64_t>(run_seed),
                                         static_cast<std::uint64_t>(epoch),
                                         static_cast<std::uint64_t>(ep)}) &
                            0x7fffffff);
}

std::vector<const Transition*> as_ptrs(const std::vector<Transition>& ts) {
    std::vector<const Transition*> out;
    out.reserve(ts.size());
    for (const Transition& t : ts) out.push_back(&t);
    return out;
}

Tensor stack_obs(const std::vector<const Transition*>& ts, const std::vector<int>& idx,
                 bool next) {
    const int n = static_cast<int>(ts.size());
    const int d = static_cast<int>(idx.size());
    Tensor out = Tensor::zeros({n, d});
    for (int i = 0; i < n; ++i) {
        const std::vector<double>& src = next ? ts[i]->s_next : ts[i]->s;
        for (int j = 0; j < d; ++j) out.data[static_cast<size_t>(i) * d + j] = src[idx[j]];
    }
    return out;
}

Tensor stack_actions(const std::vector<const Transition*>& ts) {
    const int n = static_cast<int>(ts.size());
    const int d = static_cast<int>(ts[0]->a.size());
    Tensor out = Tensor::zeros({n, d});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) out.data[static_cast<size_t>(i) * d + j] = ts[i]->a[j];
    return out;
}

Tensor stack_skills(const std::vector<const Transition*>& ts, int dim) {
    const int n = static_cast<int>(ts.size());
    Tensor out = Tensor::zeros({n, dim});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j) out.data[static_cast<size_t>(i) * dim + j] = ts[i]->z.z[j];
    return out;
}

std::vector<SkillVector> skills_of(const std::vector<const Transition*>& ts) {
    std::vector<SkillVector> out;
    out.reserve(ts.size());
    for (const Transition* t : ts) out.push_back(t->z);
    return out;
}

SacConfig sac_config_from(const RunConfig& cfg, double max_action) {
    SacConfig sc;
    sc.gamma = cfg.gamma;
    sc.tau = cfg.tau;
    sc.alpha = cfg.alpha;
    sc.auto_alpha = cfg.auto_alpha;
    sc.lr = cfg.lr;
    sc.max_action = max_action;
    sc.hidden = cfg.hidden_width;
    sc.hidden_layers = cfg.hidden_layers;
    return sc;
}

bool is_dual_method(Method m) {
    return m == Method::csd || m == Method::lsd || m == Method::lsd_preset ||
           m == Method::lsd_norm;
}

class TrainRun {
public:
    TrainRun(const RunConfig& cfg, std::string out_dir)
        : cfg_(cfg),
          out_(std::move(out_dir)),
          env_(EnvBox::make(cfg)),
          spec_(cfg.skill_spec()),
          mask_(cfg.mask_indices(env_.obs_dim())),
          agent_(env_.obs_dim(), cfg.skill_spec().vec_dim(), env_.action_dim(),
                 sac_config_from(cfg, env_.max_action()),
                 Rng::derive({kStreamNets, static_cast<std::uint64_t>(cfg.seed), 0})),
          buffer_(static_cast<size_t>(cfg.buffer_size)),
          prior_rng_(Rng::derive({kStreamPrior, static_cast<std::uint64_t>(cfg.seed)})),
          train_rng_(Rng::derive({kStreamTrain, static_cast<std::uint64_t>(cfg.seed)})) {
        cfg_.validate();
        const int fdim = static_cast<int>(mask_.size());
        const auto seed = static_cast<std::uint64_t>(cfg_.seed);
        {
            Rng r(Rng::derive({kStreamNets, seed, 1}));
            phi_ = PhiNet::make(fdim, spec_.vec_dim(), cfg_.hidden_width, cfg_.hidden_layers, r);
        }
        {
            Rng r(Rng::derive({kStreamNets, seed, 2}));
            density_ = CondGaussian::make(fdim, cfg_.hidden_width, cfg_.hidden_layers, r, true);
        }
        {
            Rng r(Rng::derive({kStreamNets, seed, 3}));
            disc_ = Discriminator::make(spec_, fdim, cfg_.hidden_width, cfg_.hidden_layers, r);
        }
        {
            Rng r(Rng::derive({kStreamNets, seed, 4}));
            ens_ = DynEnsemble::make(cfg_.ensemble_size, env_.obs_dim(), env_.action_dim(),
                                     cfg_.hidden_width, cfg_.hidden_layers, r);
        }
        phi_opt_ = Adam(cfg_.lr);
        density_opt_ = Adam(cfg_.lr);
        disc_opt_ = Adam(cfg_.lr);
        ens_opts_.assign(ens_.members.size(), Adam(cfg_.lr));
        dual_.lambda = cfg_.lambda_init;
        dual_.epsilon = cfg_.epsilon;
        if (cfg_.method == Method::lsd_preset) compute_preset_scale();

        if (env_.kind == EnvKind::point_push) {
            cov_agent_ = CoverageGrid({0, 1}, 0.1);
            cov_block_ = CoverageGrid({2, 3}, 0.1);
            has_block_ = true;
        } else {
            cov_agent_ = CoverageGrid({0}, 0.1);
            has_block_ = false;
        }

        policy_ = [this](const std::vector<double>& obs, const SkillVector& z, Rng& rng) {
            const double ma = env_.max_action();
            std::vector<double> a(static_cast<size_t>(env_.action_dim()));
            if (rng.uniform() < cfg_.random_action_prob) {
                for (double& v : a) v = rng.uniform(-ma, ma);
                return a;
            }
            a = agent_.sample_action(obs, z, rng);
            if (cfg_.action_noise > 0.0)
                for (double& v : a)
                    v = std::clamp(v + cfg_.action_noise * ma * rng.normal(), -ma, ma);
            return a;
        };
        intrinsic_fn_ = [this](const std::vector<const Transition*>& batch) {
            return intrinsic_batch(batch);
        };

        if (!out_.empty()) {
            fs::create_directories(out_);
            std::ofstream cfg_file(out_ + "/config.json");
            cfg_file << cfg_.to_json_text();
            metrics_of_.open(out_ + "/metrics.csv");
            traj_of_.open(out_ + "/trajectories.csv");
            events_of_.open(out_ + "/events.log");
            traj_header_written_ = false;
        }
    }

    RunArtifacts go() {
        snapshot("snapshot_init");
        metrics_csv_ = std::string(kMetricsHeader) + "\n";
        if (metrics_of_.is_open()) {
            metrics_of_ << kMetricsHeader << "\n";
            metrics_of_.flush();
        }
        for (int epoch = 1; epoch <= cfg_.epochs; ++epoch) {
            collect(epoch);
            update_models(epoch);
            update_policy(epoch);
            push_metrics(epoch);
        }
        if (cfg_.epochs >= 1) snapshot("snapshot_final");
        RunArtifacts art;
        art.config = cfg_;
        art.metrics = metrics_;
        art.out_dir = out_;
        art.metrics_csv = metrics_csv_;
        art.events = events_mem_;
        return art;
    }

private:
    void event(int epoch, const char* name) {
        events_mem_.push_back("epoch=" + std::to_string(epoch) + " event=" + name);
        if (events_of_.is_open()) {
            const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::system_clock::now().time_since_epoch())
                                 .count();
            events_of_ << "ts=" << now << " epoch=" << epoch << " event=" << name << "\n";
        }
    }

    void check_finite(double v, const char* what, int epoch) {
        if (std::isfinite(v)) return;
        if (!out_.empty()) {
            snapshot("snapshot_abort");
            std::ofstream diag(out_ + "/diagnostic.json");
            json j;
            j["epoch"] = epoch;
            j["quantity"] = what;
            j["value"] = std::isnan(v) ? "nan" : "inf";
            diag << j.dump(2) << "\n";
        }
        throw TrainError(std::string("training aborted: non-finite ") + what + " at epoch " +
                         std::to_string(epoch));
    }

    void compute_preset_scale() {
        // per-dim std of masked features over random-action rollouts
        Rng rng(Rng::derive({kStreamPreset, static_cast<std::uint64_t>(cfg_.seed)}));
        const double ma = env_.max_action();
        PolicyFn random_policy = [&](const std::vector<double>&, const SkillVector&, Rng& r) {
            std::vector<double> a(static_cast<size_t>(env_.action_dim()));
            for (double& v : a) v = r.uniform(-ma, ma);
            return a;
        };
        std::vector<std::vector<double>> states;
        SkillVector z;
        z.z.assign(spec_.vec_dim(), 0.0);
        for (int ep = 0; ep < 20; ++ep) {
            const int s = static_cast<int>(rng.next_u64() & 0x7fffffff);
            auto traj = rollout(env_, random_policy, z, env_.episode_length(), s);
            for (const Transition& t : traj) states.push_back(select(t.s));
            if (!traj.empty()) states.push_back(select(traj.back().s_next));
        }
        const int d = static_cast<int>(mask_.size());
        std::vector<double> scale(d, 1.0);
        if (!states.empty()) {
            std::vector<double> mean(d, 0.0), sq(d, 0.0);
            for (const auto& s : states)
                for (int j = 0; j < d; ++j) {
                    mean[j] += s[j];
                    sq[j] += s[j] * s[j];
                }
            for (int j = 0; j < d; ++j) {
                mean[j] /= static_cast<double>(states.size());
                sq[j] /= static_cast<double>(states.size());
                scale[j] = std::sqrt(std::max(0.0, sq[j] - mean[j] * mean[j]));
            }
        }
        norm_.set_preset(scale);
    }

    std::vector<double> select(const std::vector<double>& obs) const {
        std::vector<double> out;
        out.reserve(mask_.size());
        for (int i : mask_) out.push_back(obs[i]);
        return out;
    }

    double pair_distance(const std::vector<double>& fs, const std::vector<double>& fs2) const {
        switch (cfg_.method) {
            case Method::csd: return density_.csd_distance(fs, fs2);
            case Method::lsd: return euclidean_distance(fs, fs2);
            case Method::lsd_preset:
            case Method::lsd_norm: return norm_.distance(fs, fs2);
            default: return 0.0;
        }
    }

    std::vector<double> intrinsic_batch(const std::vector<const Transition*>& batch) const {
        std::vector<double> r(batch.size(), 0.0);
        if (batch.empty()) return r;
        if (is_dual_method(cfg_.method)) {
            const Tensor sf = stack_obs(batch, mask_, false);
            const Tensor s2f = stack_obs(batch, mask_, true);
            const Tensor zt = stack_skills(batch, spec_.vec_dim());
            r = dsd_reward_batch(phi_, sf, s2f, zt);
        } else if (cfg_.method == Method::diayn) {
            const Tensor s2f = stack_obs(batch, mask_, true);
            r = diayn_reward_batch(disc_, spec_, s2f, skills_of(batch));
        } else {
            std::vector<int> all;
            for (int i = 0; i < env_.obs_dim(); ++i) all.push_back(i);
            const Tensor s = stack_obs(batch, all, false);
            const Tensor a = stack_actions(batch);
            r = disagreement_reward_batch(ens_, s, a);
        }
        for (double& v : r) v *= cfg_.reward_coef;
        return r;
    }

    void write_traj_header(const Transition& t) {
        if (traj_header_written_ || !traj_of_.is_open()) return;
        traj_of_ << "episode,t";
        for (size_t i = 0; i < t.s.size(); ++i) traj_of_ << ",obs_" << i;
        for (size_t i = 0; i < t.a.size(); ++i) traj_of_ << ",act_" << i;
        for (size_t i = 0; i < t.z.z.size(); ++i) traj_of_ << ",skill_" << i;
        traj_of_ << "\n";
        traj_header_written_ = true;
    }

    void write_traj_rows(long long episode, const std::vector<Transition>& traj) {
        if (!traj_of_.is_open() || traj.empty()) return;
        write_traj_header(traj.front());
        for (size_t t = 0; t < traj.size(); ++t) {
            traj_of_ << episode << "," << t;
            for (double v : traj[t].s) traj_of_ << "," << fmt_double(v);
            for (double v : traj[t].a) traj_of_ << "," << fmt_double(v);
            for (double v : traj[t].z.z) traj_of_ << "," << fmt_double(v);
            traj_of_ << "\n";
        }
        // terminal state row; action fields zeroed
        const Transition& last = traj.back();
        traj_of_ << episode << "," << traj.size();
        for (double v : last.s_next) traj_of_ << "," << fmt_double(v);
        for (size_t i = 0; i < last.a.size(); ++i) traj_of_ << "," << fmt_double(0.0);
        for (double v : last.z.z) traj_of_ << "," << fmt_double(v);
        traj_of_ << "\n";
    }

    void collect(int epoch) {
        epoch_transitions_.clear();
        for (int ep = 0; ep < cfg_.episodes_per_epoch; ++ep) {
            const SkillVector z = sample_skill(spec_, prior_rng_);
            auto traj = rollout(env_, policy_, z, env_.episode_length(),
                                episode_seed(cfg_.seed, epoch, ep));
            ++episode_count_;
            if ((epoch - 1) % cfg_.traj_log_every == 0) write_traj_rows(episode_count_, traj);
            bool first = true;
            for (Transition& t : traj) {
                if (first) {
                    cov_add(t.s);
                    first = false;
                }
                cov_add(t.s_next);
                buffer_.push(t);
                epoch_transitions_.push_back(std::move(t));
            }
        }
        event(epoch, "collect");
    }

    void cov_add(const std::vector<double>& obs) {
        cov_agent_.add(obs);
        if (has_block_) cov_block_.add(obs);
    }

    void update_models(int epoch) {
        if (epoch_transitions_.empty()) return;
        const auto eps = as_ptrs(epoch_transitions_);
        const int model_steps = cfg_.grad_steps_per_episode;
        if (is_dual_method(cfg_.method)) {
            const Tensor sf = stack_obs(eps, mask_, false);
            const Tensor s2f = stack_obs(eps, mask_, true);
            const Tensor zt = stack_skills(eps, spec_.vec_dim());
            if (cfg_.method == Method::csd) {
                for (int k = 0; k < model_steps; ++k)
                    check_finite(density_.fit_step(sf, s2f, density_opt_), "density loss", epoch);
                event(epoch, "density_fit");
            } else if (cfg_.method == Method::lsd_norm) {
                norm_.update_ema(sf, s2f);
            }
            // constraint pairs are the collected (s, s') pairs themselves
            const int n = static_cast<int>(eps.size());
            std::vector<double> dists(n);
            for (int i = 0; i < n; ++i)
                dists[i] = pair_distance(select(eps[i]->s), select(eps[i]->s_next));
            PairBatch fb{sf, s2f, zt};
            for (int k = 0; k < model_steps; ++k) {
                Tape tape;
                const PhiObjective obj = phi_objective(tape, phi_, dual_, fb, dists);
                check_finite(tape.scalar(obj.loss_node), "phi loss", epoch);
                tape.backward(obj.loss_node);
                auto ps = phi_.net.params();
                phi_opt_.step(ps);
            }
            event(epoch, "phi_update");
            // multiplier step with slacks under the updated phi
            last_slacks_ = slacks_now(sf, s2f, dists);
            lambda_update(dual_, last_slacks_, cfg_.lr_lambda);
            event(epoch, "lambda_update");
            last_dists_ = dists;
        } else if (cfg_.method == Method::diayn) {
            const Tensor s2f = stack_obs(eps, mask_, true);
            const auto zs = skills_of(eps);
            for (int k = 0; k < model_steps; ++k)
                check_finite(discriminator_update(disc_, disc_opt_, s2f, zs), "discriminator loss",
                             epoch);
            event(epoch, "discriminator_update");
        } else {
            std::vector<int> all;
            for (int i = 0; i < env_.obs_dim(); ++i) all.push_back(i);
            const Tensor s = stack_obs(eps, all, false);
            const Tensor a = stack_actions(eps);
            const Tensor s2 = stack_obs(eps, all, true);
            for (int k = 0; k < model_steps; ++k)
                check_finite(ensemble_update(ens_, ens_opts_, s, a, s2), "ensemble loss", epoch);
            event(epoch, "ensemble_fit");
        }
    }

    std::vector<double> slacks_now(const Tensor& sf, const Tensor& s2f,
                                   const std::vector<double>& dists) const {
        const Tensor pa = phi_.net.forward(sf);
        const Tensor pb = phi_.net.forward(s2f);
        const int n = sf.rows(), d = phi_.skill_dim();
        std::vector<double> slacks(n);
        for (int i = 0; i < n; ++i) {
            double nrm = 0.0;
            for (int j = 0; j < d; ++j) {
                const double diff = pb.data[static_cast<size_t>(i) * d + j] -
                                    pa.data[static_cast<size_t>(i) * d + j];
                nrm += diff * diff;
            }
            slacks[i] = dists[i] - std::sqrt(nrm);
        }
        return slacks;
    }

    void update_policy(int epoch) {
        if (epoch_transitions_.empty()) return;
        if (cfg_.method == Method::csd && epoch <= cfg_.warmup_epochs) return;
        const int steps = cfg_.grad_steps_per_episode * cfg_.episodes_per_epoch;
        bool any = false;
        for (int k = 0; k < steps; ++k) {
            const SacAgent::UpdateResult res =
                agent_.update(buffer_, cfg_.batch_size, intrinsic_fn_, train_rng_);
            if (!res.updated) break;
            check_finite(res.critic_loss, "critic loss", epoch);
            check_finite(res.actor_loss, "actor loss", epoch);
            any = true;
        }
        if (any) event(epoch, "sac_update");
    }

    void push_metrics(int epoch) {
        MetricsRow row;
        row.epoch = epoch;
        row.episodes = episode_count_;
        if (!epoch_transitions_.empty()) {
            const auto eps = as_ptrs(epoch_transitions_);
            const std::vector<double> rewards = intrinsic_batch(eps);
            double m = 0.0;
            for (double r : rewards) m += r;
            row.intrinsic_reward_mean = m / static_cast<double>(rewards.size());
            if (is_dual_method(cfg_.method)) {
                row.lambda = dual_.lambda;
                const Tensor sf = stack_obs(eps, mask_, false);
                const Tensor s2f = stack_obs(eps, mask_, true);
                const std::vector<double> slacks = slacks_now(sf, s2f, last_dists_);
                int viol = 0;
                for (double s : slacks)
                    if (s < -1e-6) ++viol;
                row.constraint_violation_rate =
                    static_cast<double>(viol) / static_cast<double>(slacks.size());
                if (cfg_.method == Method::csd) row.density_nll = density_.mean_nll(sf, s2f);
            }
        }
        row.coverage_agent = cov_agent_.count();
        row.coverage_block = has_block_ ? cov_block_.count() : 0;
        metrics_.push_back(row);

        std::string line = std::to_string(row.epoch) + "," + std::to_string(row.episodes) + "," +
                           fmt_double(row.intrinsic_reward_mean) + "," + fmt_double(row.lambda) +
                           "," + fmt_double(row.constraint_violation_rate) + "," +
                           std::to_string(row.coverage_agent) + "," +
                           std::to_string(row.coverage_block) + "," +
                           fmt_double(row.density_nll);
        metrics_csv_ += line + "\n";
        if (metrics_of_.is_open()) {
            metrics_of_ << line << "\n";
            metrics_of_.flush();
        }
    }

    void snapshot(const std::string& name) {
        if (out_.empty()) return;
        const std::string dir = out_ + "/" + name;
        fs::create_directories(dir);
        {
            std::ofstream cfg_file(dir + "/config.json");
            cfg_file << cfg_.to_json_text();
        }
        json nets;
        nets["format"] = "sdlab-snapshot-1";
        nets["actor"] = mlp_to_json(agent_.actor);
        nets["q1"] = mlp_to_json(agent_.q1);
        nets["q2"] = mlp_to_json(agent_.q2);
        nets["q1_target"] = mlp_to_json(agent_.q1_target);
        nets["q2_target"] = mlp_to_json(agent_.q2_target);
        nets["log_alpha"] = agent_.log_alpha();
        nets["phi"] = mlp_to_json(phi_.net);
        nets["dual"] = {{"lambda", dual_.lambda}, {"epsilon", dual_.epsilon}};
        nets["density_mu"] = mlp_to_json(density_.mu_net);
        nets["density_logvar"] = mlp_to_json(density_.logvar_net);
        nets["density_normalize"] = density_.normalize;
        nets["discriminator"] = mlp_to_json(disc_.net);
        json ens = json::array();
        for (const Mlp& m : ens_.members) ens.push_back(mlp_to_json(m));
        nets["ensemble"] = std::move(ens);
        json nrm;
        nrm["mode"] = norm_.mode == StateNormalizer::Mode::none
                          ? "none"
                          : (norm_.mode == StateNormalizer::Mode::preset ? "preset" : "ema");
        nrm["scale"] = norm_.scale;
        nets["normalizer"] = std::move(nrm);
        std::ofstream out(dir + "/nets.json");
        out << nets.dump() << "\n";
    }

    RunConfig cfg_;
    std::string out_;
    EnvBox env_;
    SkillSpec spec_;
    std::vector<int> mask_;
    SacAgent agent_;
    PhiNet phi_;
    DualState dual_;
    CondGaussian density_;
    Discriminator disc_;
    DynEnsemble ens_;
    StateNormalizer norm_;
    Adam phi_opt_{1e-3}, density_opt_{1e-3}, disc_opt_{1e-3};
    std::vector<Adam> ens_opts_;
    ReplayBuffer buffer_;
    Rng prior_rng_, train_rng_;
    CoverageGrid cov_agent_, cov_block_;
    bool has_block_ = false;
    PolicyFn policy_;
    IntrinsicFn intrinsic_fn_;
    std::vector<Transition> epoch_transitions_;
    std::vector<double> last_dists_, last_slacks_;
    long long episode_count_ = 0;
    std::vector<MetricsRow> metrics_;
    std::vector<std::string> events_mem_;
    std::string metrics_csv_;
    std::ofstream metrics_of_, traj_of_, events_of_;
    bool traj_header_written_ = false;
};

}  // namespace

EnvBox EnvBox::make(const RunConfig& cfg) {
    EnvBox e;
    e.kind = cfg.env;
    if (cfg.env == EnvKind::point_push) {
        PointPushConfig pc;
        pc.episode_length = cfg.episode_length;
        e.push = PointPush(pc);
    } else {
        e.graph = GraphMdp::ring(cfg.graph_states, cfg.episode_length);
    }
    return e;
}

RunArtifacts train(const RunConfig& cfg, const std::string& out_dir) {
    TrainRun run(cfg, out_dir);
    return run.go();
}

SacAgent load_agent(const std::string& snapshot_dir, RunConfig* cfg_out) {
    const RunConfig cfg = RunConfig::from_json_file(snapshot_dir + "/config.json");
    const EnvBox env = EnvBox::make(cfg);
    SacAgent agent(env.obs_dim(), cfg.skill_spec().vec_dim(), env.action_dim(),
                   sac_config_from(cfg, env.max_action()), 0);
    std::ifstream in(snapshot_dir + "/nets.json");
    require(in.good(), "snapshot: cannot open " + snapshot_dir + "/nets.json");
    json nets;
    in >> nets;
    agent.actor = mlp_from_json(nets.at("actor"));
    agent.q1 = mlp_from_json(nets.at("q1"));
    agent.q2 = mlp_from_json(nets.at("q2"));
    agent.q1_target = mlp_from_json(nets.at("q1_target"));
    agent.q2_target = mlp_from_json(nets.at("q2_target"));
    agent.set_log_alpha(nets.at("log_alpha").get<double>());
    if (cfg_out) *cfg_out = cfg;
    return agent;
}

std::vector<std::vector<Transition>> eval_skills(const SacAgent& agent, const EnvBox& env,
                                                 const SkillSpec& spec, int n_skills, int horizon,
                                                 int seed, bool enumerate_discrete) {
    require(n_skills >= 0, "eval_skills: n_skills must be non-negative");
    std::vector<std::vector<Transition>> out;
    Rng zrng(Rng::derive({kStreamEval, static_cast<std::uint64_t>(seed)}));
    PolicyFn pol = [&agent](const std::vector<double>& obs, const SkillVector& z, Rng&) {
        return agent.mean_action(obs, z);
    };
    for (int k = 0; k < n_skills; ++k) {
        SkillVector z;
        if (enumerate_discrete && spec.kind == SkillKind::discrete)
            z = encode_category(spec, k % spec.discrete_count);
        else
            z = sample_skill(spec, zrng);
        const int ep_seed = static_cast<int>(
            Rng::derive({kStreamEval, static_cast<std::uint64_t>(seed),
                         static_cast<std::uint64_t>(k) + 1}) &
            0x7fffffff);
        out.push_back(rollout(env, pol, z, horizon, ep_seed));
    }
    return out;
}

void write_trajectories_csv(const std::string& path,
                            const std::vector<std::vector<Transition>>& trajectories) {
    std::ofstream out(path);
    require(out.good(), "trajectories: cannot open " + path);
    bool header = false;
    long long episode = 0;
    for (const auto& traj : trajectories) {
        ++episode;
        if (traj.empty()) continue;
        if (!header) {
            out << "episode,t";
            for (size_t i = 0; i < traj.front().s.size(); ++i) out << ",obs_" << i;
            for (size_t i = 0; i < traj.front().a.size(); ++i) out << ",act_" << i;
            for (size_t i = 0; i < traj.front().z.z.size(); ++i) out << ",skill_" << i;
            out << "\n";
            header = true;
        }
        char buf[40];
        auto fmt = [&buf](double v) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            return std::string(buf);
        };
        for (size_t t = 0; t < traj.size(); ++t) {
            out << episode << "," << t;
            for (double v : traj[t].s) out << "," << fmt(v);
            for (double v : traj[t].a) out << "," << fmt(v);
            for (double v : traj[t].z.z) out << "," << fmt(v);
            out << "\n";
        }
        const Transition& last = traj.back();
        out << episode << "," << traj.size();
        for (double v : last.s_next) out << "," << fmt(v);
        for (size_t i = 0; i < last.a.size(); ++i) out << "," << fmt(0.0);
        for (double v : last.z.z) out << "," << fmt(v);
        out << "\n";
    }
    if (!header) out << "episode,t\n";
}

double train_high_level(const SacAgent& low_level, const RunConfig& low_cfg,
                        const HighLevelConfig& cfg, std::uint64_t seed) {
    require(low_cfg.env == EnvKind::point_push, "high level: point_push only");
    PointPushConfig pc;
    pc.episode_length = cfg.episode_length;
    const PointPush env(pc);
    const SkillSpec spec = low_cfg.skill_spec();
    SacConfig scfg;
    scfg.gamma = cfg.gamma;
    scfg.tau = cfg.tau;
    scfg.alpha = cfg.alpha;
    scfg.lr = cfg.lr;
    scfg.max_action = kSkillRange;
    scfg.hidden = cfg.hidden;
    scfg.hidden_layers = cfg.hidden_layers;
    SacAgent hl(env.obs_dim() + 2, 0, spec.vec_dim(), scfg, Rng::derive({kStreamHl, seed, 0}));
    ReplayBuffer buffer(100000);
    Rng rng(Rng::derive({kStreamHl, seed, 1}));

    const double radius = cfg.success_radius;
    const IntrinsicFn goal_reward = [radius](const std::vector<const Transition*>& batch) {
        std::vector<double> r(batch.size());
        for (size_t i = 0; i < batch.size(); ++i) {
            const auto& o = batch[i]->s_next;  // [agent, block, goal]
            const double dist = std::hypot(o[2] - o[4], o[3] - o[5]);
            r[i] = dist <= radius ? 1.0 : 0.0;
        }
        return r;
    };

    const SkillVector no_skill{};
    auto run_episode = [&](bool stochastic, Rng& r, int ep_seed, bool store) {
        EnvState st = env.reset(ep_seed);
        const std::array<double, 2> goal{r.uniform(cfg.goal_min[0], cfg.goal_max[0]),
                                         r.uniform(cfg.goal_min[1], cfg.goal_max[1])};
        auto obs_g = [&goal](const EnvState& s) {
            std::vector<double> v = s.observation;
            v.push_back(goal[0]);
            v.push_back(goal[1]);
            return v;
        };
        auto reached = [&goal, radius](const EnvState& s) {
            return std::hypot(s.observation[2] - goal[0], s.observation[3] - goal[1]) <= radius;
        };
        bool success = reached(st);
        int t = 0;
        while (!success && t < cfg.episode_length) {
            const std::vector<double> seg_obs = obs_g(st);
            const std::vector<double> zs = stochastic ? hl.sample_action(seg_obs, no_skill, r)
                                                      : hl.mean_action(seg_obs, no_skill);
            SkillVector z_low;
            z_low.z = clamp_skill(zs);
            for (int k = 0; k < cfg.skill_every && t < cfg.episode_length; ++k) {
                st = env.step(st, low_level.mean_action(st.observation, z_low));
                ++t;
                if (reached(st)) {
                    success = true;
                    break;
                }
            }
            if (store) {
                Transition tr;
                tr.s = seg_obs;
                tr.a = zs;
                tr.s_next = obs_g(st);
                tr.done = success || t >= cfg.episode_length;
                buffer.push(std::move(tr));
            }
        }
        return success;
    };

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (int ep = 0; ep < cfg.episodes_per_epoch; ++ep)
            run_episode(true, rng, episode_seed(static_cast<int>(seed & 0xffff), epoch, ep), true);
        for (int k = 0; k < cfg.grad_steps; ++k)
            hl.update(buffer, cfg.batch_size, goal_reward, rng);
    }

    Rng eval_rng(Rng::derive({kStreamHl, seed, 2}));
    int successes = 0;
    for (int e = 0; e < cfg.eval_episodes; ++e)
        if (run_episode(false, eval_rng, e, false)) ++successes;
    return cfg.eval_episodes > 0 ? static_cast<double>(successes) / cfg.eval_episodes : 0.0;
}

}  // namespace sdlab
