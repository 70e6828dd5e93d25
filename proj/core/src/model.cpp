// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#include "prefkit/model.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "prefkit/errors.hpp"
#include "prefkit/losses.hpp"
#include "prefkit/rng.hpp"

namespace prefkit {

using nlohmann::json;

RewardLossFn ranked_loss(LossKind kind) {
    if (kind == LossKind::PlackettLuce) {
        return [](const Eigen::VectorXd& rewards) {
            return LossValue{pl_loss(rewards), pl_loss_grad(rewards)};
        };
    }
    return [](const Eigen::VectorXd& rewards) {
        const Eigen::Index k = rewards.size();
        if (k < 2) throw ListTooShort("ranked_loss needs k >= 2 rewards");
        const BtGrad g = bt_loss_grad(rewards[0], rewards[k - 1]);
        Eigen::VectorXd d = Eigen::VectorXd::Zero(k);
        d[0] = g.d_preferred;
        d[k - 1] = g.d_rejected;
        return LossValue{bt_loss(rewards[0], rewards[k - 1]), std::move(d)};
    };
}

RewardModel RewardModel::init(ModelDims dims, std::uint64_t seed, double init_std) {
    if (dims.prompt_dim < 1 || dims.response_dim < 1 || dims.hidden < 1) {
        throw ValidationError("model dims must be positive");
    }
    RewardModel m;
    m.dims_ = dims;
    m.seed_ = seed;
    Rng rng(derive_seed(seed, "model-init"));
    m.w1_.resize(dims.hidden, dims.input_dim());
    for (int r = 0; r < dims.hidden; ++r) {
        for (int c = 0; c < dims.input_dim(); ++c) m.w1_(r, c) = rng.normal(0.0, init_std);
    }
    m.bias1_ = Eigen::VectorXd::Zero(dims.hidden);
    m.w2_.resize(dims.hidden);
    for (int c = 0; c < dims.hidden; ++c) m.w2_(c) = rng.normal(0.0, init_std);
    m.bias2_ = 0.0;
    m.refresh_effective();
    return m;
}

void RewardModel::attach_adapter(int rank, std::uint64_t seed) {
    if (rank < 1) throw ValidationError("adapter rank must be >= 1");
    LowRankAdapter ad;
    Rng rng(derive_seed(seed, "adapter-init"));
    const int h = dims_.hidden;
    const int in = dims_.input_dim();
    ad.a1.resize(h, rank);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < rank; ++c) ad.a1(r, c) = rng.normal(0.0, 0.01);
    }
    ad.b1 = Eigen::MatrixXd::Zero(rank, in);
    ad.a2.resize(1, rank);
    for (int c = 0; c < rank; ++c) ad.a2(0, c) = rng.normal(0.0, 0.01);
    ad.b2 = Eigen::MatrixXd::Zero(rank, h);
    adapter_ = std::move(ad);
    refresh_effective();
}

void RewardModel::refresh_effective() {
    if (adapter_) {
        eff_w1_ = w1_ + adapter_->a1 * adapter_->b1;
        eff_w2_ = w2_ + (adapter_->a2 * adapter_->b2).row(0);
    } else {
        eff_w1_ = w1_;
        eff_w2_ = w2_;
    }
}

void RewardModel::check_input(const FeatureVector& prompt, const FeatureVector& response) const {
    if (prompt.size() != dims_.prompt_dim || response.size() != dims_.response_dim) {
        throw DimensionMismatch("score: got (" + std::to_string(prompt.size()) + ", " +
                                std::to_string(response.size()) + "), model expects (" +
                                std::to_string(dims_.prompt_dim) + ", " +
                                std::to_string(dims_.response_dim) + ")");
    }
}

double RewardModel::score(const FeatureVector& prompt, const FeatureVector& response) const {
    check_input(prompt, response);
    Eigen::VectorXd u(dims_.input_dim());
    u << prompt, response;
    const Eigen::VectorXd a = (eff_w1_ * u + bias1_).array().tanh();
    return eff_w2_.dot(a) + bias2_;
}

Eigen::VectorXd RewardModel::score_responses(const PreferenceSample& s) const {
    Eigen::VectorXd rewards(s.num_responses());
    for (int i = 0; i < s.num_responses(); ++i) rewards[i] = score(s.prompt, s.responses[i]);
    return rewards;
}

int RewardModel::base_dim() const {
    const int h = dims_.hidden;
    const int in = dims_.input_dim();
    return h * in + h + h + 1;
}

int RewardModel::trainable_dim() const {
    if (!adapter_) return base_dim();
    const int r = adapter_->rank();
    return dims_.hidden * r + r * dims_.input_dim() + r + r * dims_.hidden;
}

int RewardModel::param_dim(ParamScope scope) const {
    if (scope == ParamScope::Trainable) return trainable_dim();
    return adapter_ ? base_dim() + trainable_dim() : base_dim();
}

namespace {

void write_matrix(Eigen::VectorXd& out, Eigen::Index& at, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out[at++] = m(r, c);
    }
}

void read_matrix(const Eigen::VectorXd& in, Eigen::Index& at, Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = in[at++];
    }
}

}  // namespace

Eigen::VectorXd RewardModel::flatten(ParamScope scope) const {
    Eigen::VectorXd out(param_dim(scope));
    Eigen::Index at = 0;
    const bool base = scope == ParamScope::All || !adapter_;
    if (base) {
        write_matrix(out, at, w1_);
        for (Eigen::Index i = 0; i < bias1_.size(); ++i) out[at++] = bias1_[i];
        for (Eigen::Index i = 0; i < w2_.size(); ++i) out[at++] = w2_[i];
        out[at++] = bias2_;
    }
    if (adapter_) {
        write_matrix(out, at, adapter_->a1);
        write_matrix(out, at, adapter_->b1);
        write_matrix(out, at, adapter_->a2);
        write_matrix(out, at, adapter_->b2);
    }
    return out;
}

void RewardModel::unflatten(const Eigen::VectorXd& params, ParamScope scope) {
    if (params.size() != param_dim(scope)) {
        throw DimensionMismatch("unflatten: got " + std::to_string(params.size()) +
                                " values, expected " + std::to_string(param_dim(scope)));
    }
    Eigen::Index at = 0;
    const bool base = scope == ParamScope::All || !adapter_;
    if (base) {
        read_matrix(params, at, w1_);
        for (Eigen::Index i = 0; i < bias1_.size(); ++i) bias1_[i] = params[at++];
        Eigen::MatrixXd w2m = w2_;
        read_matrix(params, at, w2m);
        w2_ = w2m;
        bias2_ = params[at++];
    }
    if (adapter_) {
        read_matrix(params, at, adapter_->a1);
        read_matrix(params, at, adapter_->b1);
        read_matrix(params, at, adapter_->a2);
        read_matrix(params, at, adapter_->b2);
    }
    refresh_effective();
}

LossValue RewardModel::loss_with_grad(const PreferenceSample& s, const RewardLossFn& loss_fn,
                                      Eigen::VectorXd& grad_out, ParamScope scope) const {
    check_input(s.prompt, s.responses.front());
    const Eigen::VectorXd rewards = score_responses(s);
    LossValue lv = loss_fn(rewards);
    if (lv.d_rewards.size() != rewards.size()) {
        throw DimensionMismatch("loss gradient covers " + std::to_string(lv.d_rewards.size()) +
                                " rewards, sample has " + std::to_string(rewards.size()));
    }

    const int h = dims_.hidden;
    const int in = dims_.input_dim();
    grad_out = Eigen::VectorXd::Zero(param_dim(scope));
    // All-scope gradients of an adapted model leave the frozen base slots zero.
    const Eigen::Index adapter_at = (scope == ParamScope::All && adapter_) ? base_dim() : 0;

    Eigen::VectorXd u(in);
    for (int i = 0; i < s.num_responses(); ++i) {
        const double coeff = lv.d_rewards[i];
        if (coeff == 0.0) continue;
        u << s.prompt, s.responses[i];
        const Eigen::VectorXd z = eff_w1_ * u + bias1_;
        const Eigen::VectorXd a = z.array().tanh();
        // dr/dz = (1 - a^2) .* w2_eff
        const Eigen::VectorXd dz =
            (1.0 - a.array().square()).matrix().cwiseProduct(eff_w2_.transpose());

        if (!adapter_) {
            Eigen::Index at = 0;
            // W1: dr/dW1 = dz * u^T, row-major
            for (int r = 0; r < h; ++r) {
                const double drow = coeff * dz[r];
                for (int c = 0; c < in; ++c) grad_out[at++] += drow * u[c];
            }
            for (int r = 0; r < h; ++r) grad_out[at++] += coeff * dz[r];   // b1
            for (int c = 0; c < h; ++c) grad_out[at++] += coeff * a[c];    // W2
            grad_out[at++] += coeff;                                       // b2
        } else {
            const LowRankAdapter& ad = *adapter_;
            const int r = ad.rank();
            // dr/dW1_eff = dz * u^T; chain to the factors.
            const Eigen::MatrixXd dA1 = dz * (ad.b1 * u).transpose();        // h x r
            const Eigen::MatrixXd dB1 = (ad.a1.transpose() * dz) * u.transpose();  // r x in
            const Eigen::MatrixXd dA2 = (ad.b2 * a).transpose();             // 1 x r
            const Eigen::MatrixXd dB2 = ad.a2.transpose() * a.transpose();   // r x h
            Eigen::Index at = adapter_at;
            for (int rr = 0; rr < h; ++rr)
                for (int cc = 0; cc < r; ++cc) grad_out[at++] += coeff * dA1(rr, cc);
            for (int rr = 0; rr < r; ++rr)
                for (int cc = 0; cc < in; ++cc) grad_out[at++] += coeff * dB1(rr, cc);
            for (int cc = 0; cc < r; ++cc) grad_out[at++] += coeff * dA2(0, cc);
            for (int rr = 0; rr < r; ++rr)
                for (int cc = 0; cc < h; ++cc) grad_out[at++] += coeff * dB2(rr, cc);
        }
    }
    for (Eigen::Index i = 0; i < grad_out.size(); ++i) {
        if (!std::isfinite(grad_out[i])) {
            throw NonFiniteGradient("non-finite gradient entry for sample '" + s.id + "'");
        }
    }
    return lv;
}

void RewardModel::sgd_step(const Eigen::VectorXd& grads, double lr) {
    if (grads.size() != trainable_dim()) {
        throw DimensionMismatch("sgd_step: gradient dim " + std::to_string(grads.size()) +
                                " != trainable dim " + std::to_string(trainable_dim()));
    }
    if (lr == 0.0) return;
    Eigen::VectorXd p = flatten(ParamScope::Trainable);
    p -= lr * grads;
    unflatten(p, ParamScope::Trainable);
}

bool RewardModel::equal_params(const RewardModel& other) const {
    if (dims_ != other.dims_ || has_adapter() != other.has_adapter()) return false;
    if (has_adapter() && adapter_rank() != other.adapter_rank()) return false;
    const Eigen::VectorXd a = flatten(ParamScope::All);
    const Eigen::VectorXd b = other.flatten(ParamScope::All);
    return a.size() == b.size() && a == b;
}

void RewardModel::save(const std::filesystem::path& path) const {
    json doc;
    doc["format"] = 1;
    doc["prompt_dim"] = dims_.prompt_dim;
    doc["response_dim"] = dims_.response_dim;
    doc["hidden"] = dims_.hidden;
    doc["adapter_rank"] = adapter_rank();
    doc["seed"] = seed_;
    json params = json::array();
    const Eigen::VectorXd flat = flatten(ParamScope::All);
    for (Eigen::Index i = 0; i < flat.size(); ++i) params.push_back(flat[i]);
    doc["params"] = std::move(params);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << doc.dump() << '\n';
    if (!out) throw IoError("write failed on '" + path.string() + "'");
}

RewardModel RewardModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ParseError("checkpoint '" + path.string() + "': " + e.what());
    }
    if (!doc.contains("format") || doc["format"].get<int>() != 1) {
        throw ParseError("checkpoint '" + path.string() + "': unsupported format");
    }
    ModelDims dims{doc["prompt_dim"].get<int>(), doc["response_dim"].get<int>(),
                   doc["hidden"].get<int>()};
    RewardModel m = RewardModel::init(dims, doc["seed"].get<std::uint64_t>());
    const int rank = doc["adapter_rank"].get<int>();
    if (rank > 0) m.attach_adapter(rank, doc["seed"].get<std::uint64_t>());
    const json& params = doc["params"];
    Eigen::VectorXd flat(params.size());
    Eigen::Index i = 0;
    for (const json& x : params) flat[i++] = x.get<double>();
    m.unflatten(flat, ParamScope::All);
    return m;
}

}  // namespace prefkit
