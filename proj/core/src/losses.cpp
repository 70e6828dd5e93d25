// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#include "prefkit/losses.hpp"

#include <cmath>

#include "prefkit/errors.hpp"

namespace prefkit {

double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
    const double m = v.maxCoeff();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::exp(v[i] - m);
    return m + std::log(acc);
}

double bt_loss(double reward_preferred, double reward_rejected) {
    return softplus(-(reward_preferred - reward_rejected));
}

double pl_loss(const Eigen::Ref<const Eigen::VectorXd>& rewards_ranked) {
    const Eigen::Index k = rewards_ranked.size();
    if (k < 2) throw ListTooShort("pl_loss needs at least 2 ranked rewards");
    double loss = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        loss += log_sum_exp(rewards_ranked.tail(k - i)) - rewards_ranked[i];
    }
    return loss;
}

double dpo_loss(double logp_w, double logp_l, double ref_logp_w, double ref_logp_l, double beta) {
    const double margin = (logp_w - ref_logp_w) - (logp_l - ref_logp_l);
    return softplus(-beta * margin);
}

BtGrad bt_loss_grad(double reward_preferred, double reward_rejected) {
    const double s = sigmoid(-(reward_preferred - reward_rejected));
    return {-s, s};
}

Eigen::VectorXd pl_loss_grad(const Eigen::Ref<const Eigen::VectorXd>& rewards_ranked) {
    const Eigen::Index k = rewards_ranked.size();
    if (k < 2) throw ListTooShort("pl_loss_grad needs at least 2 ranked rewards");
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        grad[i] -= 1.0;
        const double lse = log_sum_exp(rewards_ranked.tail(k - i));
        for (Eigen::Index j = i; j < k; ++j) {
            grad[j] += std::exp(rewards_ranked[j] - lse);
        }
    }
    return grad;
}

DpoGrad dpo_loss_grad(double logp_w, double logp_l, double ref_logp_w, double ref_logp_l,
                      double beta) {
    const double margin = (logp_w - ref_logp_w) - (logp_l - ref_logp_l);
    const double s = sigmoid(-beta * margin);
    return {-beta * s, beta * s, beta * s, -beta * s};
}

PairwiseBatch PairwiseBatch::make(std::vector<Item> items) {
    if (items.empty()) throw ValidationError("PairwiseBatch must be nonempty");
    const Eigen::Index dim = items.front().prompt.size();
    for (const Item& it : items) {
        if (it.prompt.size() != dim || it.preferred.size() != dim || it.rejected.size() != dim) {
            throw DimensionMismatch("PairwiseBatch items must share one dimension");
        }
    }
    PairwiseBatch b;
    b.items = std::move(items);
    return b;
}

RankedBatch RankedBatch::make(std::vector<Item> items) {
    if (items.empty()) throw ValidationError("RankedBatch must be nonempty");
    const Eigen::Index dim = items.front().prompt.size();
    for (const Item& it : items) {
        if (it.ranked.size() < 2) throw ListTooShort("RankedBatch item needs k >= 2 responses");
        if (it.prompt.size() != dim) throw DimensionMismatch("RankedBatch prompts must share dim");
        for (const FeatureVector& y : it.ranked) {
            if (y.size() != dim) throw DimensionMismatch("RankedBatch responses must share dim");
        }
    }
    RankedBatch b;
    b.items = std::move(items);
    return b;
}

PairwiseBatch::Item pair_view(const PreferenceSample& s) {
    return {s.prompt, s.responses.front(), s.responses.back()};
}

}  // namespace prefkit
