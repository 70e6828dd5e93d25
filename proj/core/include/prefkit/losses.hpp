// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <vector>

#include "prefkit/types.hpp"

namespace prefkit {

/// log(1 + exp(x)) without overflow for any finite x.
double softplus(double x);

/// Logistic function, stable on both tails.
double sigmoid(double x);

/// log(sum(exp(v))) with max-shift.
double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v);

/// Pairwise preference loss -ln sigma(r_w - r_l), computed as
/// softplus(-(r_w - r_l)). Positive and finite for all finite inputs.
double bt_loss(double reward_preferred, double reward_rejected);

/// Listwise ranking loss over rewards ordered best-to-worst:
/// -sum_i [ r_i - logsumexp(r_i..r_k) ]. The i = k term is identically zero
/// and is included. Reduces exactly to bt_loss for k = 2.
/// Throws ListTooShort for fewer than 2 rewards.
double pl_loss(const Eigen::Ref<const Eigen::VectorXd>& rewards_ranked);

/// Policy-vs-reference ranking loss
/// -ln sigma(beta * [(logp_w - ref_w) - (logp_l - ref_l)]).
double dpo_loss(double logp_w, double logp_l, double ref_logp_w, double ref_logp_l, double beta);

/// d bt_loss / d (r_w, r_l).
struct BtGrad {
    double d_preferred;
    double d_rejected;
};
BtGrad bt_loss_grad(double reward_preferred, double reward_rejected);

/// d pl_loss / d r_i for each ranked reward. Components sum to zero.
Eigen::VectorXd pl_loss_grad(const Eigen::Ref<const Eigen::VectorXd>& rewards_ranked);

/// d dpo_loss / d each of the four log-probability inputs. Only the policy
/// pair is consumed by training; the reference side is frozen by contract.
struct DpoGrad {
    double d_logp_w;
    double d_logp_l;
    double d_ref_logp_w;
    double d_ref_logp_l;
};
DpoGrad dpo_loss_grad(double logp_w, double logp_l, double ref_logp_w, double ref_logp_l,
                      double beta);

/// (prompt, preferred, rejected) triples for pairwise training.
struct PairwiseBatch {
    struct Item {
        FeatureVector prompt;
        FeatureVector preferred;
        FeatureVector rejected;
    };
    std::vector<Item> items;

    static PairwiseBatch make(std::vector<Item> items);
};

/// (prompt, ranked responses) items for listwise training.
struct RankedBatch {
    struct Item {
        FeatureVector prompt;
        std::vector<FeatureVector> ranked;  // best to worst, k >= 2
    };
    std::vector<Item> items;

    static RankedBatch make(std::vector<Item> items);
};

/// Best-vs-worst pair view of a ranked sample (the k = 2 restriction).
PairwiseBatch::Item pair_view(const PreferenceSample& s);

}  // namespace prefkit
