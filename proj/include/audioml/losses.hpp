#pragma once

#include <vector>

#include <Eigen/Dense>

#include "audioml/errors.hpp"

namespace audioml::losses {

// Row-wise softmax, stabilized by row-max subtraction.
Eigen::MatrixXd softmax(const Eigen::MatrixXd& logits);

struct LossGrad {
  double loss = 0.0;
  Eigen::MatrixXd grad;  // same shape as the logits argument
};

// Mean over rows of -log softmax(logits)[target]; grad = (softmax - onehot)/n.
LossGrad softmax_cross_entropy(const Eigen::MatrixXd& logits,
                               const std::vector<int>& target_class);

// Cross entropy against full target distributions (used for soft pseudo
// labels): mean over rows of -sum_c q_c log softmax(logits)_c;
// grad = (softmax - q)/n. Target rows must sum to 1.
LossGrad soft_target_cross_entropy(const Eigen::MatrixXd& logits,
                                   const Eigen::MatrixXd& target_probs);

// S[a,b] = <z_a, z_b> / (|z_a| |z_b|); symmetric, unit diagonal. Zero rows
// are rejected.
Eigen::MatrixXd cosine_similarity_matrix(const Eigen::MatrixXd& z);

struct NtXentResult {
  double loss = 0.0;
  Eigen::MatrixXd grad_i;
  Eigen::MatrixXd grad_j;
};

// Contrastive loss over the stacked batch z = [z_i; z_j] (2N rows). Anchor a
// has positive p(a) = its paired view; loss_a = -log( e^{S[a,p]/tau} /
// sum_{k != a} e^{S[a,k]/tau} ); total is the mean over all 2N anchors.
// Gradients are analytic with respect to z_i and z_j.
NtXentResult nt_xent(const Eigen::MatrixXd& z_i, const Eigen::MatrixXd& z_j,
                     double temperature);

// l_sup + lambda * l_unsup.
double combine_semi_supervised(double l_sup, double l_unsup, double lambda);

// Mean squared error between two prediction matrices whose rows are
// probability distributions (two independent augmentation draws).
double consistency_distance(const Eigen::MatrixXd& p1,
                            const Eigen::MatrixXd& p2);

// Mean over rows of -sum_c p log p, natural log, 0 log 0 := 0.
double prediction_entropy(const Eigen::MatrixXd& p);

// One-hot at the argmax; ties break toward the lowest index.
Eigen::VectorXd harden_pseudo_label(const Eigen::VectorXd& p);

}  // namespace audioml::losses
