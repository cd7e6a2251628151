#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "audioml/errors.hpp"

namespace audioml::trainer {

// Softmax linear classifier: logits = features W^T + b per row.
struct LinearModel {
  Eigen::MatrixXd W;  // (n_classes, feature_dim)
  Eigen::VectorXd b;  // (n_classes)

  int feature_dim() const { return static_cast<int>(W.cols()); }
  int n_classes() const { return static_cast<int>(W.rows()); }
};

enum class PseudoLabelMode { soft, hard };

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 100;
  int batch_size = 0;  // 0 means full batch
  std::uint64_t seed = 0;
  int n_classes = 0;  // 0 means infer as max(label) + 1
  // Noisy-student knobs: weight of the pseudo-label loss, label form, and
  // the sigma of the Gaussian feature jitter applied to unlabeled features.
  double lambda = 1.0;
  PseudoLabelMode pseudo_label_mode = PseudoLabelMode::soft;
  double noise_std = 0.0;
};

struct LabeledSet {
  Eigen::MatrixXd features;  // (n, d)
  std::vector<int> labels;   // class indices, length n
};

struct UnlabeledSet {
  Eigen::MatrixXd features;  // (n, d)
};

Eigen::MatrixXd forward_logits(const LinearModel& model,
                               const Eigen::MatrixXd& features);

// Fraction of rows whose argmax logit equals the label (argmax ties break
// toward the lowest class index).
double accuracy(const LinearModel& model, const LabeledSet& data);

struct FitResult {
  LinearModel model;
  std::vector<double> loss_trace;  // per-epoch mean of pre-update batch losses
};

// Minibatch gradient descent on softmax cross-entropy from zero-initialized
// weights; shuffling comes from a stream derived from cfg.seed, so repeated
// runs produce identical weight matrices.
FitResult fit_supervised(const LabeledSet& data, const TrainConfig& cfg);

struct NoisyStudentResult {
  LinearModel teacher;
  LinearModel student;
  std::vector<double> teacher_loss_trace;
  std::vector<double> student_loss_trace;
};

// Teacher trains on the labeled set and is then frozen. Each student step
// takes one labeled batch (supervised loss l1) and one unlabeled batch:
// the teacher predicts on clean features, the prediction becomes the pseudo
// label (soft = softmax row, hard = one-hot argmax), the student predicts on
// jittered features z + N(0, sigma^2), giving l2. The update follows
// l1 + lambda * l2 (lambda defaults to 1).
//
// Student epochs iterate the labeled set with the same shuffle stream as
// fit_supervised; lambda = 0 therefore reduces exactly to an independent
// supervised fit.
NoisyStudentResult noisy_student_train(const LabeledSet& labeled,
                                       const UnlabeledSet& unlabeled,
                                       const TrainConfig& teacher_cfg,
                                       const TrainConfig& student_cfg);

struct LinearEvalResult {
  LinearModel model;
  double test_accuracy = 0.0;
  std::vector<double> loss_trace;
};

// Fits a linear classifier on frozen train features and reports accuracy on
// the test features.
LinearEvalResult linear_evaluation(const LabeledSet& train_features,
                                   const LabeledSet& test_features,
                                   const TrainConfig& cfg);

}  // namespace audioml::trainer
