#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "audioml/errors.hpp"

namespace audioml::metrics {

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long fn_ = 0;
  long tn = 0;

  long total() const { return tp + fp + fn_ + tn; }
};

// recall and sensitivity are one value under two names.
struct BinaryMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double f_beta = 0.0;
  // Set when the corresponding denominator was 0/0; the value is then 0.
  bool precision_degenerate = false;
  bool recall_degenerate = false;
  bool specificity_degenerate = false;
  bool f_beta_degenerate = false;

  double sensitivity() const { return recall; }
};

// Item identifiers by class scores plus boolean truth. Single-label sets
// have exactly one true per row; ids, when present, are unique and match
// the score rows.
struct PredictionSet {
  std::vector<std::string> item_ids;
  Eigen::MatrixXd scores;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> truth;

  void validate() const;
};

ConfusionCounts confusion_counts(const std::vector<bool>& truth,
                                 const std::vector<bool>& predicted);

BinaryMetrics binary_metrics(const ConfusionCounts& c, double beta = 1.0);

// predicted[i] = scores[i] >= tau.
std::vector<bool> threshold_scores(const Eigen::VectorXd& scores, double tau);

// Probability a random positive outranks a random negative, ties credited
// 1/2 (rank statistic; equals the trapezoidal ROC area). Needs at least one
// positive and one negative.
double roc_auc(const std::vector<bool>& truth, const Eigen::VectorXd& scores);

// Step-sum average precision over distinct descending score thresholds,
// ties grouped into one step. Needs at least one positive.
double average_precision(const std::vector<bool>& truth,
                         const Eigen::VectorXd& scores);

enum class RankMetric { roc_auc, average_precision };

// per_class holds NaN at skipped classes (those violating the metric's
// class-balance requirement); macro is the unweighted mean over the rest.
struct MacroResult {
  Eigen::VectorXd per_class;
  std::vector<int> skipped_classes;
  double macro = 0.0;
};

MacroResult macro_multilabel(const PredictionSet& pred_set, RankMetric metric);

enum class AggregateMethod { mean, max, majority };

// mean/max fill scores with the columnwise statistic; majority fills scores
// with a one-hot row for the winning class and sets majority_class. Vote
// ties break toward the lowest class index.
struct AggregateResult {
  Eigen::VectorXd scores;
  int majority_class = -1;
};

AggregateResult aggregate_chunks(const Eigen::MatrixXd& chunk_scores,
                                 AggregateMethod method);

}  // namespace audioml::metrics
