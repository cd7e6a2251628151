#include "audioml/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace audioml::metrics {

void PredictionSet::validate() const {
  if (scores.rows() != truth.rows() || scores.cols() != truth.cols())
    throw ValueError("PredictionSet: scores and truth dimensions disagree");
  if (!item_ids.empty()) {
    if (static_cast<Eigen::Index>(item_ids.size()) != scores.rows())
      throw ValueError("PredictionSet: id count does not match score rows");
    std::set<std::string> seen;
    for (const auto& id : item_ids)
      if (!seen.insert(id).second)
        throw ValueError("PredictionSet: duplicate item id '" + id + "'");
  }
}

ConfusionCounts confusion_counts(const std::vector<bool>& truth,
                                 const std::vector<bool>& predicted) {
  if (truth.size() != predicted.size())
    throw ValueError("confusion_counts: length mismatch (" +
                     std::to_string(truth.size()) + " vs " +
                     std::to_string(predicted.size()) + ")");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] && predicted[i]) ++c.tp;
    else if (!truth[i] && predicted[i]) ++c.fp;
    else if (truth[i] && !predicted[i]) ++c.fn_;
    else ++c.tn;
  }
  return c;
}

BinaryMetrics binary_metrics(const ConfusionCounts& c, double beta) {
  if (c.total() <= 0) throw ValueError("binary_metrics: empty counts");
  if (beta <= 0.0) throw ValueError("binary_metrics: beta must be positive");
  BinaryMetrics m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());

  if (c.tp + c.fp > 0)
    m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  else
    m.precision_degenerate = true;

  if (c.tp + c.fn_ > 0)
    m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn_);
  else
    m.recall_degenerate = true;

  if (c.fp + c.tn > 0)
    m.specificity = static_cast<double>(c.tn) / static_cast<double>(c.fp + c.tn);
  else
    m.specificity_degenerate = true;

  const double b2 = beta * beta;
  const double denom = b2 * m.precision + m.recall;
  if (denom > 0.0)
    m.f_beta = (1.0 + b2) * m.precision * m.recall / denom;
  else
    m.f_beta_degenerate = true;

  return m;
}

std::vector<bool> threshold_scores(const Eigen::VectorXd& scores, double tau) {
  std::vector<bool> out(static_cast<std::size_t>(scores.size()));
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    out[static_cast<std::size_t>(i)] = scores[i] >= tau;
  return out;
}

namespace {

void check_rank_input(const std::vector<bool>& truth,
                      const Eigen::VectorXd& scores, const char* who) {
  if (static_cast<Eigen::Index>(truth.size()) != scores.size())
    throw ValueError(std::string(who) + ": length mismatch");
  if (truth.empty()) throw ValueError(std::string(who) + ": empty input");
}

}  // namespace

double roc_auc(const std::vector<bool>& truth, const Eigen::VectorXd& scores) {
  check_rank_input(truth, scores, "roc_auc");
  long n_pos = 0;
  for (bool t : truth) n_pos += t ? 1 : 0;
  const long n = static_cast<long>(truth.size());
  const long n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw ValueError("roc_auc: undefined for single-class truth (" +
                     std::to_string(n_pos) + " positives of " +
                     std::to_string(n) + ")");

  std::vector<long> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0L);
  std::sort(order.begin(), order.end(),
            [&scores](long a, long b) { return scores[a] < scores[b]; });

  // Rank sum of positives with average ranks across tie groups. The group
  // arithmetic stays on integers and halves, so the result is exact and
  // matches explicit pair counting bit for bit.
  double rank_sum_pos = 0.0;
  long i = 0;
  while (i < n) {
    long j = i;
    while (j < n && scores[order[static_cast<std::size_t>(j)]] ==
                        scores[order[static_cast<std::size_t>(i)]])
      ++j;
    const double avg_rank =
        static_cast<double>(i + 1 + j) / 2.0;  // ranks are 1-based
    for (long k = i; k < j; ++k)
      if (truth[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])])
        rank_sum_pos += avg_rank;
    i = j;
  }
  const double numer =
      rank_sum_pos - static_cast<double>(n_pos) *
                         static_cast<double>(n_pos + 1) / 2.0;
  return numer / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double average_precision(const std::vector<bool>& truth,
                         const Eigen::VectorXd& scores) {
  check_rank_input(truth, scores, "average_precision");
  long n_pos = 0;
  for (bool t : truth) n_pos += t ? 1 : 0;
  if (n_pos == 0)
    throw ValueError("average_precision: no positive items");

  const long n = static_cast<long>(truth.size());
  std::vector<long> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0L);
  std::sort(order.begin(), order.end(),
            [&scores](long a, long b) { return scores[a] > scores[b]; });

  double ap = 0.0;
  double recall_prev = 0.0;
  long tp = 0, fp = 0;
  long i = 0;
  while (i < n) {
    long j = i;  // tie group shares one threshold step
    while (j < n && scores[order[static_cast<std::size_t>(j)]] ==
                        scores[order[static_cast<std::size_t>(i)]])
      ++j;
    for (long k = i; k < j; ++k) {
      if (truth[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])])
        ++tp;
      else
        ++fp;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    const double precision =
        static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - recall_prev) * precision;
    recall_prev = recall;
    i = j;
  }
  return ap;
}

MacroResult macro_multilabel(const PredictionSet& pred_set, RankMetric metric) {
  pred_set.validate();
  const Eigen::Index n_classes = pred_set.scores.cols();
  if (n_classes == 0) throw ValueError("macro_multilabel: zero classes");

  MacroResult result;
  result.per_class =
      Eigen::VectorXd::Constant(n_classes,
                                std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  long evaluable = 0;
  for (Eigen::Index c = 0; c < n_classes; ++c) {
    std::vector<bool> truth(static_cast<std::size_t>(pred_set.truth.rows()));
    for (Eigen::Index r = 0; r < pred_set.truth.rows(); ++r)
      truth[static_cast<std::size_t>(r)] = pred_set.truth(r, c);
    const Eigen::VectorXd scores = pred_set.scores.col(c);
    try {
      const double v = metric == RankMetric::roc_auc
                           ? roc_auc(truth, scores)
                           : average_precision(truth, scores);
      result.per_class[c] = v;
      sum += v;
      ++evaluable;
    } catch (const ValueError&) {
      result.skipped_classes.push_back(static_cast<int>(c));
    }
  }
  if (evaluable == 0)
    throw ValueError("macro_multilabel: no class satisfies the metric's "
                     "class-balance requirement");
  result.macro = sum / static_cast<double>(evaluable);
  return result;
}

AggregateResult aggregate_chunks(const Eigen::MatrixXd& chunk_scores,
                                 AggregateMethod method) {
  if (chunk_scores.rows() == 0 || chunk_scores.cols() == 0)
    throw ValueError("aggregate_chunks: empty input");
  AggregateResult out;
  switch (method) {
    case AggregateMethod::mean:
      out.scores = chunk_scores.colwise().mean();
      break;
    case AggregateMethod::max:
      out.scores = chunk_scores.colwise().maxCoeff();
      break;
    case AggregateMethod::majority: {
      std::vector<long> votes(static_cast<std::size_t>(chunk_scores.cols()), 0);
      for (Eigen::Index r = 0; r < chunk_scores.rows(); ++r) {
        Eigen::Index arg = 0;
        chunk_scores.row(r).maxCoeff(&arg);  // first max = lowest index
        ++votes[static_cast<std::size_t>(arg)];
      }
      int winner = 0;
      for (std::size_t c = 1; c < votes.size(); ++c)
        if (votes[c] > votes[static_cast<std::size_t>(winner)])
          winner = static_cast<int>(c);
      out.majority_class = winner;
      out.scores = Eigen::VectorXd::Zero(chunk_scores.cols());
      out.scores[winner] = 1.0;
      break;
    }
  }
  return out;
}

}  // namespace audioml::metrics
