#include "audioml/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "audioml/losses.hpp"
#include "audioml/rng.hpp"

namespace audioml::trainer {

namespace {

// Fixed substream keys; fit_supervised and the student loop must derive the
// labeled shuffle identically for the lambda = 0 reduction to be exact.
constexpr std::uint64_t kShuffleKey = 1;
constexpr std::uint64_t kUnlabeledShuffleKey = 2;
constexpr std::uint64_t kNoiseKey = 3;

int resolve_n_classes(const LabeledSet& data, const TrainConfig& cfg) {
  if (cfg.n_classes > 0) return cfg.n_classes;
  int max_label = -1;
  for (int l : data.labels) max_label = std::max(max_label, l);
  return max_label + 1;
}

void check_labeled(const LabeledSet& data, int n_classes, const char* who) {
  const Eigen::Index n = data.features.rows();
  if (n == 0) throw ValueError(std::string(who) + ": empty labeled set");
  if (static_cast<Eigen::Index>(data.labels.size()) != n)
    throw ValueError(std::string(who) + ": label count does not match rows");
  for (int l : data.labels)
    if (l < 0 || l >= n_classes)
      throw ValueError(std::string(who) + ": label " + std::to_string(l) +
                       " outside [0, " + std::to_string(n_classes) + ")");
}

void check_config(const TrainConfig& cfg, const char* who) {
  if (cfg.learning_rate <= 0.0)
    throw ValueError(std::string(who) + ": learning_rate must be positive");
  if (cfg.epochs < 0)
    throw ValueError(std::string(who) + ": epochs must be >= 0");
  if (cfg.batch_size < 0)
    throw ValueError(std::string(who) + ": batch_size must be >= 0");
  if (cfg.lambda < 0.0)
    throw ValueError(std::string(who) + ": lambda must be >= 0");
  if (cfg.noise_std < 0.0)
    throw ValueError(std::string(who) + ": noise_std must be >= 0");
}

std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, Rng stream) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = n - 1; i > 0; --i)
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(stream.uniform_int(0, i))]);
  return idx;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m,
                            const std::vector<Eigen::Index>& idx,
                            std::size_t lo, std::size_t hi) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(hi - lo), m.cols());
  for (std::size_t i = lo; i < hi; ++i)
    out.row(static_cast<Eigen::Index>(i - lo)) = m.row(idx[i]);
  return out;
}

}  // namespace

Eigen::MatrixXd forward_logits(const LinearModel& model,
                               const Eigen::MatrixXd& features) {
  if (features.cols() != model.W.cols())
    throw ValueError("forward_logits: feature dim " +
                     std::to_string(static_cast<long long>(features.cols())) +
                     " does not match model dim " +
                     std::to_string(model.feature_dim()));
  return (features * model.W.transpose()).rowwise() + model.b.transpose();
}

double accuracy(const LinearModel& model, const LabeledSet& data) {
  check_labeled(data, model.n_classes(), "accuracy");
  const Eigen::MatrixXd logits = forward_logits(model, data.features);
  long correct = 0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Eigen::Index arg = 0;
    logits.row(r).maxCoeff(&arg);
    if (static_cast<int>(arg) == data.labels[static_cast<std::size_t>(r)])
      ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.rows());
}

FitResult fit_supervised(const LabeledSet& data, const TrainConfig& cfg) {
  check_config(cfg, "fit_supervised");
  const int n_classes = resolve_n_classes(data, cfg);
  if (n_classes < 1) throw ValueError("fit_supervised: no classes");
  check_labeled(data, n_classes, "fit_supervised");

  const Eigen::Index n = data.features.rows();
  const Eigen::Index d = data.features.cols();
  const Eigen::Index batch =
      cfg.batch_size == 0 ? n : std::min<Eigen::Index>(cfg.batch_size, n);

  FitResult result;
  result.model.W = Eigen::MatrixXd::Zero(n_classes, d);
  result.model.b = Eigen::VectorXd::Zero(n_classes);
  const Rng root(cfg.seed);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::vector<Eigen::Index> idx =
        shuffled_indices(n, root.child(kShuffleKey, static_cast<std::uint64_t>(epoch)));
    double epoch_loss = 0.0;
    long steps = 0;
    for (std::size_t lo = 0; lo < static_cast<std::size_t>(n);
         lo += static_cast<std::size_t>(batch)) {
      const std::size_t hi =
          std::min(lo + static_cast<std::size_t>(batch),
                   static_cast<std::size_t>(n));
      const Eigen::MatrixXd xb = gather_rows(data.features, idx, lo, hi);
      std::vector<int> yb(hi - lo);
      for (std::size_t i = lo; i < hi; ++i)
        yb[i - lo] = data.labels[static_cast<std::size_t>(idx[i])];

      const Eigen::MatrixXd logits = forward_logits(result.model, xb);
      const losses::LossGrad lg = losses::softmax_cross_entropy(logits, yb);
      result.model.W -= cfg.learning_rate * (lg.grad.transpose() * xb);
      result.model.b -= cfg.learning_rate * lg.grad.colwise().sum().transpose();
      epoch_loss += lg.loss;
      ++steps;
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(steps));
  }
  return result;
}

NoisyStudentResult noisy_student_train(const LabeledSet& labeled,
                                       const UnlabeledSet& unlabeled,
                                       const TrainConfig& teacher_cfg,
                                       const TrainConfig& student_cfg) {
  check_config(teacher_cfg, "noisy_student_train(teacher)");
  check_config(student_cfg, "noisy_student_train(student)");
  if (unlabeled.features.rows() == 0)
    throw ValueError("noisy_student_train: empty unlabeled set");
  if (unlabeled.features.cols() != labeled.features.cols())
    throw ValueError("noisy_student_train: labeled/unlabeled feature dims "
                     "disagree");

  NoisyStudentResult result;
  FitResult teacher_fit = fit_supervised(labeled, teacher_cfg);
  result.teacher = teacher_fit.model;
  result.teacher_loss_trace = std::move(teacher_fit.loss_trace);

  const int n_classes = result.teacher.n_classes();
  check_labeled(labeled, n_classes, "noisy_student_train");

  const Eigen::Index n = labeled.features.rows();
  const Eigen::Index n_u = unlabeled.features.rows();
  const Eigen::Index d = labeled.features.cols();
  const Eigen::Index batch =
      student_cfg.batch_size == 0
          ? n
          : std::min<Eigen::Index>(student_cfg.batch_size, n);
  const Eigen::Index batch_u = std::min<Eigen::Index>(
      student_cfg.batch_size == 0 ? n_u : student_cfg.batch_size, n_u);

  LinearModel& student = result.student;
  student.W = Eigen::MatrixXd::Zero(n_classes, d);
  student.b = Eigen::VectorXd::Zero(n_classes);
  const Rng root(student_cfg.seed);

  for (int epoch = 0; epoch < student_cfg.epochs; ++epoch) {
    const std::vector<Eigen::Index> idx = shuffled_indices(
        n, root.child(kShuffleKey, static_cast<std::uint64_t>(epoch)));
    const std::vector<Eigen::Index> idx_u = shuffled_indices(
        n_u, root.child(kUnlabeledShuffleKey, static_cast<std::uint64_t>(epoch)));
    Rng noise_stream =
        root.child(kNoiseKey, static_cast<std::uint64_t>(epoch));

    double epoch_loss = 0.0;
    long steps = 0;
    std::size_t cursor_u = 0;
    for (std::size_t lo = 0; lo < static_cast<std::size_t>(n);
         lo += static_cast<std::size_t>(batch)) {
      const std::size_t hi = std::min(lo + static_cast<std::size_t>(batch),
                                      static_cast<std::size_t>(n));
      const Eigen::MatrixXd xb = gather_rows(labeled.features, idx, lo, hi);
      std::vector<int> yb(hi - lo);
      for (std::size_t i = lo; i < hi; ++i)
        yb[i - lo] = labeled.labels[static_cast<std::size_t>(idx[i])];

      // Supervised term on the labeled batch.
      const Eigen::MatrixXd logits_l = forward_logits(student, xb);
      const losses::LossGrad l1 = losses::softmax_cross_entropy(logits_l, yb);

      // Pseudo-label term: unlabeled batches cycle within the epoch's
      // shuffled order.
      if (cursor_u + static_cast<std::size_t>(batch_u) >
          static_cast<std::size_t>(n_u))
        cursor_u = 0;
      const Eigen::MatrixXd zb = gather_rows(unlabeled.features, idx_u,
                                             cursor_u, cursor_u + batch_u);
      cursor_u += static_cast<std::size_t>(batch_u);

      Eigen::MatrixXd pseudo =
          losses::softmax(forward_logits(result.teacher, zb));
      if (student_cfg.pseudo_label_mode == PseudoLabelMode::hard)
        for (Eigen::Index r = 0; r < pseudo.rows(); ++r)
          pseudo.row(r) =
              losses::harden_pseudo_label(pseudo.row(r).transpose());

      Eigen::MatrixXd zb_noised = zb;
      if (student_cfg.noise_std > 0.0)
        for (Eigen::Index r = 0; r < zb_noised.rows(); ++r)
          for (Eigen::Index c = 0; c < zb_noised.cols(); ++c)
            zb_noised(r, c) += student_cfg.noise_std * noise_stream.normal();

      const Eigen::MatrixXd logits_u = forward_logits(student, zb_noised);
      const losses::LossGrad l2 =
          losses::soft_target_cross_entropy(logits_u, pseudo);

      const double lambda = student_cfg.lambda;
      student.W -= student_cfg.learning_rate *
                   (l1.grad.transpose() * xb +
                    lambda * (l2.grad.transpose() * zb_noised));
      student.b -= student_cfg.learning_rate *
                   (l1.grad.colwise().sum().transpose() +
                    lambda * l2.grad.colwise().sum().transpose());
      epoch_loss += losses::combine_semi_supervised(l1.loss, l2.loss, lambda);
      ++steps;
    }
    result.student_loss_trace.push_back(epoch_loss /
                                        static_cast<double>(steps));
  }
  return result;
}

LinearEvalResult linear_evaluation(const LabeledSet& train_features,
                                   const LabeledSet& test_features,
                                   const TrainConfig& cfg) {
  FitResult fit = fit_supervised(train_features, cfg);
  LinearEvalResult out;
  out.test_accuracy = accuracy(fit.model, test_features);
  out.model = std::move(fit.model);
  out.loss_trace = std::move(fit.loss_trace);
  return out;
}

}  // namespace audioml::trainer
