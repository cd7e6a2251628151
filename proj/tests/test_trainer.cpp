#include <doctest.h>

#include <cmath>
#include <vector>

#include "audioml/errors.hpp"
#include "audioml/losses.hpp"
#include "audioml/rng.hpp"
#include "audioml/trainer.hpp"
#include "oracles.hpp"

using audioml::Rng;
namespace tr = audioml::trainer;

namespace {

// Well-separated Gaussian blobs, one cluster per class.
tr::LabeledSet blobs(int per_class, int n_classes, std::uint64_t seed,
                     double spread = 0.5) {
  Rng rng(seed);
  const int n = per_class * n_classes;
  tr::LabeledSet set;
  set.features.resize(n, 2);
  set.labels.resize(static_cast<std::size_t>(n));
  for (int c = 0; c < n_classes; ++c) {
    const double angle = 2.0 * M_PI * c / n_classes;
    const double cx = 3.0 * std::cos(angle);
    const double cy = 3.0 * std::sin(angle);
    for (int i = 0; i < per_class; ++i) {
      const int row = c * per_class + i;
      set.features(row, 0) = cx + spread * rng.normal();
      set.features(row, 1) = cy + spread * rng.normal();
      set.labels[static_cast<std::size_t>(row)] = c;
    }
  }
  return set;
}

bool same_model(const tr::LinearModel& a, const tr::LinearModel& b) {
  return a.W.rows() == b.W.rows() && a.W.cols() == b.W.cols() &&
         (a.W.array() == b.W.array()).all() &&
         (a.b.array() == b.b.array()).all();
}

}  // namespace

TEST_CASE("forward_logits: zero model, basis rows, and the matmul oracle") {
  tr::LinearModel zero;
  zero.W = Eigen::MatrixXd::Zero(3, 4);
  zero.b = Eigen::VectorXd::Zero(3);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 4);
  CHECK(tr::forward_logits(zero, x).cwiseAbs().maxCoeff() == 0.0);

  tr::LinearModel m;
  m.W = Eigen::MatrixXd::Random(3, 4);
  m.b = Eigen::VectorXd::Random(3);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(1, 4);
  basis(0, 2) = 1.0;
  const Eigen::MatrixXd picked = tr::forward_logits(m, basis);
  CHECK((picked.row(0).transpose() - (m.W.col(2) + m.b)).cwiseAbs()
            .maxCoeff() < 1e-15);

  const Eigen::MatrixXd logits = tr::forward_logits(m, x);
  Eigen::MatrixXd expected = oracles::naive_matmul(x, m.W.transpose());
  expected.rowwise() += m.b.transpose();
  CHECK((logits - expected).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(tr::forward_logits(m, Eigen::MatrixXd::Random(2, 5)),
                  audioml::ValueError);
}

TEST_CASE("accuracy breaks argmax ties toward the lowest class") {
  tr::LinearModel zero;
  zero.W = Eigen::MatrixXd::Zero(3, 2);
  zero.b = Eigen::VectorXd::Zero(3);
  tr::LabeledSet set;
  set.features = Eigen::MatrixXd::Random(10, 2);
  set.labels = {0, 0, 0, 1, 1, 1, 2, 2, 2, 2};
  // All logits zero -> everything predicted class 0.
  CHECK(tr::accuracy(zero, set) == doctest::Approx(0.3));
}

TEST_CASE("zero training epochs leave the zero initialization untouched") {
  const tr::LabeledSet data = blobs(20, 2, 1);
  tr::TrainConfig cfg;
  cfg.epochs = 0;
  const tr::FitResult fit = tr::fit_supervised(data, cfg);
  CHECK(fit.model.W.cwiseAbs().maxCoeff() == 0.0);
  CHECK(fit.model.b.cwiseAbs().maxCoeff() == 0.0);
  CHECK(fit.model.n_classes() == 2);
  CHECK(fit.model.feature_dim() == 2);
  CHECK(fit.loss_trace.empty());
}

TEST_CASE("separable blobs train to at least 99 percent accuracy") {
  const tr::LabeledSet data = blobs(100, 2, 2);
  tr::TrainConfig cfg;  // lr 0.1, 100 epochs
  const tr::FitResult fit = tr::fit_supervised(data, cfg);
  CHECK(tr::accuracy(fit.model, data) >= 0.99);
  REQUIRE(fit.loss_trace.size() == 100);
  CHECK(fit.loss_trace.back() < fit.loss_trace.front());
}

TEST_CASE("full-batch loss trace is nonincreasing on the convex objective") {
  const tr::LabeledSet data = blobs(30, 3, 3);
  tr::TrainConfig cfg;
  cfg.epochs = 60;
  const tr::FitResult fit = tr::fit_supervised(data, cfg);
  for (std::size_t e = 0; e + 1 < fit.loss_trace.size(); ++e)
    CHECK(fit.loss_trace[e + 1] <= fit.loss_trace[e] + 1e-12);
}

TEST_CASE("training is bit-deterministic given the seed") {
  const tr::LabeledSet data = blobs(40, 3, 4);
  tr::TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.seed = 77;
  cfg.epochs = 30;
  const tr::FitResult a = tr::fit_supervised(data, cfg);
  const tr::FitResult b = tr::fit_supervised(data, cfg);
  CHECK(same_model(a.model, b.model));
  CHECK(a.loss_trace == b.loss_trace);

  tr::TrainConfig other = cfg;
  other.seed = 78;
  const tr::FitResult c = tr::fit_supervised(data, other);
  CHECK(!same_model(a.model, c.model));  // different shuffle, different path
}

TEST_CASE("one full-batch step equals -lr times the finite-difference gradient") {
  const int n = 4, d = 3, c = 3;
  tr::LabeledSet data;
  data.features = Eigen::MatrixXd::Random(n, d);
  data.labels = {0, 2, 1, 2};
  tr::TrainConfig cfg;
  cfg.epochs = 1;
  cfg.learning_rate = 0.05;
  const tr::FitResult fit = tr::fit_supervised(data, cfg);

  const auto loss_at_w = [&](const Eigen::MatrixXd& w) {
    Eigen::MatrixXd logits = data.features * w.transpose();
    return audioml::losses::softmax_cross_entropy(logits, data.labels).loss;
  };
  const Eigen::MatrixXd fd_w = oracles::finite_difference_grad(
      loss_at_w, Eigen::MatrixXd::Zero(c, d));
  CHECK(oracles::max_rel_error(fit.model.W, -cfg.learning_rate * fd_w) <
        1e-4);
}

TEST_CASE("fit_supervised rejects degenerate configs and data") {
  const tr::LabeledSet data = blobs(10, 2, 5);
  tr::TrainConfig cfg;

  tr::TrainConfig bad_lr = cfg;
  bad_lr.learning_rate = 0.0;
  CHECK_THROWS_AS(tr::fit_supervised(data, bad_lr), audioml::ValueError);

  tr::TrainConfig bad_epochs = cfg;
  bad_epochs.epochs = -1;
  CHECK_THROWS_AS(tr::fit_supervised(data, bad_epochs), audioml::ValueError);

  tr::LabeledSet empty;
  CHECK_THROWS_AS(tr::fit_supervised(empty, cfg), audioml::ValueError);

  tr::LabeledSet bad_labels = data;
  bad_labels.labels[0] = 7;
  tr::TrainConfig two_class = cfg;
  two_class.n_classes = 2;
  CHECK_THROWS_AS(tr::fit_supervised(bad_labels, two_class),
                  audioml::ValueError);

  tr::LabeledSet mismatch = data;
  mismatch.labels.pop_back();
  CHECK_THROWS_AS(tr::fit_supervised(mismatch, cfg), audioml::ValueError);
}

TEST_CASE("lambda zero reduces the student to an independent supervised fit") {
  const tr::LabeledSet labeled = blobs(25, 2, 6);
  tr::UnlabeledSet unlabeled;
  unlabeled.features = blobs(50, 2, 7).features;

  tr::TrainConfig teacher_cfg;
  teacher_cfg.epochs = 40;
  tr::TrainConfig student_cfg;
  student_cfg.epochs = 25;
  student_cfg.lambda = 0.0;
  student_cfg.noise_std = 0.2;

  const tr::NoisyStudentResult ns =
      tr::noisy_student_train(labeled, unlabeled, teacher_cfg, student_cfg);
  const tr::FitResult plain = tr::fit_supervised(labeled, student_cfg);
  CHECK(same_model(ns.student, plain.model));
  CHECK(ns.student_loss_trace.size() == 25);

  const tr::FitResult teacher_plain = tr::fit_supervised(labeled, teacher_cfg);
  CHECK(same_model(ns.teacher, teacher_plain.model));
}

TEST_CASE("noisy student is deterministic and the student keeps pace") {
  const tr::LabeledSet labeled = blobs(10, 2, 8);
  tr::UnlabeledSet unlabeled;
  unlabeled.features = labeled.features;  // sigma 0, same features

  tr::TrainConfig cfg;
  cfg.epochs = 60;
  const tr::NoisyStudentResult a =
      tr::noisy_student_train(labeled, unlabeled, cfg, cfg);
  const tr::NoisyStudentResult b =
      tr::noisy_student_train(labeled, unlabeled, cfg, cfg);
  CHECK(same_model(a.student, b.student));
  CHECK(same_model(a.teacher, b.teacher));

  const double teacher_acc = tr::accuracy(a.teacher, labeled);
  const double student_acc = tr::accuracy(a.student, labeled);
  CHECK(student_acc >= teacher_acc - 0.01);
}

TEST_CASE("soft and hard pseudo-labels drive the student differently") {
  const tr::LabeledSet labeled = blobs(8, 2, 9, 1.5);  // overlapping blobs
  tr::UnlabeledSet unlabeled;
  unlabeled.features = blobs(60, 2, 10, 1.5).features;

  tr::TrainConfig teacher_cfg;
  teacher_cfg.epochs = 15;  // undertrained teacher: soft labels stay soft
  tr::TrainConfig soft_cfg;
  soft_cfg.epochs = 30;
  soft_cfg.pseudo_label_mode = tr::PseudoLabelMode::soft;
  tr::TrainConfig hard_cfg = soft_cfg;
  hard_cfg.pseudo_label_mode = tr::PseudoLabelMode::hard;

  const tr::NoisyStudentResult soft =
      tr::noisy_student_train(labeled, unlabeled, teacher_cfg, soft_cfg);
  const tr::NoisyStudentResult hard =
      tr::noisy_student_train(labeled, unlabeled, teacher_cfg, hard_cfg);
  CHECK(same_model(soft.teacher, hard.teacher));
  CHECK(!same_model(soft.student, hard.student));
}

TEST_CASE("student with pseudo-labels beats a 20-item teacher on blob data") {
  // Small labeled set, big unlabeled pool, held-out test set.
  const tr::LabeledSet pool = blobs(300, 2, 11, 1.2);
  tr::LabeledSet labeled, test;
  labeled.features = Eigen::MatrixXd(20, 2);
  labeled.labels.resize(20);
  test.features = Eigen::MatrixXd(200, 2);
  test.labels.resize(200);
  tr::UnlabeledSet unlabeled;
  unlabeled.features = Eigen::MatrixXd(250, 2);
  // Interleave classes when carving the pool (rows are class-sorted).
  for (int i = 0; i < 10; ++i)
    for (int c = 0; c < 2; ++c) {
      labeled.features.row(2 * i + c) = pool.features.row(c * 300 + i);
      labeled.labels[static_cast<std::size_t>(2 * i + c)] = c;
    }
  for (int i = 0; i < 100; ++i)
    for (int c = 0; c < 2; ++c) {
      test.features.row(2 * i + c) = pool.features.row(c * 300 + 10 + i);
      test.labels[static_cast<std::size_t>(2 * i + c)] = c;
    }
  for (int i = 0; i < 125; ++i)
    for (int c = 0; c < 2; ++c)
      unlabeled.features.row(2 * i + c) = pool.features.row(c * 300 + 110 + i);

  tr::TrainConfig teacher_cfg;
  teacher_cfg.epochs = 50;
  tr::TrainConfig student_cfg;
  student_cfg.epochs = 50;
  student_cfg.noise_std = 0.1;
  const tr::NoisyStudentResult ns =
      tr::noisy_student_train(labeled, unlabeled, teacher_cfg, student_cfg);
  CHECK(tr::accuracy(ns.student, test) >=
        tr::accuracy(ns.teacher, test) - 0.01);
}

TEST_CASE("noisy student input validation") {
  const tr::LabeledSet labeled = blobs(5, 2, 12);
  tr::UnlabeledSet unlabeled;
  unlabeled.features = labeled.features;
  tr::TrainConfig cfg;

  tr::TrainConfig bad_noise = cfg;
  bad_noise.noise_std = -0.5;
  CHECK_THROWS_AS(tr::noisy_student_train(labeled, unlabeled, cfg, bad_noise),
                  audioml::ValueError);

  tr::UnlabeledSet empty;
  CHECK_THROWS_AS(tr::noisy_student_train(labeled, empty, cfg, cfg),
                  audioml::ValueError);

  tr::UnlabeledSet skewed;
  skewed.features = Eigen::MatrixXd::Random(4, 5);
  CHECK_THROWS_AS(tr::noisy_student_train(labeled, skewed, cfg, cfg),
                  audioml::ValueError);
}

TEST_CASE("linear evaluation on separable features") {
  const tr::LabeledSet data = blobs(60, 3, 13);
  tr::TrainConfig cfg;
  const tr::LinearEvalResult self = tr::linear_evaluation(data, data, cfg);
  CHECK(self.test_accuracy >= 0.99);

  // Permuting test rows together with labels changes nothing.
  tr::LabeledSet shuffled = data;
  const int n = static_cast<int>(data.features.rows());
  Rng rng(14);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_int(0, i));
    shuffled.features.row(i).swap(shuffled.features.row(j));
    std::swap(shuffled.labels[static_cast<std::size_t>(i)],
              shuffled.labels[static_cast<std::size_t>(j)]);
  }
  const tr::LinearEvalResult perm = tr::linear_evaluation(data, shuffled, cfg);
  CHECK(perm.test_accuracy == doctest::Approx(self.test_accuracy));
}

TEST_CASE("constant features can only learn the majority class") {
  tr::LabeledSet train;
  train.features = Eigen::MatrixXd::Ones(10, 3);
  train.labels = {0, 0, 0, 0, 0, 0, 0, 1, 1, 1};
  tr::TrainConfig cfg;
  cfg.epochs = 200;
  const tr::LinearEvalResult res = tr::linear_evaluation(train, train, cfg);
  CHECK(res.test_accuracy == doctest::Approx(0.7));
}
