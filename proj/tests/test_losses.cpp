#include <doctest.h>

#include <cmath>
#include <vector>

#include "audioml/errors.hpp"
#include "audioml/losses.hpp"
#include "audioml/rng.hpp"
#include "oracles.hpp"

using audioml::Rng;
namespace ls = audioml::losses;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed,
                              double scale = 1.0) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = scale * rng.normal();
  return m;
}

Eigen::MatrixXd random_prob_rows(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (int c = 0; c < cols; ++c) {
      m(r, c) = rng.uniform(0.05, 1.0);
      sum += m(r, c);
    }
    m.row(r) /= sum;
  }
  return m;
}

}  // namespace

TEST_CASE("softmax rows are simplex points, stable under huge logits") {
  Eigen::MatrixXd logits(2, 3);
  logits << 1000.0, 1000.0, 1000.0,
            -1000.0, 0.0, 1000.0;
  const Eigen::MatrixXd p = ls::softmax(logits);
  CHECK(p.allFinite());
  CHECK(p.row(0).sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(p(1, 2) == doctest::Approx(1.0));
}

TEST_CASE("cross entropy fixed points: uniform logits and saturated logits") {
  const Eigen::MatrixXd uniform = Eigen::MatrixXd::Zero(4, 10);
  const ls::LossGrad lg =
      ls::softmax_cross_entropy(uniform, {0, 3, 7, 9});
  CHECK(lg.loss == doctest::Approx(std::log(10.0)).epsilon(1e-12));

  Eigen::MatrixXd sure = Eigen::MatrixXd::Zero(1, 4);
  sure(0, 2) = 100.0;
  CHECK(ls::softmax_cross_entropy(sure, {2}).loss < 1e-12);

  CHECK_THROWS_AS(ls::softmax_cross_entropy(uniform, {0, 3, 7, 10}),
                  audioml::ValueError);
  CHECK_THROWS_AS(ls::softmax_cross_entropy(uniform, {0, 1}),
                  audioml::ValueError);
}

TEST_CASE("cross entropy gradient matches central finite differences") {
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd logits =
        random_matrix(5, 4, 100 + static_cast<std::uint64_t>(trial));
    Rng rng(200 + static_cast<std::uint64_t>(trial));
    std::vector<int> targets(5);
    for (auto& t : targets) t = static_cast<int>(rng.uniform_int(0, 3));

    const ls::LossGrad lg = ls::softmax_cross_entropy(logits, targets);
    CHECK(lg.loss >= 0.0);
    const Eigen::MatrixXd fd = oracles::finite_difference_grad(
        [&](const Eigen::MatrixXd& l) {
          return ls::softmax_cross_entropy(l, targets).loss;
        },
        logits);
    CHECK(oracles::max_rel_error(lg.grad, fd) < 1e-5);
  }
}

TEST_CASE("soft-target cross entropy: one-hot targets reduce to the hard case") {
  const Eigen::MatrixXd logits = random_matrix(4, 3, 300);
  const std::vector<int> targets{2, 0, 1, 1};
  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(4, 3);
  for (int r = 0; r < 4; ++r) onehot(r, targets[static_cast<std::size_t>(r)]) = 1.0;

  const ls::LossGrad hard = ls::softmax_cross_entropy(logits, targets);
  const ls::LossGrad soft = ls::soft_target_cross_entropy(logits, onehot);
  CHECK(soft.loss == doctest::Approx(hard.loss).epsilon(1e-12));
  CHECK((soft.grad - hard.grad).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("soft-target cross entropy gradient and input validation") {
  const Eigen::MatrixXd logits = random_matrix(3, 5, 400);
  const Eigen::MatrixXd q = random_prob_rows(3, 5, 401);
  const ls::LossGrad lg = ls::soft_target_cross_entropy(logits, q);
  const Eigen::MatrixXd fd = oracles::finite_difference_grad(
      [&](const Eigen::MatrixXd& l) {
        return ls::soft_target_cross_entropy(l, q).loss;
      },
      logits);
  CHECK(oracles::max_rel_error(lg.grad, fd) < 1e-4);

  Eigen::MatrixXd not_normalized = q;
  not_normalized(0, 0) += 0.2;
  CHECK_THROWS_AS(ls::soft_target_cross_entropy(logits, not_normalized),
                  audioml::ValueError);
  CHECK_THROWS_AS(ls::soft_target_cross_entropy(logits, q.topRows(2)),
                  audioml::ValueError);
}

TEST_CASE("cosine similarity fixed points and symmetry") {
  Eigen::MatrixXd z(3, 2);
  z << 1.0, 0.0,
       0.0, 1.0,
       1.0, 1.0;
  const Eigen::MatrixXd s = ls::cosine_similarity_matrix(z);
  CHECK(s(0, 1) == doctest::Approx(0.0));
  CHECK(s(0, 0) == doctest::Approx(1.0));
  CHECK(s(1, 1) == doctest::Approx(1.0));
  CHECK(s(2, 2) == doctest::Approx(1.0));
  CHECK(s(2, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK((s - s.transpose()).cwiseAbs().maxCoeff() < 1e-15);

  Eigen::MatrixXd with_zero = z;
  with_zero.row(1).setZero();
  CHECK_THROWS_AS(ls::cosine_similarity_matrix(with_zero),
                  audioml::ValueError);
}

TEST_CASE("nt_xent hits the two hand-derived anchor values") {
  // Positives identical, cross-pairs orthogonal, tau = 1:
  // every anchor sees e / (e + 2) -> loss = ln(1 + 2/e).
  Eigen::MatrixXd z_i(2, 2), z_j(2, 2);
  z_i << 1.0, 0.0,
         0.0, 1.0;
  z_j = z_i;
  const ls::NtXentResult orth = ls::nt_xent(z_i, z_j, 1.0);
  CHECK(orth.loss == doctest::Approx(0.5514447139320511).epsilon(1e-6));

  // All four embeddings identical: uniform similarities, loss = ln 3.
  Eigen::MatrixXd same(2, 3);
  same << 0.3, -0.2, 0.9,
          0.3, -0.2, 0.9;
  const ls::NtXentResult collapsed = ls::nt_xent(same, same, 1.0);
  CHECK(collapsed.loss == doctest::Approx(1.0986122886681098).epsilon(1e-6));
}

TEST_CASE("nt_xent is scale invariant and permutation invariant") {
  const Eigen::MatrixXd z_i = random_matrix(4, 6, 500);
  const Eigen::MatrixXd z_j = random_matrix(4, 6, 501);
  const double base = ls::nt_xent(z_i, z_j, 0.5).loss;
  CHECK(ls::nt_xent(5.0 * z_i, 5.0 * z_j, 0.5).loss ==
        doctest::Approx(base).epsilon(1e-12));

  const std::vector<int> perm{2, 0, 3, 1};
  Eigen::MatrixXd pi(4, 6), pj(4, 6);
  for (int r = 0; r < 4; ++r) {
    pi.row(r) = z_i.row(perm[static_cast<std::size_t>(r)]);
    pj.row(r) = z_j.row(perm[static_cast<std::size_t>(r)]);
  }
  CHECK(ls::nt_xent(pi, pj, 0.5).loss ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("nt_xent decreases as the positive pair aligns") {
  // Second pair fixed and orthogonal to everything; rotate the first view
  // of pair one toward its positive.
  const auto loss_at = [](double theta) {
    Eigen::MatrixXd z_i(2, 3), z_j(2, 3);
    z_i << std::cos(theta), std::sin(theta), 0.0,
           0.0, 0.0, 1.0;
    z_j << 1.0, 0.0, 0.0,
           0.0, 0.0, 1.0;
    return ls::nt_xent(z_i, z_j, 1.0).loss;
  };
  const double aligned = loss_at(0.1);
  const double skew = loss_at(0.8);
  const double opposed = loss_at(2.5);
  CHECK(aligned < skew);
  CHECK(skew < opposed);
}

TEST_CASE("nt_xent gradients match finite differences on both views") {
  for (int trial = 0; trial < 5; ++trial) {
    const auto seed = static_cast<std::uint64_t>(trial);
    const Eigen::MatrixXd z_i = random_matrix(3, 4, 600 + seed);
    const Eigen::MatrixXd z_j = random_matrix(3, 4, 700 + seed);
    const double tau = 0.5 + 0.25 * static_cast<double>(trial);
    const ls::NtXentResult res = ls::nt_xent(z_i, z_j, tau);

    const Eigen::MatrixXd fd_i = oracles::finite_difference_grad(
        [&](const Eigen::MatrixXd& z) { return ls::nt_xent(z, z_j, tau).loss; },
        z_i);
    const Eigen::MatrixXd fd_j = oracles::finite_difference_grad(
        [&](const Eigen::MatrixXd& z) { return ls::nt_xent(z_i, z, tau).loss; },
        z_j);
    CHECK(oracles::max_rel_error(res.grad_i, fd_i) < 1e-4);
    CHECK(oracles::max_rel_error(res.grad_j, fd_j) < 1e-4);
  }
}

TEST_CASE("nt_xent input validation") {
  const Eigen::MatrixXd ok = random_matrix(2, 3, 800);
  CHECK_THROWS_AS(ls::nt_xent(ok, ok, 0.0), audioml::ValueError);
  CHECK_THROWS_AS(ls::nt_xent(ok, ok, -1.0), audioml::ValueError);
  CHECK_THROWS_AS(ls::nt_xent(ok.topRows(1), ok.topRows(1), 1.0),
                  audioml::ValueError);
  CHECK_THROWS_AS(ls::nt_xent(ok, ok.leftCols(2), 1.0), audioml::ValueError);
}

TEST_CASE("semi-supervised combination is exactly affine in lambda") {
  CHECK(ls::combine_semi_supervised(0.7, 123.0, 0.0) == 0.7);
  CHECK(ls::combine_semi_supervised(0.5, 0.5, 1.0) == 1.0);
  const double l_unsup = 0.37;
  const double slope = ls::combine_semi_supervised(0.2, l_unsup, 2.0) -
                       ls::combine_semi_supervised(0.2, l_unsup, 1.0);
  CHECK(slope == doctest::Approx(l_unsup).epsilon(1e-15));
  CHECK_THROWS_AS(ls::combine_semi_supervised(0.5, 0.5, -0.1),
                  audioml::ValueError);
}

TEST_CASE("consistency distance: zero at equality, one at opposite corners") {
  const Eigen::MatrixXd p = random_prob_rows(3, 4, 900);
  CHECK(ls::consistency_distance(p, p) == 0.0);

  Eigen::MatrixXd a(1, 2), b(1, 2);
  a << 1.0, 0.0;
  b << 0.0, 1.0;
  CHECK(ls::consistency_distance(a, b) == doctest::Approx(1.0));

  const Eigen::MatrixXd q = random_prob_rows(3, 4, 901);
  CHECK(ls::consistency_distance(p, q) ==
        doctest::Approx(ls::consistency_distance(q, p)).epsilon(1e-15));

  CHECK_THROWS_AS(ls::consistency_distance(p, q.topRows(2)),
                  audioml::ValueError);
  Eigen::MatrixXd bad = p;
  bad(0, 0) += 0.5;
  CHECK_THROWS_AS(ls::consistency_distance(bad, q), audioml::ValueError);
}

TEST_CASE("prediction entropy: one-hot zero, uniform ln C, coin ln 2") {
  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(3, 5);
  onehot(0, 1) = onehot(1, 4) = onehot(2, 0) = 1.0;
  CHECK(ls::prediction_entropy(onehot) == 0.0);

  const Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(2, 8, 1.0 / 8.0);
  CHECK(ls::prediction_entropy(uniform) ==
        doctest::Approx(std::log(8.0)).epsilon(1e-12));

  Eigen::MatrixXd coin(1, 2);
  coin << 0.5, 0.5;
  CHECK(ls::prediction_entropy(coin) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  Eigen::MatrixXd negative(1, 2);
  negative << 1.2, -0.2;
  CHECK_THROWS_AS(ls::prediction_entropy(negative), audioml::ValueError);
}

TEST_CASE("pseudo-label hardening picks the argmax, ties to the low index") {
  Eigen::VectorXd p(3);
  p << 0.2, 0.5, 0.3;
  Eigen::VectorXd h = ls::harden_pseudo_label(p);
  CHECK(h[0] == 0.0);
  CHECK(h[1] == 1.0);
  CHECK(h[2] == 0.0);

  CHECK((ls::harden_pseudo_label(h) - h).cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd tie(2);
  tie << 0.5, 0.5;
  const Eigen::VectorXd ht = ls::harden_pseudo_label(tie);
  CHECK(ht[0] == 1.0);
  CHECK(ht[1] == 0.0);

  CHECK_THROWS_AS(ls::harden_pseudo_label(Eigen::VectorXd()),
                  audioml::ValueError);
}
