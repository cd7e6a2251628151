#include "audioml/losses.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace audioml::losses {

namespace {

void check_probability_rows(const Eigen::MatrixXd& p, const char* who,
                            double tol = 1e-6) {
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    if ((p.row(r).array() < 0.0).any())
      throw ValueError(std::string(who) + ": negative entry in row " +
                       std::to_string(static_cast<long long>(r)));
    const double s = p.row(r).sum();
    if (std::abs(s - 1.0) > tol)
      throw ValueError(std::string(who) + ": row " +
                       std::to_string(static_cast<long long>(r)) +
                       " sums to " + std::to_string(s) + ", expected 1");
  }
}

}  // namespace

Eigen::MatrixXd softmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    const Eigen::ArrayXd e = (logits.row(r).array() - mx).exp();
    p.row(r) = (e / e.sum()).matrix();
  }
  return p;
}

LossGrad softmax_cross_entropy(const Eigen::MatrixXd& logits,
                               const std::vector<int>& target_class) {
  const Eigen::Index n = logits.rows();
  const Eigen::Index c = logits.cols();
  if (n == 0) throw ValueError("softmax_cross_entropy: empty batch");
  if (static_cast<Eigen::Index>(target_class.size()) != n)
    throw ValueError("softmax_cross_entropy: target count mismatch");
  for (int t : target_class)
    if (t < 0 || t >= c)
      throw ValueError("softmax_cross_entropy: class " + std::to_string(t) +
                       " out of range [0, " +
                       std::to_string(static_cast<long long>(c)) + ")");

  LossGrad out;
  out.grad.resize(n, c);
  double loss = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mx = logits.row(r).maxCoeff();
    const Eigen::ArrayXd shifted = logits.row(r).array() - mx;
    const double lse = std::log(shifted.exp().sum());
    loss += lse - shifted[target_class[static_cast<std::size_t>(r)]];
    out.grad.row(r) = ((shifted - lse).exp() / static_cast<double>(n)).matrix();
    out.grad(r, target_class[static_cast<std::size_t>(r)]) -=
        1.0 / static_cast<double>(n);
  }
  out.loss = loss / static_cast<double>(n);
  return out;
}

LossGrad soft_target_cross_entropy(const Eigen::MatrixXd& logits,
                                   const Eigen::MatrixXd& target_probs) {
  const Eigen::Index n = logits.rows();
  if (n == 0) throw ValueError("soft_target_cross_entropy: empty batch");
  if (logits.rows() != target_probs.rows() ||
      logits.cols() != target_probs.cols())
    throw ValueError("soft_target_cross_entropy: shape mismatch");
  check_probability_rows(target_probs, "soft_target_cross_entropy", 1e-4);

  LossGrad out;
  out.grad.resize(n, logits.cols());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mx = logits.row(r).maxCoeff();
    const Eigen::ArrayXd shifted = logits.row(r).array() - mx;
    const double lse = std::log(shifted.exp().sum());
    const Eigen::ArrayXd log_p = shifted - lse;
    loss -= (target_probs.row(r).transpose().array() * log_p).sum();
    out.grad.row(r) =
        ((log_p.exp() - target_probs.row(r).transpose().array()) /
         static_cast<double>(n))
            .matrix();
  }
  out.loss = loss / static_cast<double>(n);
  return out;
}

Eigen::MatrixXd cosine_similarity_matrix(const Eigen::MatrixXd& z) {
  const Eigen::Index m = z.rows();
  if (m == 0) throw ValueError("cosine_similarity_matrix: empty input");
  Eigen::MatrixXd unit(m, z.cols());
  for (Eigen::Index r = 0; r < m; ++r) {
    const double norm = z.row(r).norm();
    if (norm < 1e-300)
      throw ValueError("cosine_similarity_matrix: zero-norm row " +
                       std::to_string(static_cast<long long>(r)));
    unit.row(r) = z.row(r) / norm;
  }
  Eigen::MatrixXd s = unit * unit.transpose();
  s.diagonal().setOnes();
  return s;
}

NtXentResult nt_xent(const Eigen::MatrixXd& z_i, const Eigen::MatrixXd& z_j,
                     double temperature) {
  if (temperature <= 0.0)
    throw ValueError("nt_xent: temperature must be positive");
  const Eigen::Index batch = z_i.rows();
  if (batch < 2)
    throw ValueError("nt_xent: batch must be >= 2 (no negatives otherwise)");
  if (z_j.rows() != batch || z_j.cols() != z_i.cols())
    throw ValueError("nt_xent: z_i and z_j shapes disagree");

  const Eigen::Index m = 2 * batch;
  Eigen::MatrixXd z(m, z_i.cols());
  z.topRows(batch) = z_i;
  z.bottomRows(batch) = z_j;

  // Row-normalize; gradients flow back through the normalization.
  Eigen::VectorXd norms(m);
  Eigen::MatrixXd unit(m, z.cols());
  for (Eigen::Index r = 0; r < m; ++r) {
    norms[r] = z.row(r).norm();
    if (norms[r] < 1e-300)
      throw ValueError("nt_xent: zero-norm embedding row " +
                       std::to_string(static_cast<long long>(r)));
    unit.row(r) = z.row(r) / norms[r];
  }
  const Eigen::MatrixXd sim = unit * unit.transpose();

  auto positive_of = [batch](Eigen::Index a) {
    return a < batch ? a + batch : a - batch;
  };

  // dL/dS[a,k] = (softmax_a(k) - [k = positive]) / (m tau) over k != a.
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
  double loss = 0.0;
  for (Eigen::Index a = 0; a < m; ++a) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < m; ++k)
      if (k != a) mx = std::max(mx, sim(a, k) / temperature);
    double denom = 0.0;
    for (Eigen::Index k = 0; k < m; ++k)
      if (k != a) denom += std::exp(sim(a, k) / temperature - mx);
    const double lse = mx + std::log(denom);
    loss += lse - sim(a, positive_of(a)) / temperature;
    for (Eigen::Index k = 0; k < m; ++k)
      if (k != a)
        g(a, k) = std::exp(sim(a, k) / temperature - lse) /
                  (static_cast<double>(m) * temperature);
    g(a, positive_of(a)) -= 1.0 / (static_cast<double>(m) * temperature);
  }
  loss /= static_cast<double>(m);

  // S = U U^T, so dL/dU = (G + G^T) U; then through u_a = z_a / |z_a|:
  // dL/dz_a = (g_a - (g_a . u_a) u_a) / |z_a|.
  const Eigen::MatrixXd du = (g + g.transpose()) * unit;
  Eigen::MatrixXd dz(m, z.cols());
  for (Eigen::Index r = 0; r < m; ++r) {
    const double along = du.row(r).dot(unit.row(r));
    dz.row(r) = (du.row(r) - along * unit.row(r)) / norms[r];
  }

  NtXentResult out;
  out.loss = loss;
  out.grad_i = dz.topRows(batch);
  out.grad_j = dz.bottomRows(batch);
  return out;
}

double combine_semi_supervised(double l_sup, double l_unsup, double lambda) {
  if (lambda < 0.0)
    throw ValueError("combine_semi_supervised: lambda must be >= 0");
  return l_sup + lambda * l_unsup;
}

double consistency_distance(const Eigen::MatrixXd& p1,
                            const Eigen::MatrixXd& p2) {
  if (p1.rows() != p2.rows() || p1.cols() != p2.cols())
    throw ValueError("consistency_distance: shape mismatch");
  if (p1.rows() == 0) throw ValueError("consistency_distance: empty input");
  check_probability_rows(p1, "consistency_distance");
  check_probability_rows(p2, "consistency_distance");
  return (p1 - p2).squaredNorm() /
         static_cast<double>(p1.rows() * p1.cols());
}

double prediction_entropy(const Eigen::MatrixXd& p) {
  if (p.rows() == 0) throw ValueError("prediction_entropy: empty input");
  check_probability_rows(p, "prediction_entropy");
  double total = 0.0;
  for (Eigen::Index r = 0; r < p.rows(); ++r)
    for (Eigen::Index c = 0; c < p.cols(); ++c)
      if (p(r, c) > 0.0) total -= p(r, c) * std::log(p(r, c));
  return total / static_cast<double>(p.rows());
}

Eigen::VectorXd harden_pseudo_label(const Eigen::VectorXd& p) {
  if (p.size() == 0) throw ValueError("harden_pseudo_label: empty vector");
  Eigen::Index arg = 0;
  p.maxCoeff(&arg);  // first maximum = lowest index on ties
  Eigen::VectorXd one_hot = Eigen::VectorXd::Zero(p.size());
  one_hot[arg] = 1.0;
  return one_hot;
}

}  // namespace audioml::losses
