#include "samgog/similarity.hpp"

#include <iomanip>
#include <ostream>

#include "samgog/degree_alloc.hpp"
#include "samgog/errors.hpp"
#include "samgog/nn.hpp"

namespace samgog {

ProbMatrix build_prob_matrix(const Matrix& logits, const LabelView& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != logits.rows())
    throw ShapeError("build_prob_matrix: label view length differs from logits rows");
  ProbMatrix out;
  out.P = softmax_rows(logits);
  out.labeled.assign(labels.size(), false);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    const int y = *labels[i];
    if (y < 0 || y >= logits.cols()) throw ShapeError("build_prob_matrix: label out of range");
    out.P.row(static_cast<Eigen::Index>(i)).setZero();
    out.P(static_cast<Eigen::Index>(i), y) = 1.0;
    out.labeled[i] = true;
  }
  return out;
}

SimilarityMatrix similarity_matrix(const ProbMatrix& prob, bool zero_diagonal) {
  SimilarityMatrix out;
  out.S = prob.P * prob.P.transpose();
  // The product is symmetric in exact arithmetic; mirror to make it bitwise so.
  for (Eigen::Index i = 0; i < out.S.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < out.S.cols(); ++j) out.S(j, i) = out.S(i, j);
  }
  if (zero_diagonal) out.S.diagonal().setZero();
  out.diagonal_zeroed = zero_diagonal;
  return out;
}

double homophily_prob(const SimilarityMatrix& sim, std::span<const int> true_labels, int node) {
  const auto n = sim.S.rows();
  if (static_cast<Eigen::Index>(true_labels.size()) != n) throw ShapeError("homophily_prob: label count differs from S");
  if (node < 0 || node >= n) throw ShapeError("homophily_prob: node index out of range");
  double same = 0.0;
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double s = sim.S(node, j);
    total += s;
    if (true_labels[static_cast<std::size_t>(j)] == true_labels[static_cast<std::size_t>(node)]) same += s;
  }
  if (!(total > 0.0)) throw DegenerateError("homophily_prob: similarity row " + std::to_string(node) + " sums to zero");
  return same / total;
}

std::vector<double> homophily_probs(const SimilarityMatrix& sim, std::span<const int> true_labels) {
  std::vector<double> out(static_cast<std::size_t>(sim.S.rows()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = homophily_prob(sim, true_labels, static_cast<int>(i));
  return out;
}

double expected_homophily(std::span<const double> probs, std::span<const std::int64_t> degrees) {
  if (probs.size() != degrees.size()) throw ShapeError("expected_homophily: probs and degrees differ in length");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    num += static_cast<double>(degrees[i]) * probs[i];
    den += static_cast<double>(degrees[i]);
  }
  if (!(den > 0.0)) throw DegenerateError("expected_homophily: total degree is zero");
  return num / den;
}

double expected_homophily(const SimilarityMatrix& sim, std::span<const int> true_labels,
                          const DegreeAllocation& allocation) {
  if (static_cast<Eigen::Index>(allocation.k.size()) != sim.S.rows())
    throw ShapeError("expected_homophily: allocation length differs from S");
  const auto probs = homophily_probs(sim, true_labels);
  return expected_homophily(probs, allocation.k);
}

void write_similarity(std::ostream& out, const SimilarityMatrix& sim) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < sim.S.rows(); ++i) {
    for (Eigen::Index j = 0; j < sim.S.cols(); ++j) {
      if (j) out << ' ';
      out << sim.S(i, j);
    }
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace samgog
