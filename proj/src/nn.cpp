#include "samgog/nn.hpp"

#include <cmath>

#include "samgog/errors.hpp"
#include "samgog/rng.hpp"

namespace samgog {

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    double z = 0.0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      out(i, c) = std::exp(logits(i, c) - m);
      z += out(i, c);
    }
    out.row(i) /= z;
  }
  return out;
}

LossGrad cross_entropy(const Matrix& logits, std::span<const int> rows, std::span<const int> labels) {
  if (rows.empty()) throw ConfigError("cross-entropy over an empty labeled set");
  if (rows.size() != labels.size()) throw ShapeError("cross-entropy: rows and labels differ in length");
  LossGrad out;
  out.dlogits = Matrix::Zero(logits.rows(), logits.cols());
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const int i = rows[k];
    const int y = labels[k];
    if (i < 0 || i >= logits.rows()) throw ShapeError("cross-entropy: row index out of range");
    if (y < 0 || y >= logits.cols()) throw ShapeError("cross-entropy: label out of range");
    const double m = logits.row(i).maxCoeff();
    double z = 0.0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) z += std::exp(logits(i, c) - m);
    const double log_z = m + std::log(z);
    out.loss += (log_z - logits(i, y)) * inv;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      out.dlogits(i, c) += std::exp(logits(i, c) - log_z) * inv;
    }
    out.dlogits(i, y) -= inv;
  }
  return out;
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, std::uint64_t seed) {
  if (p < 0.0 || p >= 1.0) throw ConfigError("dropout probability must be in [0, 1)");
  if (p == 0.0) return Matrix::Ones(rows, cols);
  Matrix mask(rows, cols);
  CounterRng rng(seed);
  const double keep_scale = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = rng.uniform() < p ? 0.0 : keep_scale;
  return mask;
}

SparseMatrix normalized_adjacency(int num_nodes, std::span<const Edge> edges) {
  std::vector<double> degree(static_cast<std::size_t>(num_nodes), 1.0);
  for (const auto& [u, v] : edges) {
    degree[static_cast<std::size_t>(u)] += 1.0;
    degree[static_cast<std::size_t>(v)] += 1.0;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(num_nodes) + 2 * edges.size());
  for (int v = 0; v < num_nodes; ++v) triplets.emplace_back(v, v, 1.0 / degree[static_cast<std::size_t>(v)]);
  for (const auto& [u, v] : edges) {
    const double w = 1.0 / std::sqrt(degree[static_cast<std::size_t>(u)] * degree[static_cast<std::size_t>(v)]);
    triplets.emplace_back(u, v, w);
    triplets.emplace_back(v, u, w);
  }
  SparseMatrix a(num_nodes, num_nodes);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

SparseMatrix sum_adjacency(int num_nodes, std::span<const Edge> edges) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * edges.size());
  for (const auto& [u, v] : edges) {
    triplets.emplace_back(u, v, 1.0);
    triplets.emplace_back(v, u, 1.0);
  }
  SparseMatrix a(num_nodes, num_nodes);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

}  // namespace samgog
