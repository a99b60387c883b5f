#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "samgog/graph_data.hpp"
#include "samgog/matrix.hpp"

namespace samgog {

enum class Mode { train, eval };

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

struct LossGrad {
  double loss = 0.0;
  Matrix dlogits;  // same shape as logits, zero on rows outside `rows`
};

// Mean cross-entropy over the given rows; throws ConfigError when `rows` is
// empty and ShapeError on a label outside [0, cols).
LossGrad cross_entropy(const Matrix& logits, std::span<const int> rows, std::span<const int> labels);

// Inverted-dropout scale mask: entries are 0 or 1/(1-p). p == 0 gives all ones.
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, std::uint64_t seed);

// D^-1/2 (A + I) D^-1/2 for an undirected edge list.
SparseMatrix normalized_adjacency(int num_nodes, std::span<const Edge> edges);
// Plain symmetric 0/1 adjacency without self-loops.
SparseMatrix sum_adjacency(int num_nodes, std::span<const Edge> edges);

}  // namespace samgog
