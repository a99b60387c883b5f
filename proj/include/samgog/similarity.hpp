#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "samgog/matrix.hpp"

namespace samgog {

// Label visible to a computation; std::nullopt marks an unlabeled node.
using LabelView = std::vector<std::optional<int>>;

struct DegreeAllocation;

// Per-graph class distribution: one-hot for labeled rows, softmax otherwise.
struct ProbMatrix {
  Matrix P;
  std::vector<bool> labeled;
};

struct SimilarityMatrix {
  Matrix S;
  bool diagonal_zeroed = false;
};

ProbMatrix build_prob_matrix(const Matrix& logits, const LabelView& labels);

// S = P P^T, optionally with the diagonal cleared afterwards.
SimilarityMatrix similarity_matrix(const ProbMatrix& prob, bool zero_diagonal = true);

// Fraction of node i's similarity mass that falls on nodes sharing its true
// label. Throws DegenerateError on a zero row sum.
double homophily_prob(const SimilarityMatrix& sim, std::span<const int> true_labels, int node);
std::vector<double> homophily_probs(const SimilarityMatrix& sim, std::span<const int> true_labels);

// sum_i k_i prob_i / sum_i k_i.
double expected_homophily(const SimilarityMatrix& sim, std::span<const int> true_labels,
                          const DegreeAllocation& allocation);
double expected_homophily(std::span<const double> probs, std::span<const std::int64_t> degrees);

// Row-major text: one row per line, space separated, 17 significant digits.
void write_similarity(std::ostream& out, const SimilarityMatrix& sim);

}  // namespace samgog
