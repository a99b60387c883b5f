#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "samgog/matrix.hpp"

namespace samgog {

struct TensorSpec {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
};

// Flat parameter vector partitioned into named row-major tensors. Gradients
// and optimizer moments reuse the same layout via zeros_like().
class ParamSet {
 public:
  // Appends a zero tensor and returns its index.
  std::size_t add(std::string name, int rows, int cols);

  std::size_t size() const noexcept { return values_.size(); }
  std::size_t num_tensors() const noexcept { return specs_.size(); }
  const std::vector<TensorSpec>& specs() const noexcept { return specs_; }
  std::size_t index_of(const std::string& name) const;

  MatrixMap view(std::size_t tensor);
  ConstMatrixMap view(std::size_t tensor) const;
  MatrixMap view(const std::string& name) { return view(index_of(name)); }
  ConstMatrixMap view(const std::string& name) const { return view(index_of(name)); }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  ParamSet zeros_like() const;
  bool same_layout(const ParamSet& other) const noexcept;

  // Glorot-uniform init of every tensor named "*W*"; others (biases) zero.
  void init_glorot(std::uint64_t seed);

 private:
  std::vector<TensorSpec> specs_;
  std::vector<double> values_;
};

// Checkpoint layout: 1 version byte, u32 tensor count, then per tensor
// u32 name length, name bytes, u32 rows, u32 cols, rows*cols little-endian
// f64 values in row-major order.
inline constexpr std::uint8_t kCheckpointVersion = 1;
void write_checkpoint(std::ostream& out, const ParamSet& params);
ParamSet read_checkpoint(std::istream& in);
void write_checkpoint(const std::filesystem::path& path, const ParamSet& params);
ParamSet read_checkpoint(const std::filesystem::path& path);

}  // namespace samgog
