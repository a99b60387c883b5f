#include "samgog/params.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "samgog/errors.hpp"
#include "samgog/rng.hpp"

namespace samgog {

std::size_t ParamSet::add(std::string name, int rows, int cols) {
  if (rows < 0 || cols < 0) throw ShapeError("tensor '" + name + "' has negative shape");
  for (const auto& s : specs_) {
    if (s.name == name) throw ConfigError("duplicate tensor name '" + name + "'");
  }
  TensorSpec spec{std::move(name), rows, cols, values_.size()};
  values_.resize(values_.size() + spec.size(), 0.0);
  specs_.push_back(std::move(spec));
  return specs_.size() - 1;
}

std::size_t ParamSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (specs_[i].name == name) return i;
  }
  throw ConfigError("no tensor named '" + name + "'");
}

MatrixMap ParamSet::view(std::size_t tensor) {
  const auto& s = specs_.at(tensor);
  return MatrixMap(values_.data() + s.offset, s.rows, s.cols);
}

ConstMatrixMap ParamSet::view(std::size_t tensor) const {
  const auto& s = specs_.at(tensor);
  return ConstMatrixMap(values_.data() + s.offset, s.rows, s.cols);
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out = *this;
  std::fill(out.values_.begin(), out.values_.end(), 0.0);
  return out;
}

bool ParamSet::same_layout(const ParamSet& other) const noexcept {
  if (specs_.size() != other.specs_.size()) return false;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const auto& a = specs_[i];
    const auto& b = other.specs_[i];
    if (a.name != b.name || a.rows != b.rows || a.cols != b.cols) return false;
  }
  return true;
}

void ParamSet::init_glorot(std::uint64_t seed) {
  for (std::size_t t = 0; t < specs_.size(); ++t) {
    const auto& s = specs_[t];
    auto v = view(t);
    if (s.name.find('W') == std::string::npos) {
      v.setZero();
      continue;
    }
    const double a = std::sqrt(6.0 / static_cast<double>(s.rows + s.cols));
    CounterRng rng(derive_seed(seed, {t}));
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = (2.0 * rng.uniform() - 1.0) * a;
  }
}

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

void put_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ParseError("checkpoint truncated");
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const ParamSet& params) {
  out.put(static_cast<char>(kCheckpointVersion));
  put_u32(out, static_cast<std::uint32_t>(params.num_tensors()));
  for (std::size_t t = 0; t < params.num_tensors(); ++t) {
    const auto& s = params.specs()[t];
    put_u32(out, static_cast<std::uint32_t>(s.name.size()));
    out.write(s.name.data(), static_cast<std::streamsize>(s.name.size()));
    put_u32(out, static_cast<std::uint32_t>(s.rows));
    put_u32(out, static_cast<std::uint32_t>(s.cols));
    out.write(reinterpret_cast<const char*>(params.values().data() + s.offset),
              static_cast<std::streamsize>(s.size() * sizeof(double)));
  }
  if (!out) throw ParseError("checkpoint write failed");
}

ParamSet read_checkpoint(std::istream& in) {
  const int version = in.get();
  if (version == std::char_traits<char>::eof()) throw ParseError("checkpoint is empty");
  if (version != kCheckpointVersion) throw ParseError("unsupported checkpoint version " + std::to_string(version));
  ParamSet params;
  const auto count = get_u32(in);
  for (std::uint32_t t = 0; t < count; ++t) {
    std::string name(get_u32(in), '\0');
    if (!in.read(name.data(), static_cast<std::streamsize>(name.size()))) throw ParseError("checkpoint truncated");
    const auto rows = static_cast<int>(get_u32(in));
    const auto cols = static_cast<int>(get_u32(in));
    const auto idx = params.add(name, rows, cols);
    auto v = params.view(idx);
    if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double))))
      throw ParseError("checkpoint truncated");
  }
  return params;
}

void write_checkpoint(const std::filesystem::path& path, const ParamSet& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write checkpoint " + path.string());
  write_checkpoint(out, params);
}

ParamSet read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("missing or unreadable file: " + path.string());
  return read_checkpoint(in);
}

}  // namespace samgog
