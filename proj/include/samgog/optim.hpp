#pragma once

#include <span>
#include <string>
#include <vector>

namespace samgog {

enum class OptimizerKind { sgd, adam };
// constant: eta_s = eta_0; inverse: eta_s = eta_0 / s (s counts steps from 1).
enum class LrSchedule { constant, inverse };

OptimizerKind optimizer_kind_from_string(const std::string& name);
LrSchedule lr_schedule_from_string(const std::string& name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 0.01;
  LrSchedule schedule = LrSchedule::constant;
  double weight_decay = 0.0;  // L2 coefficient added to the gradient
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

class Optimizer {
 public:
  Optimizer(OptimizerConfig config, std::size_t num_params);

  // Applies one update in place. Throws TrainingError on a non-finite
  // gradient and ShapeError on a length mismatch; parameters are untouched
  // in both cases.
  void step(std::span<double> params, std::span<const double> grad);

  std::size_t steps() const noexcept { return steps_; }
  double learning_rate_at(std::size_t step) const noexcept;
  const OptimizerConfig& config() const noexcept { return config_; }

 private:
  OptimizerConfig config_;
  std::size_t steps_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace samgog
