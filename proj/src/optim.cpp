#include "samgog/optim.hpp"

#include <cmath>

#include "samgog/errors.hpp"

namespace samgog {

OptimizerKind optimizer_kind_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adam") return OptimizerKind::adam;
  throw ConfigError("unknown optimizer '" + name + "'");
}

LrSchedule lr_schedule_from_string(const std::string& name) {
  if (name == "constant") return LrSchedule::constant;
  if (name == "inverse") return LrSchedule::inverse;
  throw ConfigError("unknown learning-rate schedule '" + name + "'");
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("Adam betas must be in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
}

Optimizer::Optimizer(OptimizerConfig config, std::size_t num_params) : config_(config) {
  config_.validate();
  if (config_.kind == OptimizerKind::adam) {
    m_.assign(num_params, 0.0);
    v_.assign(num_params, 0.0);
  }
}

double Optimizer::learning_rate_at(std::size_t step) const noexcept {
  if (config_.schedule == LrSchedule::inverse && step > 0) return config_.learning_rate / static_cast<double>(step);
  return config_.learning_rate;
}

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != grad.size()) throw ShapeError("optimizer: gradient length differs from parameter length");
  if (config_.kind == OptimizerKind::adam && m_.size() != params.size())
    throw ShapeError("optimizer: parameter length differs from optimizer state");
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw TrainingError("non-finite gradient at coordinate " + std::to_string(i) + " (step " +
                          std::to_string(steps_ + 1) + ")");
    }
  }
  ++steps_;
  const double lr = learning_rate_at(steps_);
  const double wd = config_.weight_decay;
  if (config_.kind == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * (grad[i] + wd * params[i]);
    return;
  }
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i] + wd * params[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + config_.epsilon);
  }
}

}  // namespace samgog
