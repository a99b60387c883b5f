#include "samgog/pipeline.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "samgog/errors.hpp"
#include "samgog/rng.hpp"
#include "samgog/similarity.hpp"

namespace samgog {

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("train.epochs must be >= 0");
  if (eval_samples < 0) throw ConfigError("train.eval_samples must be >= 0");
  encoder_optimizer.validate();
  downstream_optimizer.validate();
}

LabelView masked_labels(const GraphDataset& dataset, std::span<const int> visible) {
  LabelView view(dataset.size());
  for (const int i : visible) view[static_cast<std::size_t>(i)] = dataset.graphs.at(static_cast<std::size_t>(i)).label;
  return view;
}

namespace {

constexpr std::uint64_t kValidationTag = 1ULL << 40;
constexpr std::uint64_t kTestTag = 1ULL << 41;

std::vector<int> labels_at(const GraphDataset& dataset, std::span<const int> idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (const int i : idx) out.push_back(*dataset.graphs[static_cast<std::size_t>(i)].label);
  return out;
}

bool all_labeled(const GraphDataset& dataset) {
  for (const auto& g : dataset.graphs) {
    if (!g.label) return false;
  }
  return true;
}

Matrix gather_rows(const Matrix& m, std::span<const int> idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = m.row(idx[k]);
  return out;
}

void check_finite(double loss, int epoch, const char* which) {
  if (!std::isfinite(loss)) {
    throw TrainingError(std::string(which) + " loss became non-finite at epoch " + std::to_string(epoch));
  }
}

struct Evaluation {
  Matrix encoder_logits;
  Matrix gog_logits;  // mean over the sampled GoGs
  std::vector<double> homophily;
};

class PipelineRunner {
 public:
  PipelineRunner(const GraphDataset& dataset, const SplitSpec& split, const AllocConfig& alloc_config,
                 const EncoderConfig& encoder_config, const SamplerConfig& sampler_config,
                 const GoGClassifierConfig& downstream_config, const TrainConfig& train_config)
      : dataset_(dataset),
        split_(split),
        sampler_(sampler_config),
        train_(train_config),
        encoder_(encoder_config, dataset.feature_dim, dataset.num_classes),
        model_(downstream_config, encoder_config.hidden_dim, dataset.num_classes),
        graphs_(prepare_graphs(dataset)),
        allocation_(allocate_degrees(split, dataset, alloc_config)),
        train_view_(masked_labels(dataset, split.train_idx)),
        train_labels_(labels_at(dataset, split.train_idx)),
        val_labels_(labels_at(dataset, split.val_idx)),
        diagnostics_(all_labeled(dataset)) {
    if (diagnostics_) truth_ = dataset.labels();
  }

  PipelineResult run() {
    const int t = sampler_.samples_per_epoch;
    const int eval_t = train_.eval_samples > 0 ? train_.eval_samples : t;
    PipelineResult result{
        TrainState{encoder_.make_params(derive_seed(train_.seed, {1})),
                   model_.make_params(derive_seed(train_.seed, {2})),
                   Optimizer(train_.encoder_optimizer, 0), Optimizer(train_.downstream_optimizer, 0), train_.seed, 0,
                   t},
        {}, {}, {}, allocation_, 0, 0};
    auto& state = result.state;
    state.encoder_optimizer = Optimizer(train_.encoder_optimizer, state.encoder_params.size());
    state.downstream_optimizer = Optimizer(train_.downstream_optimizer, state.downstream_params.size());

    ParamSet best_encoder = state.encoder_params;
    ParamSet best_downstream = state.downstream_params;
    ParamSet best_encoder_only = state.encoder_params;
    double best_val = -std::numeric_limits<double>::infinity();
    double best_encoder_val = best_val;
    const bool validate = train_.select_best && !split_.val_idx.empty();

    for (int epoch = 1; epoch <= train_.epochs; ++epoch) {
      const auto e = static_cast<std::uint64_t>(epoch);
      EpochRecord record;
      record.epoch = epoch;

      const auto eval_pass = encode_dataset(encoder_, state.encoder_params, graphs_, Mode::eval);
      const auto sim = similarity_matrix(build_prob_matrix(eval_pass.logits, train_view_), true);

      // Downstream step on the loss averaged over t sampled GoGs.
      ParamSet grad = state.downstream_params.zeros_like();
      double loss = 0.0;
      double homophily = 0.0;
      for (int s = 0; s < t; ++s) {
        const auto gog = sample_gog(sim, allocation_, sampler_, gog_stream_id(e, static_cast<std::uint64_t>(s)));
        const auto prop = gog_propagation(gog, model_.config().symmetrize);
        const auto pass = downstream_forward(model_, state.downstream_params, prop, eval_pass.embeddings, Mode::train,
                                             derive_seed(train_.seed, {3, e, static_cast<std::uint64_t>(s)}));
        const auto lg = downstream_loss_and_grad(model_, state.downstream_params, prop, pass, split_.train_idx,
                                                 train_labels_);
        for (std::size_t i = 0; i < grad.size(); ++i) grad.values()[i] += lg.grad.values()[i];
        loss += lg.loss;
        if (diagnostics_ && !gog.edges.empty()) homophily += edge_homophily(gog, truth_);
      }
      for (auto& g : grad.values()) g /= static_cast<double>(t);
      record.downstream_loss = loss / static_cast<double>(t);
      record.mean_edge_homophily = diagnostics_ ? homophily / static_cast<double>(t)
                                                : std::numeric_limits<double>::quiet_NaN();
      check_finite(record.downstream_loss, epoch, "downstream");
      state.downstream_optimizer.step(state.downstream_params.values(), grad.values());

      // Encoder step on its own supervised loss.
      const ParamSet encoder_before = state.encoder_params;
      const auto train_pass = encode_dataset(encoder_, state.encoder_params, graphs_, Mode::train,
                                             derive_seed(train_.seed, {4, e}));
      const auto enc = supervised_loss_and_grad(encoder_, state.encoder_params, graphs_, train_pass, split_.train_idx,
                                                train_labels_);
      record.encoder_loss = enc.loss;
      check_finite(record.encoder_loss, epoch, "encoder");
      state.encoder_optimizer.step(state.encoder_params.values(), enc.grad.values());

      if (validate) {
        const Matrix gog_logits = sampled_logits(sim, eval_pass.embeddings, state.downstream_params, kValidationTag + e,
                                                 eval_t, nullptr);
        record.val_balanced_accuracy = balanced_accuracy(gog_logits, split_.val_idx);
        record.encoder_val_balanced_accuracy = balanced_accuracy(eval_pass.logits, split_.val_idx);
        if (record.val_balanced_accuracy > best_val) {
          best_val = record.val_balanced_accuracy;
          best_encoder = encoder_before;
          best_downstream = state.downstream_params;
          result.best_epoch = epoch;
        }
        if (record.encoder_val_balanced_accuracy > best_encoder_val) {
          best_encoder_val = record.encoder_val_balanced_accuracy;
          best_encoder_only = encoder_before;
          result.encoder_best_epoch = epoch;
        }
      }
      state.epoch = epoch;
      result.curve.push_back(record);
    }

    if (validate) {
      state.encoder_params = best_encoder;
      state.downstream_params = best_downstream;
    } else {
      best_encoder_only = state.encoder_params;
      result.best_epoch = result.encoder_best_epoch = state.epoch;
    }
    if (!split_.test_idx.empty()) final_metrics(result, best_encoder_only, eval_t);
    return result;
  }

 private:
  Matrix sampled_logits(const SimilarityMatrix& sim, const Matrix& embeddings, const ParamSet& downstream,
                        std::uint64_t tag, int samples, std::vector<double>* homophily) const {
    Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(dataset_.size()), dataset_.num_classes);
    for (int s = 0; s < samples; ++s) {
      const auto gog = sample_gog(sim, allocation_, sampler_, gog_stream_id(tag, static_cast<std::uint64_t>(s)));
      const auto prop = gog_propagation(gog, model_.config().symmetrize);
      sum += downstream_forward(model_, downstream, prop, embeddings, Mode::eval).logits;
      if (homophily && diagnostics_ && !gog.edges.empty()) homophily->push_back(edge_homophily(gog, truth_));
    }
    return sum / static_cast<double>(samples);
  }

  double balanced_accuracy(const Matrix& logits, std::span<const int> idx) const {
    const auto predictions = argmax_rows(gather_rows(logits, idx));
    return compute_metrics(predictions, val_labels_, dataset_.num_classes).balanced_accuracy;
  }

  // The only place test labels are read.
  void final_metrics(PipelineResult& result, const ParamSet& encoder_only_params, int eval_t) const {
    const auto& test = split_.test_idx;
    const auto test_truth = labels_at(dataset_, test);
    std::vector<int> head_pos;
    std::vector<int> tail_pos;
    if (dataset_.size() >= 5) {
      const auto part = head_tail_partition(dataset_);
      std::vector<char> is_head(dataset_.size(), 0);
      for (const int i : part.head) is_head[static_cast<std::size_t>(i)] = 1;
      for (std::size_t k = 0; k < test.size(); ++k) {
        (is_head[static_cast<std::size_t>(test[k])] ? head_pos : tail_pos).push_back(static_cast<int>(k));
      }
    }

    const auto& state = result.state;
    const auto pass = encode_dataset(encoder_, state.encoder_params, graphs_, Mode::eval);
    const auto sim = similarity_matrix(build_prob_matrix(pass.logits, train_view_), true);
    std::vector<double> homophily;
    const Matrix logits = sampled_logits(sim, pass.embeddings, state.downstream_params, kTestTag, eval_t, &homophily);
    result.metrics = compute_metrics(argmax_rows(gather_rows(logits, test)), test_truth, dataset_.num_classes,
                                     head_pos, tail_pos);
    if (!homophily.empty()) {
      const double mean = std::accumulate(homophily.begin(), homophily.end(), 0.0) / static_cast<double>(homophily.size());
      double var = 0.0;
      for (const double h : homophily) var += (h - mean) * (h - mean);
      result.metrics.edge_homophily_mean = mean;
      result.metrics.edge_homophily_std =
          homophily.size() > 1 ? std::sqrt(var / static_cast<double>(homophily.size() - 1)) : 0.0;
    }

    const auto encoder_pass = encode_dataset(encoder_, encoder_only_params, graphs_, Mode::eval);
    result.encoder_only = compute_metrics(argmax_rows(gather_rows(encoder_pass.logits, test)), test_truth,
                                          dataset_.num_classes, head_pos, tail_pos);
  }

  const GraphDataset& dataset_;
  const SplitSpec& split_;
  SamplerConfig sampler_;
  TrainConfig train_;
  Encoder encoder_;
  GoGClassifier model_;
  std::vector<PreparedGraph> graphs_;
  DegreeAllocation allocation_;
  LabelView train_view_;
  std::vector<int> train_labels_;
  std::vector<int> val_labels_;
  bool diagnostics_;
  std::vector<int> truth_;
};

}  // namespace

PipelineResult train_full_pipeline(const GraphDataset& dataset, const SplitSpec& split, const AllocConfig& alloc_config,
                                   const EncoderConfig& encoder_config, const SamplerConfig& sampler_config,
                                   const GoGClassifierConfig& downstream_config, const TrainConfig& train_config) {
  alloc_config.validate();
  encoder_config.validate();
  sampler_config.validate();
  downstream_config.validate();
  train_config.validate();
  split.validate(dataset);
  if (split.train_idx.empty()) throw ConfigError("train_full_pipeline: the labeled train set is empty");
  if (dataset.feature_scheme == FeatureScheme::none || dataset.feature_dim < 1)
    throw ConfigError("train_full_pipeline: build node features first");
  PipelineRunner runner(dataset, split, alloc_config, encoder_config, sampler_config, downstream_config, train_config);
  return runner.run();
}

}  // namespace samgog
