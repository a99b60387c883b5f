#include "samgog/theory_checks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "samgog/degree_alloc.hpp"
#include "samgog/downstream.hpp"
#include "samgog/errors.hpp"
#include "samgog/gog_sampler.hpp"
#include "samgog/pipeline.hpp"
#include "samgog/rng.hpp"
#include "samgog/similarity.hpp"

namespace samgog {

nlohmann::json CheckReport::to_json() const {
  return {{"name", name},         {"passed", passed},     {"inconclusive", inconclusive},
          {"trials", trials},     {"failures", failures}, {"skipped", skipped},
          {"detail", detail}};
}

nlohmann::json VarianceSweepResult::to_json() const {
  return {{"t_values", t_values},
          {"variance_estimates", variance_estimates},
          {"fitted_slope", fitted_slope},
          {"r_squared", r_squared},
          {"inconclusive", inconclusive},
          {"passed", theorem2_passes(*this)}};
}

CheckReport check_lemma1(int num_trials, int n_max, std::uint64_t seed) {
  if (n_max < 2 || n_max > 8) throw ConfigError("check_lemma1: n_max must be in [2, 8]");
  CheckReport report;
  report.name = "lemma1";
  double worst_gap = 0.0;
  for (int trial = 0; trial < num_trials; ++trial) {
    CounterRng rng(derive_seed(seed, {static_cast<std::uint64_t>(trial)}));
    const int n = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_max - 1)));
    const bool coarse = rng.below(4) == 0;  // coarse values exercise ties
    std::vector<double> prob(static_cast<std::size_t>(n));
    for (auto& p : prob) p = coarse ? 0.5 * static_cast<double>(rng.below(3)) : rng.uniform();

    AllocConfig cfg;
    cfg.k_min = static_cast<int>(rng.below(4));
    cfg.k_max = cfg.k_min + 1 + static_cast<int>(rng.below(4));
    cfg.d_bar = cfg.k_min + rng.uniform() * (cfg.k_max - cfg.k_min);
    cfg.rho1 = 1.0;
    cfg.rho2 = 1.0;

    const auto oracle = oracle_optimal_allocation(prob, cfg);
    ++report.trials;
    const double gap = oracle.best_objective - oracle.greedy_objective;
    bool failed = std::abs(gap) > 1e-9 * (1.0 + std::abs(oracle.best_objective));

    // Random feasible allocation: every pair violating the prob ordering must
    // not lose objective when swapped.
    DegreeAllocation random;
    random.total = oracle.greedy.total;
    random.k.assign(static_cast<std::size_t>(n), cfg.k_min);
    for (std::int64_t left = random.total - static_cast<std::int64_t>(n) * cfg.k_min; left > 0;) {
      const auto i = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n)));
      if (random.k[i] < cfg.k_max) {
        ++random.k[i];
        --left;
      }
    }
    const double base = allocation_objective(prob, random);
    for (std::size_t i = 0; i < prob.size(); ++i) {
      for (std::size_t j = 0; j < prob.size(); ++j) {
        if (prob[i] > prob[j] && random.k[i] < random.k[j]) {
          auto swapped = random;
          std::swap(swapped.k[i], swapped.k[j]);
          if (allocation_objective(prob, swapped) < base - 1e-12) failed = true;
        }
      }
    }
    if (failed) {
      ++report.failures;
      if (std::abs(gap) >= worst_gap) {
        worst_gap = std::abs(gap);
        std::ostringstream s;
        s << "trial " << trial << ": N=" << n << " brute=" << oracle.best_objective << " greedy=" << oracle.greedy_objective;
        report.detail = s.str();
      }
    }
  }
  report.passed = report.failures == 0 && report.trials > 0;
  if (report.detail.empty()) report.detail = "greedy matched brute force in every trial";
  return report;
}

namespace {

// Random 3-class probability matrix with roughly half the rows labeled.
ProbMatrix random_prob_matrix(int n, CounterRng& rng) {
  const int classes = 3;
  Matrix logits(n, classes);
  LabelView labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < classes; ++c) logits(i, c) = 1.5 * rng.normal();
    if (i % 2 == 1) labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(classes));
  }
  return build_prob_matrix(logits, labels);
}

}  // namespace

CheckReport check_theorem1_unbiasedness(int num_trials, int matrix_size, std::uint64_t seed) {
  if (num_trials < 1 || matrix_size < 2) throw ConfigError("check_theorem1_unbiasedness: bad sizes");
  CounterRng rng(derive_seed(seed, {0x7e1ULL}));
  const auto sim = similarity_matrix(random_prob_matrix(matrix_size, rng), true);
  DegreeAllocation alloc;
  alloc.k.resize(static_cast<std::size_t>(matrix_size));
  for (auto& k : alloc.k) {
    k = 1 + static_cast<std::int64_t>(rng.below(6));
    alloc.total += k;
  }
  SamplerConfig cfg;
  cfg.mode = SampleMode::with_replacement;
  cfg.seed = derive_seed(seed, {0x7e2ULL});

  const Matrix empirical = empirical_inclusion_matrix(sim, alloc, cfg, num_trials);
  const Matrix expected = expected_inclusion_matrix(sim, alloc);

  CheckReport report;
  report.name = "theorem1_unbiasedness";
  double worst_z = 0.0;
  std::ostringstream worst;
  for (Eigen::Index i = 0; i < expected.rows(); ++i) {
    const double k = static_cast<double>(alloc.k[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < expected.cols(); ++j) {
      ++report.trials;
      const double q = expected(i, j) / k;
      const double se = std::sqrt(q * (1.0 - q) * k / static_cast<double>(num_trials));
      const double diff = std::abs(empirical(i, j) - expected(i, j));
      const bool bad = se > 0.0 ? diff > 4.0 * se : diff != 0.0;
      const double z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : INFINITY);
      if (bad) ++report.failures;
      if (z > worst_z) {
        worst_z = z;
        worst.str("");
        worst << "worst entry (" << i << ", " << j << "): empirical " << empirical(i, j) << " expected "
              << expected(i, j) << " (" << z << " standard errors)";
      }
    }
  }
  report.detail = worst.str().empty() ? "all entries exact" : worst.str();
  report.passed = report.failures == 0;
  return report;
}

double f0(const std::array<double, 4>& g, double x) {
  const double g00 = g[0], g01 = g[1], g10 = g[2], g11 = g[3];
  return (g00 * x + g01 * (1.0 - x)) / ((g00 + g10) * x + (g01 + g11) * (1.0 - x));
}

bool gamma_valid(const std::array<double, 4>& g) { return 0.0 < g[1] && g[1] < g[0] && 0.0 < g[2] && g[2] < g[3]; }

CheckReport check_rule_monotonicity(int num_trials, std::uint64_t seed) {
  CheckReport report;
  report.name = "rule_monotonicity";
  CounterRng rng(derive_seed(seed, {0xc2ULL}));
  std::ostringstream first_failure;

  // (a) f_0 on a grid, num_trials valid gamma draws.
  for (int valid = 0; valid < num_trials;) {
    const std::array<double, 4> g{10.0 * rng.uniform_open(), 10.0 * rng.uniform_open(), 10.0 * rng.uniform_open(),
                                  10.0 * rng.uniform_open()};
    if (!gamma_valid(g)) {
      ++report.skipped;
      continue;
    }
    ++valid;
    ++report.trials;
    double prev = f0(g, 1.0 / 101.0);
    for (int k = 2; k <= 100; ++k) {
      const double cur = f0(g, k / 101.0);
      if (!(cur > prev)) {
        ++report.failures;
        if (first_failure.str().empty()) first_failure << "f0 not increasing at grid point " << k;
        break;
      }
      prev = cur;
    }
  }

  // (b) labeled vs matched unlabeled node on actual similarity rows.
  for (int valid = 0; valid < num_trials;) {
    const int others = 4 + static_cast<int>(rng.below(17));
    const int n = others + 2;
    std::vector<int> truth(static_cast<std::size_t>(n), 0);
    ProbMatrix prob;
    prob.P.resize(n, 2);
    prob.labeled.assign(static_cast<std::size_t>(n), false);
    prob.P.row(0) << 1.0, 0.0;  // labeled, class 0
    prob.labeled[0] = true;
    const double x = rng.uniform_open();
    prob.P.row(1) << x, 1.0 - x;  // unlabeled, class 0
    for (int i = 2; i < n; ++i) {
      const int y = static_cast<int>(rng.below(2));
      truth[static_cast<std::size_t>(i)] = y;
      const double own = 0.2 + 0.8 * rng.uniform();
      prob.P(i, y) = own;
      prob.P(i, 1 - y) = 1.0 - own;
    }
    std::array<double, 4> g{0.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      const int y = truth[static_cast<std::size_t>(i)];
      g[static_cast<std::size_t>(2 * y)] += prob.P(i, 0);
      g[static_cast<std::size_t>(2 * y + 1)] += prob.P(i, 1);
    }
    if (!gamma_valid(g)) {
      ++report.skipped;
      continue;
    }
    ++valid;
    ++report.trials;
    // The derivation sums over every node, the node itself included.
    const auto sim = similarity_matrix(prob, false);
    const double labeled = homophily_prob(sim, truth, 0);
    const double unlabeled = homophily_prob(sim, truth, 1);
    if (!(labeled > unlabeled) || std::abs(unlabeled - f0(g, x)) > 1e-12 || std::abs(labeled - f0(g, 1.0)) > 1e-12) {
      ++report.failures;
      if (first_failure.str().empty()) {
        first_failure << "labeled prob " << labeled << " vs unlabeled " << unlabeled << " (f0: " << f0(g, 1.0) << ", "
                      << f0(g, x) << ")";
      }
    }
  }
  report.passed = report.failures == 0;
  report.detail = first_failure.str().empty() ? "no violations among valid trials" : first_failure.str();
  return report;
}

LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit_loglog needs at least two paired points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DegenerateError("fit_loglog: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw DegenerateError("fit_loglog: x values are all equal");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

VarianceSweepResult check_theorem2_variance(std::span<const int> t_values, int replicates, std::uint64_t seed,
                                            const Theorem2Options& options) {
  if (replicates < 2) throw ConfigError("check_theorem2_variance: need at least 2 replicates");
  if (t_values.size() < 2) throw ConfigError("check_theorem2_variance: need at least 2 t values");
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (t_values[i] < 1 || (i > 0 && t_values[i] <= t_values[i - 1]))
      throw ConfigError("check_theorem2_variance: t values must be positive and strictly increasing");
  }

  PlantedConfig planted;
  planted.num_graphs = options.num_graphs;
  planted.signal = 0.5;
  const auto dataset =
      build_features(make_planted_dataset(planted, derive_seed(seed, {0xd5ULL})), FeatureScheme::node_label_onehot);
  const auto split = make_class_imbalanced_split(dataset, 1.0, 0.5, 0.0, derive_seed(seed, {0x5eULL}));

  AllocConfig alloc;
  alloc.d_bar = 5.0;
  alloc.k_min = 3;
  alloc.k_max = 20;
  alloc.rho1 = 5.0;
  alloc.rho2 = 1.0;
  alloc.window_r = 5;

  EncoderConfig enc;
  enc.arch = EncoderArch::gcn;
  enc.num_layers = 1;
  enc.hidden_dim = 8;

  GoGClassifierConfig down;
  down.hidden_dim = 8;
  down.num_layers = 2;

  TrainConfig train;
  train.epochs = options.epochs;
  train.seed = derive_seed(seed, {0x71ULL});
  train.select_best = false;
  train.encoder_optimizer.kind = OptimizerKind::adam;
  train.encoder_optimizer.learning_rate = 0.01;
  train.downstream_optimizer.kind = OptimizerKind::sgd;
  train.downstream_optimizer.learning_rate = options.learning_rate;
  train.downstream_optimizer.schedule = LrSchedule::inverse;

  const Encoder encoder(enc, dataset.feature_dim, dataset.num_classes);
  const GoGClassifier model(down, enc.hidden_dim, dataset.num_classes);
  const auto graphs = prepare_graphs(dataset);
  const auto train_view = masked_labels(dataset, split.train_idx);

  VarianceSweepResult result;
  result.t_values.assign(t_values.begin(), t_values.end());
  for (const int t : t_values) {
    std::vector<Matrix> embeddings;
    embeddings.reserve(static_cast<std::size_t>(replicates));
    for (int r = 0; r < replicates; ++r) {
      SamplerConfig sampler;
      sampler.mode = SampleMode::with_replacement;
      sampler.samples_per_epoch = t;
      sampler.seed = options.independent_replicates
                         ? derive_seed(seed, {0x5aULL, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(r)})
                         : derive_seed(seed, {0x5aULL});
      const auto run = train_full_pipeline(dataset, split, alloc, enc, sampler, down, train);
      // Embeddings of the final parameters on the expected GoG.
      const auto pass = encode_dataset(encoder, run.state.encoder_params, graphs, Mode::eval);
      const auto sim = similarity_matrix(build_prob_matrix(pass.logits, train_view), true);
      const auto prop = weighted_propagation(expected_inclusion_matrix(sim, run.allocation), down.symmetrize);
      embeddings.push_back(
          downstream_forward(model, run.state.downstream_params, prop, pass.embeddings, Mode::eval).embeddings);
    }
    const Eigen::Index size = embeddings.front().size();
    double total_var = 0.0;
    // Sample variance as the mean squared pairwise difference / 2, which is
    // exactly zero for identical replicates.
    for (Eigen::Index c = 0; c < size; ++c) {
      double sum = 0.0;
      for (int a = 0; a < replicates; ++a)
        for (int b = a + 1; b < replicates; ++b) {
          const double d = embeddings[a].data()[c] - embeddings[b].data()[c];
          sum += d * d;
        }
      total_var += sum / (static_cast<double>(replicates) * (replicates - 1));
    }
    result.variance_estimates.push_back(total_var / static_cast<double>(size));
  }

  const bool degenerate = std::any_of(result.variance_estimates.begin(), result.variance_estimates.end(),
                                      [](double v) { return !(v > 0.0); });
  if (degenerate) {
    result.inconclusive = true;
    return result;
  }
  std::vector<double> xs(t_values.begin(), t_values.end());
  const auto fit = fit_loglog(xs, result.variance_estimates);
  result.fitted_slope = fit.slope;
  result.r_squared = fit.r_squared;
  return result;
}

bool theorem2_passes(const VarianceSweepResult& result) {
  return !result.inconclusive && result.fitted_slope >= -1.3 && result.fitted_slope <= -0.7 && result.r_squared >= 0.8;
}

}  // namespace samgog
