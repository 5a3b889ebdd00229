// awe/train.hpp

// Copyright 2026  AWE Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef AWE_TRAIN_HPP_
#define AWE_TRAIN_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "awe/errors.hpp"
#include "awe/matrix.hpp"
#include "awe/model.hpp"
#include "awe/nn.hpp"
#include "awe/rng.hpp"

namespace awe {

enum class OptimizerKind { kAdam, kSgd };
enum class ScheduleKind { kConstant, kStep, kCyclicalTriangular };

inline const char* to_string(OptimizerKind o) {
  return o == OptimizerKind::kAdam ? "adam" : "sgd";
}
inline const char* to_string(ScheduleKind s) {
  switch (s) {
    case ScheduleKind::kConstant: return "constant";
    case ScheduleKind::kStep: return "step";
    default: return "cyclical_triangular";
  }
}

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double lr = 1e-3;
  ScheduleKind schedule = ScheduleKind::kConstant;
  double step_factor = 0.5;
  int step_period_epochs = 10;
  double cyc_lr_min = 0.01;
  double cyc_lr_max = 0.1;
  int cyc_steps = 100;
  std::size_t batch_size = 32;
  int epochs = 50;
  std::uint64_t seed = 0;
  double grad_clip = 5.0;  // <= 0 disables clipping

  void validate() const {
    if (lr <= 0.0) throw ArgumentError("TrainConfig: lr must be positive");
    if (batch_size < 1)
      throw ArgumentError("TrainConfig: batch_size must be >= 1");
    if (epochs < 0) throw ArgumentError("TrainConfig: epochs must be >= 0");
    if (schedule == ScheduleKind::kStep &&
        (step_factor <= 0.0 || step_period_epochs < 1))
      throw ArgumentError("TrainConfig: bad step schedule parameters");
    if (schedule == ScheduleKind::kCyclicalTriangular) {
      if (!(cyc_lr_min < cyc_lr_max))
        throw ArgumentError("TrainConfig: cyclical schedule needs lr_min < lr_max");
      if (cyc_steps < 2)
        throw ArgumentError("TrainConfig: cyclical schedule needs cycle_steps >= 2");
    }
  }
};

// Learning rate for a given epoch and global optimizer step. The step
// schedule halves (by factor) every period epochs; the cyclical schedule is
// a triangle wave between lr_min and lr_max over cycle_steps.
inline double schedule_lr(const TrainConfig& cfg, int epoch,
                          long global_step) {
  switch (cfg.schedule) {
    case ScheduleKind::kConstant:
      return cfg.lr;
    case ScheduleKind::kStep:
      return cfg.lr * std::pow(cfg.step_factor, epoch / cfg.step_period_epochs);
    case ScheduleKind::kCyclicalTriangular: {
      const long phase = global_step % cfg.cyc_steps;
      const double half = cfg.cyc_steps / 2.0;
      const double frac = (phase <= half)
                              ? static_cast<double>(phase) / half
                              : static_cast<double>(cfg.cyc_steps - phase) / half;
      return cfg.cyc_lr_min + (cfg.cyc_lr_max - cfg.cyc_lr_min) * frac;
    }
  }
  return cfg.lr;
}

/// First/second-moment state for Adam, one slot per parameter matrix.
struct AdamState {
  std::vector<MatD> m, v;
  long step = 0;

  void ensure(const nn::ParamStore& params) {
    if (!m.empty()) return;
    for (std::size_t i = 0; i < params.count(); ++i) {
      const MatD& p = params.value(static_cast<int>(i));
      m.emplace_back(p.rows(), p.cols());
      v.emplace_back(p.rows(), p.cols());
    }
  }
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

// Bias-corrected moment update. Refuses non-finite gradients; the step
// counter still advances on a zero gradient.
inline void adam_step(nn::ParamStore& params, AdamState& state, double lr) {
  if (!params.grads_finite())
    throw NumericError("adam_step: non-finite gradient, step refused");
  state.ensure(params);
  state.step += 1;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.count(); ++i) {
    MatD& p = params.value(static_cast<int>(i));
    const MatD& g = params.grad(static_cast<int>(i));
    MatD& m = state.m[i];
    MatD& v = state.v[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double gk = g.data()[k];
      m.data()[k] = kAdamBeta1 * m.data()[k] + (1.0 - kAdamBeta1) * gk;
      v.data()[k] = kAdamBeta2 * v.data()[k] + (1.0 - kAdamBeta2) * gk * gk;
      const double mhat = m.data()[k] / bc1;
      const double vhat = v.data()[k] / bc2;
      p.data()[k] -= lr * mhat / (std::sqrt(vhat) + kAdamEps);
    }
  }
}

inline void sgd_step(nn::ParamStore& params, double lr_t) {
  if (!params.grads_finite())
    throw NumericError("sgd_step: non-finite gradient, step refused");
  for (std::size_t i = 0; i < params.count(); ++i) {
    MatD& p = params.value(static_cast<int>(i));
    const MatD& g = params.grad(static_cast<int>(i));
    for (std::size_t k = 0; k < p.size(); ++k)
      p.data()[k] -= lr_t * g.data()[k];
  }
}

/// One training example: features plus the symbol target (empty when
/// self-supervised).
struct TrainItem {
  FeatureMatrix features;
  std::vector<std::string> target;
};

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  std::vector<EpochLog> log;
  double best_loss = 0.0;
  int best_epoch = -1;
  std::size_t skipped_over_length = 0;
};

inline void write_loss_log(const std::vector<EpochLog>& log,
                           const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write loss log: " + path);
  out << "epoch\tmean_loss\tlr\n";
  char buf[64];
  for (const EpochLog& e : log) {
    std::snprintf(buf, sizeof(buf), "%d\t%.9g\t%.9g\n", e.epoch, e.mean_loss,
                  e.lr);
    out << buf;
  }
}

// Per-segment evaluation losses with dropout off and no updates. A segment
// scores identically alone or in any batch, which is what the padding
// invariance contract demands of the batched loss.
inline std::vector<double> per_segment_losses(const AweModel& model,
                                              const std::vector<TrainItem>& items) {
  std::vector<double> losses;
  losses.reserve(items.size());
  Rng rng(0);
  nn::Tape tape(const_cast<nn::ParamStore*>(&model.params()));
  for (const TrainItem& item : items) {
    tape.reset();
    if (model.config().mode == AweMode::kSelfSupervised) {
      nn::Expr loss = model.build_loss(tape, to_double(item.features.data),
                                       nullptr, /*training=*/false, rng);
      losses.push_back(*tape.value(loss));
    } else {
      std::vector<std::size_t> ids = model.target_ids(item.target);
      nn::Expr loss = model.build_loss(tape, to_double(item.features.data),
                                       &ids, /*training=*/false, rng);
      losses.push_back(*tape.value(loss));
    }
  }
  return losses;
}

// Epoch loop: length-bucketed batches, seeded batch-order shuffle, mean of
// per-segment losses per batch, optional global-norm clipping. Each segment
// runs at its true length so no padded positions ever enter the recurrence
// or the loss. Returns the parameters of the best epoch.
inline TrainResult train(AweModel& model, const std::vector<TrainItem>& items,
                         const TrainConfig& cfg) {
  cfg.validate();
  const bool supervised = model.config().mode == AweMode::kSupervised;

  std::vector<std::size_t> usable;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].features.frames() > model.config().max_frames) {
      std::cerr << "warning: skipping segment " << i << " with "
                << items[i].features.frames() << " frames (max_frames "
                << model.config().max_frames << ")\n";
      ++skipped;
      continue;
    }
    if (supervised && items[i].target.empty())
      throw ArgumentError("supervised training: segment " + std::to_string(i) +
                          " has no target");
    usable.push_back(i);
  }
  if (usable.empty()) throw ArgumentError("train: no usable segments");

  // Length bucketing: sort by frame count (stable on input order), then
  // slice into fixed batches whose visit order is reshuffled every epoch.
  std::stable_sort(usable.begin(), usable.end(),
                   [&items](std::size_t a, std::size_t b) {
                     return items[a].features.frames() <
                            items[b].features.frames();
                   });
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t ofs = 0; ofs < usable.size(); ofs += cfg.batch_size) {
    const std::size_t end = std::min(ofs + cfg.batch_size, usable.size());
    batches.emplace_back(usable.begin() + ofs, usable.begin() + end);
  }

  std::vector<std::vector<std::size_t>> targets(items.size());
  if (supervised) {
    for (std::size_t i : usable) targets[i] = model.target_ids(items[i].target);
  }

  Rng rng(cfg.seed);
  nn::Tape tape(&model.params());
  AdamState adam;
  TrainResult result;
  std::vector<MatD> best_params;
  long global_step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::size_t> batch_order(batches.size());
    std::iota(batch_order.begin(), batch_order.end(), 0);
    rng.shuffle(batch_order);

    double epoch_loss_sum = 0.0;
    const double epoch_lr = schedule_lr(cfg, epoch, global_step);
    for (std::size_t bi = 0; bi < batch_order.size(); ++bi) {
      const std::vector<std::size_t>& batch = batches[batch_order[bi]];
      model.params().zero_grads();
      double batch_loss_sum = 0.0;
      for (std::size_t idx : batch) {
        tape.reset();
        const MatD x = to_double(items[idx].features.data);
        nn::Expr loss = model.build_loss(
            tape, x, supervised ? &targets[idx] : nullptr, true, rng);
        const double value = *tape.value(loss);
        if (!std::isfinite(value))
          throw NumericError("training diverged: non-finite loss at epoch " +
                             std::to_string(epoch) + ", batch " +
                             std::to_string(bi));
        tape.backward(loss);
        batch_loss_sum += value;
      }
      // Batch loss is the mean of per-segment losses, so scale the
      // accumulated gradient sum accordingly.
      model.params().scale_grads(1.0 / static_cast<double>(batch.size()));
      if (cfg.grad_clip > 0.0) {
        const double norm = model.params().grad_norm();
        if (norm > cfg.grad_clip)
          model.params().scale_grads(cfg.grad_clip / norm);
      }
      const double lr_t = schedule_lr(cfg, epoch, global_step);
      try {
        if (cfg.optimizer == OptimizerKind::kAdam)
          adam_step(model.params(), adam, lr_t);
        else
          sgd_step(model.params(), lr_t);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(bi) + ": " + e.what());
      }
      ++global_step;
      epoch_loss_sum += batch_loss_sum;
    }

    const double mean_loss = epoch_loss_sum / static_cast<double>(usable.size());
    result.log.push_back({epoch, mean_loss, epoch_lr});
    if (result.best_epoch < 0 || mean_loss < result.best_loss) {
      result.best_loss = mean_loss;
      result.best_epoch = epoch;
      best_params.clear();
      for (std::size_t i = 0; i < model.params().count(); ++i)
        best_params.push_back(model.params().value(static_cast<int>(i)));
    }
  }

  if (result.best_epoch >= 0) {
    for (std::size_t i = 0; i < best_params.size(); ++i)
      model.params().value(static_cast<int>(i)) = best_params[i];
  }
  result.skipped_over_length = skipped;
  return result;
}

}  // namespace awe

#endif  // AWE_TRAIN_HPP_
