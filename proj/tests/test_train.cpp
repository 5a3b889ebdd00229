// tests/test_train.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "awe/model.hpp"
#include "awe/rng.hpp"
#include "awe/train.hpp"
#include "test_util.hpp"

using namespace awe;

namespace {

FeatureMatrix random_features(std::size_t frames, std::size_t dim, Rng& rng) {
  FeatureMatrix fm;
  fm.data = MatF(frames, dim);
  for (std::size_t i = 0; i < fm.data.size(); ++i)
    fm.data.data()[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
  return fm;
}

// Smooth low-dimensional trajectories that a small autoencoder can learn.
std::vector<TrainItem> synthetic_items(std::size_t n, std::size_t dim,
                                       Rng& rng) {
  std::vector<TrainItem> items;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t frames = 4 + rng.below(4);
    TrainItem item;
    item.features.data = MatF(frames, dim);
    const double phase = rng.uniform(0.0, 6.28);
    const double freq = 0.5 + rng.uniform(0.0, 1.0);
    for (std::size_t t = 0; t < frames; ++t)
      for (std::size_t d = 0; d < dim; ++d)
        item.features.data(t, d) = static_cast<float>(
            std::sin(phase + freq * static_cast<double>(t) +
                     static_cast<double>(d)));
    items.push_back(std::move(item));
  }
  return items;
}

nn::ParamStore make_store(Rng& rng) {
  nn::ParamStore store;
  store.add("w", 3, 4);
  store.add("b", 3, 1);
  store.init_uniform(1.0, rng);
  return store;
}

}  // namespace

TEST_CASE("adam with zero gradient leaves parameters unchanged") {
  Rng rng(1);
  nn::ParamStore store = make_store(rng);
  store.zero_grads();
  const MatD before = store.value(0);
  AdamState state;
  adam_step(store, state, 0.1);
  CHECK(store.value(0) == before);
  CHECK(state.step == 1);
}

TEST_CASE("first adam step from zero state moves by about lr") {
  Rng rng(2);
  nn::ParamStore store = make_store(rng);
  const MatD before = store.value(0);
  store.zero_grads();
  for (std::size_t i = 0; i < store.grad(0).size(); ++i)
    store.grad(0).data()[i] = 0.7;  // constant gradient
  AdamState state;
  const double lr = 0.05;
  adam_step(store, state, lr);
  // Bias-corrected first step: lr * g / (|g| + eps) = lr * sign(g).
  for (std::size_t i = 0; i < before.size(); ++i) {
    const double delta = before.data()[i] - store.value(0).data()[i];
    CHECK(std::abs(delta - lr) < 1e-6);
  }
}

TEST_CASE("adam is deterministic across identical runs") {
  Rng rng1(3), rng2(3);
  nn::ParamStore a = make_store(rng1);
  nn::ParamStore b = make_store(rng2);
  AdamState sa, sb;
  for (int step = 0; step < 5; ++step) {
    a.zero_grads();
    b.zero_grads();
    for (std::size_t i = 0; i < a.grad(0).size(); ++i) {
      a.grad(0).data()[i] = 0.1 * (step + 1);
      b.grad(0).data()[i] = 0.1 * (step + 1);
    }
    adam_step(a, sa, 0.01);
    adam_step(b, sb, 0.01);
  }
  CHECK(a.value(0) == b.value(0));
  CHECK(a.value(1) == b.value(1));
}

TEST_CASE("optimizers refuse non-finite gradients") {
  Rng rng(4);
  nn::ParamStore store = make_store(rng);
  store.zero_grads();
  store.grad(0).data()[0] = std::numeric_limits<double>::quiet_NaN();
  AdamState state;
  const MatD before = store.value(0);
  CHECK_THROWS_AS(adam_step(store, state, 0.1), NumericError);
  CHECK_THROWS_AS(sgd_step(store, 0.1), NumericError);
  CHECK(store.value(0) == before);  // step refused, nothing mutated
}

TEST_CASE("sgd with zero learning rate is the identity") {
  Rng rng(5);
  nn::ParamStore store = make_store(rng);
  store.zero_grads();
  for (std::size_t i = 0; i < store.grad(0).size(); ++i)
    store.grad(0).data()[i] = 3.0;
  const MatD before = store.value(0);
  sgd_step(store, 0.0);
  CHECK(store.value(0) == before);
}

TEST_CASE("step schedule arithmetic") {
  TrainConfig cfg;
  cfg.optimizer = OptimizerKind::kSgd;
  cfg.lr = 0.1;
  cfg.schedule = ScheduleKind::kStep;
  cfg.step_factor = 0.5;
  cfg.step_period_epochs = 10;
  CHECK(schedule_lr(cfg, 0, 0) == 0.1);
  CHECK(schedule_lr(cfg, 9, 0) == 0.1);
  CHECK(schedule_lr(cfg, 10, 0) == 0.05);
  CHECK(std::abs(schedule_lr(cfg, 25, 0) - 0.025) < 1e-15);
}

TEST_CASE("cyclical triangular schedule peaks mid-cycle") {
  TrainConfig cfg;
  cfg.optimizer = OptimizerKind::kSgd;
  cfg.lr = 0.1;
  cfg.schedule = ScheduleKind::kCyclicalTriangular;
  cfg.cyc_lr_min = 0.01;
  cfg.cyc_lr_max = 0.1;
  cfg.cyc_steps = 100;
  CHECK(schedule_lr(cfg, 0, 0) == 0.01);
  CHECK(schedule_lr(cfg, 0, 50) == 0.1);
  CHECK(schedule_lr(cfg, 0, 100) == 0.01);
  CHECK(std::abs(schedule_lr(cfg, 0, 25) - 0.055) < 1e-12);
  CHECK(std::abs(schedule_lr(cfg, 0, 75) - 0.055) < 1e-12);
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.lr = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  TrainConfig cyc;
  cyc.schedule = ScheduleKind::kCyclicalTriangular;
  cyc.cyc_lr_min = 0.5;
  cyc.cyc_lr_max = 0.1;
  CHECK_THROWS_AS(cyc.validate(), ArgumentError);
}

TEST_CASE("training a tiny autoencoder halves the loss") {
  Rng rng(6);
  AweConfig mc;
  mc.input_dim = 4;
  mc.hidden = 8;
  mc.encoder_layers = 1;
  mc.mode = AweMode::kSelfSupervised;
  mc.dropout_p = 0.0;
  Rng init(7);
  AweModel model = AweModel::randomized(mc, init);
  std::vector<TrainItem> items = synthetic_items(20, 4, rng);

  TrainConfig tc;
  tc.optimizer = OptimizerKind::kAdam;
  tc.lr = 3e-3;
  tc.batch_size = 4;
  tc.epochs = 200;
  tc.seed = 11;
  const TrainResult result = train(model, items, tc);
  REQUIRE(result.log.size() == 200);
  const double initial = result.log.front().mean_loss;
  const double final_loss = result.log.back().mean_loss;
  INFO("initial " << initial << " final " << final_loss);
  CHECK(final_loss < 0.5 * initial);
  CHECK(result.best_loss <= final_loss);
}

TEST_CASE("training is deterministic given the seed") {
  Rng rng(8);
  std::vector<TrainItem> items = synthetic_items(8, 3, rng);
  AweConfig mc;
  mc.input_dim = 3;
  mc.hidden = 4;
  mc.encoder_layers = 1;
  mc.mode = AweMode::kSelfSupervised;
  mc.dropout_p = 0.3;

  auto run = [&]() {
    Rng init(21);
    AweModel model = AweModel::randomized(mc, init);
    TrainConfig tc;
    tc.epochs = 10;
    tc.batch_size = 3;
    tc.seed = 5;
    return train(model, items, tc).log;
  };
  std::vector<EpochLog> log1 = run();
  std::vector<EpochLog> log2 = run();
  REQUIRE(log1.size() == log2.size());
  for (std::size_t i = 0; i < log1.size(); ++i) {
    REQUIRE(log1[i].mean_loss == log2[i].mean_loss);
    REQUIRE(log1[i].lr == log2[i].lr);
  }
}

TEST_CASE("per-segment losses are independent of batching") {
  Rng rng(9);
  std::vector<TrainItem> items = synthetic_items(7, 3, rng);
  AweConfig mc;
  mc.input_dim = 3;
  mc.hidden = 4;
  mc.encoder_layers = 2;
  mc.mode = AweMode::kSelfSupervised;
  Rng init(2);
  AweModel model = AweModel::randomized(mc, init);

  // Each segment runs at its true length, so its loss is the same alone or
  // inside any batch.
  std::vector<double> all = per_segment_losses(model, items);
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::vector<double> single =
        per_segment_losses(model, {items[i]});
    REQUIRE(single.size() == 1);
    REQUIRE(single[0] == all[i]);
  }

  // Embeddings likewise do not depend on what else is evaluated.
  Embedding alone = model.embed(items[0].features);
  model.embed(items[3].features);
  Embedding again = model.embed(items[0].features);
  REQUIRE(alone.vector == again.vector);
}

TEST_CASE("gradient clipping bounds the global norm") {
  Rng rng(10);
  nn::ParamStore store = make_store(rng);
  store.zero_grads();
  for (std::size_t i = 0; i < store.grad(0).size(); ++i)
    store.grad(0).data()[i] = rng.uniform(-20.0, 20.0);
  for (std::size_t i = 0; i < store.grad(1).size(); ++i)
    store.grad(1).data()[i] = rng.uniform(-20.0, 20.0);
  const double clip = 5.0;
  const double norm = store.grad_norm();
  REQUIRE(norm > clip);
  store.scale_grads(clip / norm);
  CHECK(store.grad_norm() <= clip + 1e-9);
}

TEST_CASE("training rejects empty input and missing targets") {
  Rng rng(11);
  AweConfig mc;
  mc.input_dim = 3;
  mc.hidden = 4;
  mc.encoder_layers = 1;
  mc.mode = AweMode::kSelfSupervised;
  Rng init(1);
  AweModel model = AweModel::randomized(mc, init);
  TrainConfig tc;
  CHECK_THROWS_AS(train(model, {}, tc), ArgumentError);

  AweConfig sc = mc;
  sc.mode = AweMode::kSupervised;
  sc.vocab = {kEosSymbol, kStartSymbol, "a"};
  AweModel super = AweModel::randomized(sc, init);
  std::vector<TrainItem> no_target(1);
  no_target[0].features = random_features(3, 3, rng);
  CHECK_THROWS_AS(train(super, no_target, tc), ArgumentError);
}

TEST_CASE("over-length segments are skipped with a count") {
  Rng rng(12);
  AweConfig mc;
  mc.input_dim = 3;
  mc.hidden = 4;
  mc.encoder_layers = 1;
  mc.mode = AweMode::kSelfSupervised;
  mc.max_frames = 6;
  mc.dropout_p = 0.0;
  Rng init(3);
  AweModel model = AweModel::randomized(mc, init);
  std::vector<TrainItem> items(3);
  items[0].features = random_features(4, 3, rng);
  items[1].features = random_features(9, 3, rng);  // over max_frames
  items[2].features = random_features(5, 3, rng);
  TrainConfig tc;
  tc.epochs = 1;
  const TrainResult result = train(model, items, tc);
  CHECK(result.skipped_over_length == 1);
}

TEST_CASE("divergent training raises a numeric error naming the epoch") {
  Rng rng(13);
  AweConfig mc;
  mc.input_dim = 3;
  mc.hidden = 4;
  mc.encoder_layers = 1;
  mc.mode = AweMode::kSelfSupervised;
  mc.dropout_p = 0.0;
  Rng init(4);
  AweModel model = AweModel::randomized(mc, init);
  std::vector<TrainItem> items = synthetic_items(4, 3, rng);
  TrainConfig tc;
  tc.optimizer = OptimizerKind::kSgd;
  tc.lr = 1e12;
  tc.grad_clip = 0.0;
  tc.epochs = 50;
  try {
    train(model, items, tc);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("supervised overfit of one pair reaches 0.1 per-step loss") {
  Rng rng(14);
  AweConfig mc;
  mc.input_dim = 4;
  mc.hidden = 6;
  mc.encoder_layers = 1;
  mc.mode = AweMode::kSupervised;
  mc.vocab = {kEosSymbol, kStartSymbol, "a", "b", "c"};
  mc.dropout_p = 0.0;
  Rng init(5);
  AweModel model = AweModel::randomized(mc, init);
  FeatureMatrix x = random_features(3, 4, rng);
  std::vector<std::size_t> target = model.target_ids({"b", "a", kEosSymbol});
  const MatD xd = to_double(x.data);

  nn::Tape tape(&model.params());
  AdamState adam;
  Rng loss_rng(0);
  double loss = 0.0;
  int steps = 0;
  for (; steps < 2000; ++steps) {
    tape.reset();
    model.params().zero_grads();
    nn::Expr l = model.build_loss(tape, xd, &target, false, loss_rng);
    loss = *tape.value(l);
    if (loss < 0.1) break;
    tape.backward(l);
    adam_step(model.params(), adam, 1e-2);
  }
  INFO("reached loss " << loss << " after " << steps << " steps");
  CHECK(loss < 0.1);
}

TEST_CASE("loss log serialization is stable") {
  awe_test::TempDir dir;
  std::vector<EpochLog> log{{0, 1.5, 0.001}, {1, 0.75, 0.001}};
  const std::string path = dir.file("losses.tsv");
  write_loss_log(log, path);
  CHECK(awe_test::read_file(path) ==
        "epoch\tmean_loss\tlr\n0\t1.5\t0.001\n1\t0.75\t0.001\n");
}
