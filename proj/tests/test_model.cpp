// tests/test_model.cpp

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
#include <string>
#include <vector>

#include "awe/model.hpp"
#include "awe/rng.hpp"
#include "fd_check.hpp"
#include "test_util.hpp"

using namespace awe;
using awe_test::TempDir;

namespace {

FeatureMatrix random_features(std::size_t frames, std::size_t dim, Rng& rng) {
  FeatureMatrix fm;
  fm.data = MatF(frames, dim);
  for (std::size_t i = 0; i < fm.data.size(); ++i)
    fm.data.data()[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
  return fm;
}

AweConfig tiny_self_config() {
  AweConfig cfg;
  cfg.input_dim = 5;
  cfg.hidden = 4;
  cfg.encoder_layers = 2;
  cfg.mode = AweMode::kSelfSupervised;
  cfg.dropout_p = 0.3;
  return cfg;
}

AweConfig tiny_super_config() {
  AweConfig cfg;
  cfg.input_dim = 4;
  cfg.hidden = 5;
  cfg.encoder_layers = 2;
  cfg.mode = AweMode::kSupervised;
  cfg.vocab = {kEosSymbol, kStartSymbol, "a", "b", "c"};
  cfg.dropout_p = 0.3;
  return cfg;
}

std::size_t encoder_param_entries(const AweModel& model) {
  std::size_t total = 0;
  const nn::ParamStore& store = model.params();
  for (std::size_t i = 0; i < store.count(); ++i) {
    if (store.name(static_cast<int>(i)).rfind("enc.", 0) == 0)
      total += store.value(static_cast<int>(i)).size();
  }
  return total;
}

}  // namespace

TEST_CASE("instantiated encoders carry exactly the published parameter counts") {
  struct Row {
    std::size_t input, hidden, layers;
    std::size_t expected;
  };
  const Row rows[] = {{39, 100, 2, 354400},
                      {768, 100, 2, 937600},
                      {256, 100, 2, 528000},
                      {1024, 100, 2, 1142400},
                      {1024, 150, 1, 1411200}};
  for (const Row& row : rows) {
    AweConfig cfg;
    cfg.input_dim = row.input;
    cfg.hidden = row.hidden;
    cfg.encoder_layers = row.layers;
    cfg.mode = AweMode::kSelfSupervised;
    AweModel model(cfg);
    CHECK(encoder_param_entries(model) == row.expected);
    CHECK(nn::count_encoder_params(row.input, row.hidden, row.layers, true) ==
          row.expected);
  }
}

TEST_CASE("embed produces a 2H vector, 200 at the published setting") {
  Rng rng(1);
  AweConfig cfg;
  cfg.input_dim = 13;
  cfg.hidden = 100;
  cfg.encoder_layers = 2;
  AweModel model = AweModel::randomized(cfg, rng);
  FeatureMatrix x = random_features(9, 13, rng);
  Embedding e = model.embed(x);
  CHECK(e.vector.size() == 200);
  for (double v : e.vector) REQUIRE(std::isfinite(v));
}

TEST_CASE("embed dimension is 2H regardless of sequence length") {
  Rng rng(2);
  AweModel model = AweModel::randomized(tiny_self_config(), rng);
  for (std::size_t frames : {1, 2, 7, 40}) {
    FeatureMatrix x = random_features(frames, 5, rng);
    CHECK(model.embed(x).vector.size() == 8);
  }
}

TEST_CASE("embed is deterministic and input-sensitive") {
  Rng rng(3);
  AweModel model = AweModel::randomized(tiny_self_config(), rng);
  FeatureMatrix x = random_features(6, 5, rng);
  Embedding a = model.embed(x);
  Embedding b = model.embed(x);
  REQUIRE(a.vector == b.vector);

  // Collision check over 100 random pairs.
  for (int trial = 0; trial < 100; ++trial) {
    FeatureMatrix u = random_features(4 + rng.below(4), 5, rng);
    FeatureMatrix v = random_features(4 + rng.below(4), 5, rng);
    REQUIRE(model.embed(u).vector != model.embed(v).vector);
  }
}

TEST_CASE("embed validates input dimension and length") {
  Rng rng(4);
  AweConfig cfg = tiny_self_config();
  cfg.max_frames = 10;
  AweModel model = AweModel::randomized(cfg, rng);
  FeatureMatrix wrong_dim = random_features(4, 3, rng);
  CHECK_THROWS_AS(model.embed(wrong_dim), ArgumentError);
  FeatureMatrix too_long = random_features(11, 5, rng);
  CHECK_THROWS_AS(model.embed(too_long), ArgumentError);
}

TEST_CASE("mse of an exact prediction is zero") {
  nn::ParamStore store;
  nn::Tape tape(&store);
  std::vector<double> target{0.5, -1.25, 3.0};
  nn::Expr pred = tape.constant(target);
  nn::Expr loss = tape.mse(pred, target.data(), target.size());
  CHECK(*tape.value(loss) == 0.0);
}

TEST_CASE("reconstruction loss is non-negative and mode-checked") {
  Rng rng(5);
  AweModel model = AweModel::randomized(tiny_self_config(), rng);
  FeatureMatrix x = random_features(5, 5, rng);
  Rng loss_rng(7);
  const double loss = model.reconstruction_loss(x, loss_rng);
  CHECK(loss >= 0.0);
  CHECK(std::isfinite(loss));

  AweModel super = AweModel::randomized(tiny_super_config(), rng);
  Rng r2(7);
  CHECK_THROWS_AS(super.reconstruction_loss(random_features(3, 4, rng), r2),
                  StateError);
}

TEST_CASE("symbol loss of an all-zero model is ln V per step") {
  AweConfig cfg = tiny_super_config();
  cfg.dropout_p = 0.0;
  AweModel model(cfg);  // zero parameters -> uniform logits every step
  Rng rng(6);
  FeatureMatrix x;
  x.data = MatF(3, 4, 0.25f);
  const double loss =
      model.symbol_loss(x, {"a", "b", kEosSymbol}, rng, false);
  CHECK(std::abs(loss - std::log(5.0)) < 1e-12);
}

TEST_CASE("logits massively favoring the target give near-zero loss") {
  AweConfig cfg = tiny_super_config();
  cfg.dropout_p = 0.0;
  AweModel model(cfg);
  // Zero model except a huge head bias on EOS: every step predicts EOS.
  const int head_b = model.params().find("head.b");
  REQUIRE(head_b >= 0);
  model.params().value(head_b)(0, 0) = 50.0;  // vocab[0] is EOS
  Rng rng(7);
  FeatureMatrix x;
  x.data = MatF(2, 4, 0.5f);
  const double loss = model.symbol_loss(x, {kEosSymbol}, rng, false);
  CHECK(loss < 1e-9);
}

TEST_CASE("symbol loss validates vocabulary and EOS termination") {
  Rng rng(8);
  AweModel model = AweModel::randomized(tiny_super_config(), rng);
  FeatureMatrix x = random_features(3, 4, rng);
  Rng r(1);
  CHECK_THROWS_AS(model.symbol_loss(x, {"z", kEosSymbol}, r, false),
                  VocabularyError);
  CHECK_THROWS_AS(model.symbol_loss(x, {"a", "b"}, r, false), ArgumentError);

  AweModel self = AweModel::randomized(tiny_self_config(), rng);
  FeatureMatrix y = random_features(3, 5, rng);
  CHECK_THROWS_AS(self.symbol_loss(y, {"a", kEosSymbol}, r, false), StateError);
}

TEST_CASE("reconstruction loss gradients match finite differences") {
  Rng rng(9);
  AweConfig cfg = tiny_self_config();
  cfg.dropout_p = 0.0;
  AweModel model = AweModel::randomized(cfg, rng);
  FeatureMatrix x = random_features(3, 5, rng);
  const MatD xd = to_double(x.data);

  model.params().zero_grads();
  nn::Tape tape(&model.params());
  Rng build_rng(1);
  nn::Expr loss = model.build_loss(tape, xd, nullptr, false, build_rng);
  tape.backward(loss);

  auto loss_value = [&]() {
    nn::Tape t(&model.params());
    Rng r(1);
    return *t.value(model.build_loss(t, xd, nullptr, false, r));
  };
  awe_test::FdReport rep =
      awe_test::finite_difference_check(model.params(), loss_value);
  INFO("worst " << rep.worst << " rel " << rep.max_rel_err);
  CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("reconstruction loss gradients hold under a fixed dropout mask") {
  Rng rng(10);
  AweConfig cfg = tiny_self_config();
  cfg.dropout_p = 0.3;
  AweModel model = AweModel::randomized(cfg, rng);
  FeatureMatrix x = random_features(4, 5, rng);
  const MatD xd = to_double(x.data);

  model.params().zero_grads();
  nn::Tape tape(&model.params());
  Rng build_rng(42);
  nn::Expr loss = model.build_loss(tape, xd, nullptr, true, build_rng);
  tape.backward(loss);

  // The closure reseeds the mask generator, so every finite-difference
  // evaluation sees the same dropout pattern.
  auto loss_value = [&]() {
    nn::Tape t(&model.params());
    Rng r(42);
    return *t.value(model.build_loss(t, xd, nullptr, true, r));
  };
  awe_test::FdReport rep =
      awe_test::finite_difference_check(model.params(), loss_value);
  INFO("worst " << rep.worst << " rel " << rep.max_rel_err);
  CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("symbol loss gradients match finite differences") {
  Rng rng(11);
  AweConfig cfg = tiny_super_config();
  cfg.dropout_p = 0.0;
  AweModel model = AweModel::randomized(cfg, rng);
  FeatureMatrix x = random_features(3, 4, rng);
  const MatD xd = to_double(x.data);
  std::vector<std::size_t> target = model.target_ids({"a", "c", kEosSymbol});

  model.params().zero_grads();
  nn::Tape tape(&model.params());
  Rng build_rng(2);
  nn::Expr loss = model.build_loss(tape, xd, &target, false, build_rng);
  tape.backward(loss);

  auto loss_value = [&]() {
    nn::Tape t(&model.params());
    Rng r(2);
    return *t.value(model.build_loss(t, xd, &target, false, r));
  };
  awe_test::FdReport rep =
      awe_test::finite_difference_check(model.params(), loss_value);
  INFO("worst " << rep.worst << " rel " << rep.max_rel_err);
  CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("losses are independent of evaluation order across segments") {
  Rng rng(12);
  AweConfig cfg = tiny_self_config();
  AweModel model = AweModel::randomized(cfg, rng);
  FeatureMatrix a = random_features(4, 5, rng);
  FeatureMatrix b = random_features(6, 5, rng);
  Rng r1(0), r2(0);
  const double la_first = model.reconstruction_loss(a, r1, false);
  const double lb_then = model.reconstruction_loss(b, r1, false);
  const double lb_first = model.reconstruction_loss(b, r2, false);
  const double la_then = model.reconstruction_loss(a, r2, false);
  CHECK(la_first == la_then);
  CHECK(lb_first == lb_then);
}

TEST_CASE("char vocab and targets") {
  std::vector<std::string> vocab = build_char_vocab({"night", "light"});
  // EOS, START, then sorted unique characters g h i l n t.
  REQUIRE(vocab.size() == 8);
  CHECK(vocab[0] == kEosSymbol);
  CHECK(vocab[1] == kStartSymbol);
  CHECK(vocab[2] == "g");
  CHECK(vocab[7] == "t");

  std::vector<std::string> target = char_target("night");
  REQUIRE(target.size() == 6);
  CHECK(target[0] == "n");
  CHECK(target.back() == kEosSymbol);

  // Multi-byte characters stay whole symbols.
  std::vector<std::string> arabic = char_target("\xd9\x83\xd9\x84");
  REQUIRE(arabic.size() == 3);
  CHECK(arabic[0] == "\xd9\x83");
}

TEST_CASE("checkpoint round-trip preserves config and behavior") {
  TempDir dir;
  Rng rng(13);
  AweConfig cfg = tiny_super_config();
  AweModel model = AweModel::randomized(cfg, rng);
  const std::string path = dir.file("model.awec");
  model.save_checkpoint(path);
  AweModel back = AweModel::load_checkpoint(path);

  CHECK(back.config().input_dim == cfg.input_dim);
  CHECK(back.config().hidden == cfg.hidden);
  CHECK(back.config().encoder_layers == cfg.encoder_layers);
  CHECK(back.config().mode == cfg.mode);
  CHECK(back.config().vocab == cfg.vocab);
  CHECK(back.config().dropout_p == cfg.dropout_p);
  CHECK(back.config().max_frames == cfg.max_frames);

  FeatureMatrix x = random_features(5, 4, rng);
  Embedding e1 = model.embed(x);
  Embedding e2 = back.embed(x);
  REQUIRE(e1.vector.size() == e2.vector.size());
  for (std::size_t i = 0; i < e1.vector.size(); ++i)
    REQUIRE(std::abs(e1.vector[i] - e2.vector[i]) < 1e-5);
}

TEST_CASE("checkpoint loading rejects corruption") {
  TempDir dir;
  Rng rng(14);
  AweModel model = AweModel::randomized(tiny_self_config(), rng);
  const std::string path = dir.file("model.awec");
  model.save_checkpoint(path);

  SECTION("truncated") {
    std::string bytes = awe_test::read_file(path);
    awe_test::write_file(path, bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(AweModel::load_checkpoint(path), CorruptionError);
  }
  SECTION("bad magic") {
    std::string bytes = awe_test::read_file(path);
    bytes[1] = 'x';
    awe_test::write_file(path, bytes);
    CHECK_THROWS_AS(AweModel::load_checkpoint(path), CorruptionError);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(AweModel::load_checkpoint(dir.file("nope.awec")), IoError);
  }
}

TEST_CASE("config validation") {
  AweConfig cfg = tiny_super_config();
  cfg.vocab = {kEosSymbol, kStartSymbol, "a", "a"};
  CHECK_THROWS_AS(AweModel{cfg}, ArgumentError);
  AweConfig cfg2 = tiny_super_config();
  cfg2.vocab = {"a", "b"};
  CHECK_THROWS_AS(AweModel{cfg2}, ArgumentError);
  AweConfig cfg3 = tiny_self_config();
  cfg3.dropout_p = 1.0;
  CHECK_THROWS_AS(AweModel{cfg3}, ArgumentError);
}
