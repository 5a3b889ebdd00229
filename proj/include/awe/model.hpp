// awe/model.hpp

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

#ifndef AWE_MODEL_HPP_
#define AWE_MODEL_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "awe/errors.hpp"
#include "awe/matrix.hpp"
#include "awe/nn.hpp"
#include "awe/rng.hpp"
#include "awe/text.hpp"

namespace awe {

enum class AweMode { kSelfSupervised, kSupervised };

inline const char* to_string(AweMode m) {
  return m == AweMode::kSelfSupervised ? "self_supervised" : "supervised";
}

inline AweMode awe_mode_from_string(const std::string& s) {
  if (s == "self_supervised") return AweMode::kSelfSupervised;
  if (s == "supervised") return AweMode::kSupervised;
  throw ArgumentError("unknown mode '" + s + "'");
}

inline constexpr const char* kEosSymbol = "<eos>";
inline constexpr const char* kStartSymbol = "<s>";

/// Bidirectional encoder + unidirectional decoder configuration. The
/// embedding is the 2H concatenation of the encoder's final states.
struct AweConfig {
  std::size_t input_dim = 0;
  std::size_t hidden = 100;
  std::size_t encoder_layers = 2;
  AweMode mode = AweMode::kSelfSupervised;
  std::vector<std::string> vocab;  // supervised only; includes EOS and START
  double dropout_p = 0.3;
  std::size_t max_frames = 400;

  std::size_t embedding_dim() const { return 2 * hidden; }

  void validate() const {
    if (input_dim < 1) throw ArgumentError("AweConfig: input_dim must be >= 1");
    if (hidden < 1) throw ArgumentError("AweConfig: hidden must be >= 1");
    if (encoder_layers < 1)
      throw ArgumentError("AweConfig: encoder_layers must be >= 1");
    if (dropout_p < 0.0 || dropout_p >= 1.0)
      throw ArgumentError("AweConfig: dropout_p must be in [0, 1)");
    if (max_frames < 1) throw ArgumentError("AweConfig: max_frames must be >= 1");
    if (mode == AweMode::kSupervised) {
      if (vocab.empty())
        throw ArgumentError("AweConfig: supervised mode needs a vocabulary");
      std::set<std::string> seen(vocab.begin(), vocab.end());
      if (seen.size() != vocab.size())
        throw ArgumentError("AweConfig: vocabulary symbols must be distinct");
      if (!seen.count(kEosSymbol) || !seen.count(kStartSymbol))
        throw ArgumentError("AweConfig: vocabulary must include EOS and START");
    }
  }
};

// EOS and START first, then the sorted unique characters of the words.
inline std::vector<std::string> build_char_vocab(
    const std::vector<std::string>& words) {
  std::set<std::string> chars;
  for (const std::string& w : words)
    for (const std::string& c : utf8_chars(w)) chars.insert(c);
  std::vector<std::string> vocab{kEosSymbol, kStartSymbol};
  vocab.insert(vocab.end(), chars.begin(), chars.end());
  return vocab;
}

/// Character sequence of a word with EOS appended.
inline std::vector<std::string> char_target(const std::string& word) {
  std::vector<std::string> t = utf8_chars(word);
  t.push_back(kEosSymbol);
  return t;
}

/// Fixed-dimension representation of one segment.
struct Embedding {
  std::vector<double> vector;
  std::string segment_id;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

class AweModel {
 public:
  explicit AweModel(const AweConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const std::size_t h = cfg_.hidden;
    for (std::size_t l = 0; l < cfg_.encoder_layers; ++l) {
      const std::size_t in_dim = (l == 0) ? cfg_.input_dim : 2 * h;
      enc_.push_back({nn::add_lstm_params(store_, layer_name("enc", l, "fwd"),
                                          in_dim, h),
                      nn::add_lstm_params(store_, layer_name("enc", l, "bwd"),
                                          in_dim, h)});
    }
    // h^T conditions the decoder through linear bridges that set every
    // decoder layer's initial hidden and cell state.
    for (std::size_t l = 0; l < cfg_.encoder_layers; ++l) {
      bridge_h_.push_back(
          {store_.add("bridge." + std::to_string(l) + ".h.w", h, 2 * h),
           store_.add("bridge." + std::to_string(l) + ".h.b", h, 1)});
      bridge_c_.push_back(
          {store_.add("bridge." + std::to_string(l) + ".c.w", h, 2 * h),
           store_.add("bridge." + std::to_string(l) + ".c.b", h, 1)});
    }
    const std::size_t dec_in =
        (cfg_.mode == AweMode::kSelfSupervised) ? cfg_.input_dim : h;
    for (std::size_t l = 0; l < cfg_.encoder_layers; ++l) {
      const std::size_t in_dim = (l == 0) ? dec_in : h;
      dec_.push_back(
          nn::add_lstm_params(store_, "dec." + std::to_string(l), in_dim, h));
    }
    const std::size_t out_dim = (cfg_.mode == AweMode::kSelfSupervised)
                                    ? cfg_.input_dim
                                    : cfg_.vocab.size();
    head_w_ = store_.add("head.w", out_dim, h);
    head_b_ = store_.add("head.b", out_dim, 1);
    if (cfg_.mode == AweMode::kSupervised) {
      sym_embed_ = store_.add("sym_embed", cfg_.vocab.size(), h);
      for (std::size_t i = 0; i < cfg_.vocab.size(); ++i)
        symbol_ids_[cfg_.vocab[i]] = i;
      eos_id_ = symbol_ids_.at(kEosSymbol);
      start_id_ = symbol_ids_.at(kStartSymbol);
    }
  }

  static AweModel randomized(const AweConfig& cfg, Rng& rng) {
    AweModel m(cfg);
    m.store_.init_uniform(1.0 / std::sqrt(static_cast<double>(cfg.hidden)), rng);
    return m;
  }

  const AweConfig& config() const { return cfg_; }
  nn::ParamStore& params() { return store_; }
  const nn::ParamStore& params() const { return store_; }

  std::size_t symbol_id(const std::string& symbol) const {
    auto it = symbol_ids_.find(symbol);
    if (it == symbol_ids_.end())
      throw VocabularyError("symbol '" + symbol + "' not in vocabulary");
    return it->second;
  }

  std::vector<std::size_t> target_ids(
      const std::vector<std::string>& symbols) const {
    if (symbols.empty() || symbols.back() != kEosSymbol)
      throw ArgumentError("target must end with EOS");
    std::vector<std::size_t> ids(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i)
      ids[i] = symbol_id(symbols[i]);
    return ids;
  }

  // Encoder-only forward; the decoder is training machinery.
  Embedding embed(const FeatureMatrix& x) const {
    check_input(x, true);
    nn::Tape tape(const_cast<nn::ParamStore*>(&store_));
    MatD xd = to_double(x.data);
    std::vector<nn::Expr> inputs(xd.rows());
    for (std::size_t t = 0; t < xd.rows(); ++t)
      inputs[t] = tape.constant(xd.row(t), xd.cols());
    nn::BilstmOutput enc = nn::build_bilstm(tape, enc_, inputs, cfg_.hidden);
    Embedding e;
    e.vector = tape.value_vec(enc.embedding);
    return e;
  }

  // Builds the full training graph on the caller's tape and returns the
  // scalar loss expression. Gradient-producing path for both modes.
  nn::Expr build_loss(nn::Tape& tape, const MatD& x_clean,
                      const std::vector<std::size_t>* target, bool training,
                      Rng& rng) const {
    MatD x_in = nn::input_dropout(x_clean, cfg_.dropout_p, training, rng);
    std::vector<nn::Expr> inputs(x_in.rows());
    for (std::size_t t = 0; t < x_in.rows(); ++t)
      inputs[t] = tape.constant(x_in.row(t), x_in.cols());
    nn::BilstmOutput enc = nn::build_bilstm(tape, enc_, inputs, cfg_.hidden);

    const std::size_t layers = dec_.size();
    std::vector<nn::Expr> h(layers), c(layers);
    for (std::size_t l = 0; l < layers; ++l) {
      h[l] = tape.linear(bridge_h_[l].first, bridge_h_[l].second, enc.embedding);
      c[l] = tape.linear(bridge_c_[l].first, bridge_c_[l].second, enc.embedding);
    }

    std::vector<nn::Expr> step_losses;
    if (cfg_.mode == AweMode::kSelfSupervised) {
      // First decoder input is a zero frame; afterwards the model's own
      // previous prediction (no teacher forcing). Targets are the clean
      // pre-dropout frames.
      nn::Expr dec_in = tape.zeros(cfg_.input_dim);
      for (std::size_t t = 0; t < x_clean.rows(); ++t) {
        nn::Expr cur = dec_in;
        for (std::size_t l = 0; l < layers; ++l) {
          nn::Expr cell = tape.lstm_cell(dec_[l], cur, h[l], c[l]);
          h[l] = tape.lstm_h(cell);
          c[l] = tape.lstm_c(cell);
          cur = h[l];
        }
        nn::Expr pred = tape.linear(head_w_, head_b_, cur);
        step_losses.push_back(tape.mse(pred, x_clean.row(t), x_clean.cols()));
        dec_in = pred;
      }
    } else {
      if (target == nullptr)
        throw ArgumentError("supervised loss needs a target sequence");
      // Greedy feedback: each step consumes the embedding of the model's
      // previous argmax prediction, starting from START.
      nn::Expr dec_in = tape.embed_row(sym_embed_, start_id_);
      for (std::size_t t = 0; t < target->size(); ++t) {
        nn::Expr cur = dec_in;
        for (std::size_t l = 0; l < layers; ++l) {
          nn::Expr cell = tape.lstm_cell(dec_[l], cur, h[l], c[l]);
          h[l] = tape.lstm_h(cell);
          c[l] = tape.lstm_c(cell);
          cur = h[l];
        }
        nn::Expr logits = tape.linear(head_w_, head_b_, cur);
        step_losses.push_back(tape.nll(logits, (*target)[t]));
        dec_in = tape.embed_row(sym_embed_, tape.argmax(logits));
      }
    }
    return tape.mean(step_losses);
  }

  /// Mean squared reconstruction error; forward only.
  double reconstruction_loss(const FeatureMatrix& x, Rng& rng,
                             bool training = true) const {
    if (cfg_.mode != AweMode::kSelfSupervised)
      throw StateError("reconstruction_loss requires self-supervised mode");
    check_input(x, false);
    nn::Tape tape(const_cast<nn::ParamStore*>(&store_));
    nn::Expr loss = build_loss(tape, to_double(x.data), nullptr, training, rng);
    return *tape.value(loss);
  }

  /// Mean per-step negative log-likelihood of the symbol sequence.
  double symbol_loss(const FeatureMatrix& x,
                     const std::vector<std::string>& target, Rng& rng,
                     bool training = true) const {
    if (cfg_.mode != AweMode::kSupervised)
      throw StateError("symbol_loss requires supervised mode");
    check_input(x, false);
    std::vector<std::size_t> ids = target_ids(target);
    nn::Tape tape(const_cast<nn::ParamStore*>(&store_));
    nn::Expr loss = build_loss(tape, to_double(x.data), &ids, training, rng);
    return *tape.value(loss);
  }

  void save_checkpoint(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    out.write("AWEC", 4);
    write_u32(out, kCheckpointVersion);
    const std::string json = config_json().dump();
    write_u32(out, static_cast<std::uint32_t>(json.size()));
    out.write(json.data(), static_cast<std::streamsize>(json.size()));
    write_u32(out, static_cast<std::uint32_t>(store_.count()));
    for (std::size_t i = 0; i < store_.count(); ++i) {
      const std::string& name = store_.name(static_cast<int>(i));
      const MatD& v = store_.value(static_cast<int>(i));
      write_u32(out, static_cast<std::uint32_t>(name.size()));
      out.write(name.data(), static_cast<std::streamsize>(name.size()));
      write_u32(out, static_cast<std::uint32_t>(v.rows()));
      write_u32(out, static_cast<std::uint32_t>(v.cols()));
      for (std::size_t k = 0; k < v.size(); ++k) {
        const float f = static_cast<float>(v.data()[k]);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        write_u32(out, bits);
      }
    }
    if (!out) throw IoError("failed writing checkpoint: " + path);
  }

  static AweModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
      if (pos + n > bytes.size())
        throw CorruptionError("truncated checkpoint: " + path);
    };
    need(8);
    if (std::memcmp(bytes.data(), "AWEC", 4) != 0)
      throw CorruptionError("bad checkpoint magic: " + path);
    pos = 4;
    const std::uint32_t version = read_u32(bytes, pos);
    if (version != kCheckpointVersion)
      throw CorruptionError("unsupported checkpoint version " +
                            std::to_string(version) + ": " + path);
    need(4);
    const std::uint32_t json_len = read_u32(bytes, pos);
    need(json_len);
    const std::string json(reinterpret_cast<const char*>(bytes.data() + pos),
                           json_len);
    pos += json_len;

    AweConfig cfg = config_from_json(json, path);
    AweModel model(cfg);

    need(4);
    const std::uint32_t n_params = read_u32(bytes, pos);
    if (n_params != model.store_.count())
      throw CorruptionError("checkpoint parameter count mismatch: " + path);
    for (std::uint32_t i = 0; i < n_params; ++i) {
      need(4);
      const std::uint32_t name_len = read_u32(bytes, pos);
      need(name_len);
      const std::string name(reinterpret_cast<const char*>(bytes.data() + pos),
                             name_len);
      pos += name_len;
      need(8);
      const std::uint32_t rows = read_u32(bytes, pos);
      const std::uint32_t cols = read_u32(bytes, pos);
      const int pid = model.store_.find(name);
      if (pid < 0)
        throw CorruptionError("unknown parameter '" + name +
                              "' in checkpoint: " + path);
      MatD& v = model.store_.value(pid);
      if (v.rows() != rows || v.cols() != cols)
        throw CorruptionError("parameter shape mismatch for '" + name +
                              "' in checkpoint: " + path);
      need(4ull * rows * cols);
      for (std::size_t k = 0; k < v.size(); ++k) {
        const std::uint32_t bits = read_u32(bytes, pos);
        float f;
        std::memcpy(&f, &bits, 4);
        v.data()[k] = static_cast<double>(f);
      }
    }
    if (pos != bytes.size())
      throw CorruptionError("trailing bytes in checkpoint: " + path);
    return model;
  }

 private:
  static std::string layer_name(const char* stack, std::size_t l,
                                const char* dir) {
    return std::string(stack) + "." + std::to_string(l) + "." + dir;
  }

  void check_input(const FeatureMatrix& x, bool enforce_max) const {
    if (x.dim() != cfg_.input_dim)
      throw ArgumentError("input dimension " + std::to_string(x.dim()) +
                          " does not match model input_dim " +
                          std::to_string(cfg_.input_dim));
    if (x.frames() < 1) throw ArgumentError("empty feature sequence");
    if (enforce_max && x.frames() > cfg_.max_frames)
      throw ArgumentError("sequence of " + std::to_string(x.frames()) +
                          " frames exceeds max_frames " +
                          std::to_string(cfg_.max_frames));
  }

  nlohmann::json config_json() const {
    nlohmann::json j;
    j["input_dim"] = cfg_.input_dim;
    j["hidden"] = cfg_.hidden;
    j["encoder_layers"] = cfg_.encoder_layers;
    j["mode"] = to_string(cfg_.mode);
    j["vocab"] = cfg_.vocab;
    j["dropout_p"] = cfg_.dropout_p;
    j["max_frames"] = cfg_.max_frames;
    return j;
  }

  static AweConfig config_from_json(const std::string& text,
                                    const std::string& path) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception&) {
      throw CorruptionError("unparseable checkpoint config: " + path);
    }
    AweConfig cfg;
    try {
      cfg.input_dim = j.at("input_dim").get<std::size_t>();
      cfg.hidden = j.at("hidden").get<std::size_t>();
      cfg.encoder_layers = j.at("encoder_layers").get<std::size_t>();
      cfg.mode = awe_mode_from_string(j.at("mode").get<std::string>());
      cfg.vocab = j.at("vocab").get<std::vector<std::string>>();
      cfg.dropout_p = j.at("dropout_p").get<double>();
      cfg.max_frames = j.at("max_frames").get<std::size_t>();
    } catch (const nlohmann::json::exception&) {
      throw CorruptionError("incomplete checkpoint config: " + path);
    }
    return cfg;
  }

  static void write_u32(std::ostream& out, std::uint32_t v) {
    char b[4] = {char(v & 0xFF), char((v >> 8) & 0xFF), char((v >> 16) & 0xFF),
                 char((v >> 24) & 0xFF)};
    out.write(b, 4);
  }

  static std::uint32_t read_u32(const std::vector<unsigned char>& bytes,
                                std::size_t& pos) {
    const std::uint32_t v = std::uint32_t(bytes[pos]) |
                            (std::uint32_t(bytes[pos + 1]) << 8) |
                            (std::uint32_t(bytes[pos + 2]) << 16) |
                            (std::uint32_t(bytes[pos + 3]) << 24);
    pos += 4;
    return v;
  }

  AweConfig cfg_;
  nn::ParamStore store_;
  std::vector<std::array<nn::LstmIds, 2>> enc_;
  std::vector<nn::LstmIds> dec_;
  std::vector<std::pair<int, int>> bridge_h_, bridge_c_;
  int head_w_ = -1, head_b_ = -1;
  int sym_embed_ = -1;
  std::map<std::string, std::size_t> symbol_ids_;
  std::size_t eos_id_ = 0, start_id_ = 0;
};

}  // namespace awe

#endif  // AWE_MODEL_HPP_
