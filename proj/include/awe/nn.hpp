// awe/nn.hpp

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

#ifndef AWE_NN_HPP_
#define AWE_NN_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "awe/errors.hpp"
#include "awe/matrix.hpp"
#include "awe/rng.hpp"

namespace awe::nn {

// Named double-precision parameters with parallel gradient buffers. The
// tape below accumulates into the gradients; optimizers consume them.
class ParamStore {
 public:
  int add(const std::string& name, std::size_t rows, std::size_t cols) {
    names_.push_back(name);
    values_.emplace_back(rows, cols);
    grads_.emplace_back(rows, cols);
    return static_cast<int>(values_.size()) - 1;
  }

  std::size_t count() const { return values_.size(); }
  const std::string& name(int i) const { return names_[i]; }
  MatD& value(int i) { return values_[i]; }
  const MatD& value(int i) const { return values_[i]; }
  MatD& grad(int i) { return grads_[i]; }
  const MatD& grad(int i) const { return grads_[i]; }

  int find(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    return -1;
  }

  void zero_grads() {
    for (MatD& g : grads_) g.fill(0.0);
  }

  std::size_t total_values() const {
    std::size_t n = 0;
    for (const MatD& v : values_) n += v.size();
    return n;
  }

  double grad_norm() const {
    double acc = 0.0;
    for (const MatD& g : grads_)
      for (std::size_t i = 0; i < g.size(); ++i) acc += g.data()[i] * g.data()[i];
    return std::sqrt(acc);
  }

  void scale_grads(double s) {
    for (MatD& g : grads_)
      for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] *= s;
  }

  bool grads_finite() const {
    for (const MatD& g : grads_)
      if (!g.all_finite()) return false;
    return true;
  }

  // Uniform [-bound, bound] for every weight and bias, in creation order.
  void init_uniform(double bound, Rng& rng) {
    for (MatD& v : values_)
      for (std::size_t i = 0; i < v.size(); ++i)
        v.data()[i] = rng.uniform(-bound, bound);
  }

 private:
  std::vector<std::string> names_;
  std::vector<MatD> values_;
  std::vector<MatD> grads_;
};

/// Parameter ids of one LSTM layer: W_ih (4H x I), W_hh (4H x H), and the
/// two bias vectors. Gate order is fixed as (input, forget, cell, output).
struct LstmIds {
  int w_ih = -1, w_hh = -1, b_ih = -1, b_hh = -1;
};

inline LstmIds add_lstm_params(ParamStore& store, const std::string& prefix,
                               std::size_t input_dim, std::size_t hidden) {
  LstmIds ids;
  ids.w_ih = store.add(prefix + ".w_ih", 4 * hidden, input_dim);
  ids.w_hh = store.add(prefix + ".w_hh", 4 * hidden, hidden);
  ids.b_ih = store.add(prefix + ".b_ih", 4 * hidden, 1);
  ids.b_hh = store.add(prefix + ".b_hh", 4 * hidden, 1);
  return ids;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Shared value-level cell update; the tape node and the public
// lstm_cell_step both route through here. acts receives the activated
// gates plus tanh(c') (5H doubles), which backward reuses.
inline void lstm_cell_forward(const MatD& w_ih, const MatD& w_hh,
                              const MatD& b_ih, const MatD& b_hh,
                              const double* x, const double* h,
                              const double* c, double* acts, double* h_out,
                              double* c_out) {
  const std::size_t hidden = w_hh.cols();
  const std::size_t input_dim = w_ih.cols();
  const std::size_t gates = 4 * hidden;
  // Pre-activations into acts[0..4H), overwritten in place below.
  for (std::size_t k = 0; k < gates; ++k) {
    double acc = b_ih(k, 0) + b_hh(k, 0);
    const double* wi = w_ih.row(k);
    for (std::size_t i = 0; i < input_dim; ++i) acc += wi[i] * x[i];
    const double* wh = w_hh.row(k);
    for (std::size_t j = 0; j < hidden; ++j) acc += wh[j] * h[j];
    acts[k] = acc;
  }
  for (std::size_t j = 0; j < hidden; ++j) {
    const double gi = sigmoid(acts[j]);
    const double gf = sigmoid(acts[hidden + j]);
    const double gg = std::tanh(acts[2 * hidden + j]);
    const double go = sigmoid(acts[3 * hidden + j]);
    const double c_new = gf * c[j] + gi * gg;
    const double tc = std::tanh(c_new);
    acts[j] = gi;
    acts[hidden + j] = gf;
    acts[2 * hidden + j] = gg;
    acts[3 * hidden + j] = go;
    acts[4 * hidden + j] = tc;
    h_out[j] = go * tc;
    c_out[j] = c_new;
  }
}

/// Standard gated update on plain vectors; returns (h', c').
inline std::pair<std::vector<double>, std::vector<double>> lstm_cell_step(
    const MatD& w_ih, const MatD& w_hh, const MatD& b_ih, const MatD& b_hh,
    const std::vector<double>& x, const std::vector<double>& h,
    const std::vector<double>& c) {
  const std::size_t hidden = w_hh.cols();
  if (w_ih.rows() != 4 * hidden || w_hh.rows() != 4 * hidden ||
      b_ih.rows() != 4 * hidden || b_hh.rows() != 4 * hidden)
    throw ArgumentError("lstm_cell_step: inconsistent gate shapes");
  if (x.size() != w_ih.cols() || h.size() != hidden || c.size() != hidden)
    throw ArgumentError("lstm_cell_step: input/state shape mismatch");
  std::vector<double> acts(5 * hidden), h_out(hidden), c_out(hidden);
  lstm_cell_forward(w_ih, w_hh, b_ih, b_hh, x.data(), h.data(), c.data(),
                    acts.data(), h_out.data(), c_out.data());
  return {std::move(h_out), std::move(c_out)};
}

// ---------------------------------------------------------------------------
// Reverse-mode tape. Every node value is a vector; matrices appear only as
// parameters referenced by id. Buffers live in arenas that reset() recycles,
// so per-segment graphs allocate nothing after warmup.
// ---------------------------------------------------------------------------

using Expr = int;

class Tape {
 public:
  explicit Tape(ParamStore* params) : params_(params) {}

  void reset() {
    nodes_.clear();
    vals_.clear();
    aux_.clear();
    pool_.clear();
  }

  Expr constant(const double* data, std::size_t len) {
    Expr e = new_node(Op::kConst, len);
    std::copy(data, data + len, val_ptr(e));
    return e;
  }

  Expr constant(const std::vector<double>& v) {
    return constant(v.data(), v.size());
  }

  Expr zeros(std::size_t len) { return new_node(Op::kConst, len); }

  // W x + b
  Expr linear(int w, int b, Expr x) {
    const MatD& wm = params_->value(w);
    const MatD& bm = params_->value(b);
    if (wm.cols() != len(x) || bm.rows() != wm.rows())
      throw ArgumentError("linear: shape mismatch");
    Expr e = new_node(Op::kLinear, wm.rows());
    Node& n = nodes_[e];
    n.in0 = x;
    n.p0 = w;
    n.p1 = b;
    double* y = val_ptr(e);
    const double* xv = val_ptr(x);
    for (std::size_t i = 0; i < wm.rows(); ++i) {
      double acc = bm(i, 0);
      const double* wr = wm.row(i);
      for (std::size_t j = 0; j < wm.cols(); ++j) acc += wr[j] * xv[j];
      y[i] = acc;
    }
    return e;
  }

  Expr lstm_cell(const LstmIds& ids, Expr x, Expr h, Expr c) {
    const MatD& w_hh = params_->value(ids.w_hh);
    const std::size_t hidden = w_hh.cols();
    if (params_->value(ids.w_ih).cols() != len(x) || len(h) != hidden ||
        len(c) != hidden)
      throw ArgumentError("lstm_cell: shape mismatch");
    Expr e = new_node(Op::kLstm, 2 * hidden, 5 * hidden);
    Node& n = nodes_[e];
    n.in0 = x;
    n.in1 = h;
    n.in2 = c;
    n.p0 = ids.w_ih;
    n.p1 = ids.w_hh;
    n.p2 = ids.b_ih;
    n.p3 = ids.b_hh;
    lstm_cell_forward(params_->value(ids.w_ih), w_hh,
                      params_->value(ids.b_ih), params_->value(ids.b_hh),
                      val_ptr(x), val_ptr(h), val_ptr(c), aux_ptr(e),
                      val_ptr(e), val_ptr(e) + hidden);
    return e;
  }

  Expr lstm_h(Expr cell) { return slice(cell, 0, len(cell) / 2); }
  Expr lstm_c(Expr cell) { return slice(cell, len(cell) / 2, len(cell) / 2); }

  Expr embed_row(int table, std::size_t row) {
    const MatD& t = params_->value(table);
    if (row >= t.rows()) throw ArgumentError("embed_row: row out of range");
    Expr e = new_node(Op::kEmbedRow, t.cols());
    Node& n = nodes_[e];
    n.p0 = table;
    n.idx = row;
    std::copy(t.row(row), t.row(row) + t.cols(), val_ptr(e));
    return e;
  }

  Expr concat(Expr a, Expr b) {
    Expr e = new_node(Op::kConcat, len(a) + len(b));
    Node& n = nodes_[e];
    n.in0 = a;
    n.in1 = b;
    std::copy(val_ptr(a), val_ptr(a) + len(a), val_ptr(e));
    std::copy(val_ptr(b), val_ptr(b) + len(b), val_ptr(e) + len(a));
    return e;
  }

  Expr slice(Expr a, std::size_t offset, std::size_t n) {
    if (offset + n > len(a)) throw ArgumentError("slice: out of range");
    Expr e = new_node(Op::kSlice, n);
    Node& nd = nodes_[e];
    nd.in0 = a;
    nd.idx = offset;
    std::copy(val_ptr(a) + offset, val_ptr(a) + offset + n, val_ptr(e));
    return e;
  }

  // Mean squared error against a constant target, over all entries.
  Expr mse(Expr pred, const double* target, std::size_t n) {
    if (n != len(pred)) throw ArgumentError("mse: shape mismatch");
    Expr e = new_node(Op::kMse, 1, n);
    Node& nd = nodes_[e];
    nd.in0 = pred;
    std::copy(target, target + n, aux_ptr(e));
    const double* p = val_ptr(pred);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = p[i] - target[i];
      acc += d * d;
    }
    *val_ptr(e) = acc / static_cast<double>(n);
    return e;
  }

  // -log softmax(logits)[target], with the softmax kept for backward.
  Expr nll(Expr logits, std::size_t target) {
    const std::size_t v = len(logits);
    if (target >= v) throw ArgumentError("nll: target out of range");
    Expr e = new_node(Op::kNll, 1, v);
    Node& nd = nodes_[e];
    nd.in0 = logits;
    nd.idx = target;
    const double* l = val_ptr(logits);
    double mx = l[0];
    for (std::size_t i = 1; i < v; ++i) mx = std::max(mx, l[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < v; ++i) sum += std::exp(l[i] - mx);
    const double lse = mx + std::log(sum);
    double* probs = aux_ptr(e);
    for (std::size_t i = 0; i < v; ++i) probs[i] = std::exp(l[i] - lse);
    *val_ptr(e) = lse - l[target];
    return e;
  }

  Expr mean(const std::vector<Expr>& scalars) {
    if (scalars.empty()) throw ArgumentError("mean: no inputs");
    Expr e = new_node(Op::kMean, 1);
    Node& nd = nodes_[e];
    nd.idx = pool_.size();
    nd.in0 = static_cast<int>(scalars.size());
    double acc = 0.0;
    for (Expr s : scalars) {
      if (len(s) != 1) throw ArgumentError("mean: non-scalar input");
      pool_.push_back(s);
      acc += *val_ptr(s);
    }
    *val_ptr(e) = acc / static_cast<double>(scalars.size());
    return e;
  }

  const double* value(Expr e) const { return vals_.data() + nodes_[e].val_ofs; }
  std::size_t len(Expr e) const { return nodes_[e].val_len; }

  std::vector<double> value_vec(Expr e) const {
    return std::vector<double>(value(e), value(e) + len(e));
  }

  std::size_t argmax(Expr e) const {
    const double* v = value(e);
    std::size_t best = 0;
    for (std::size_t i = 1; i < len(e); ++i)
      if (v[i] > v[best]) best = i;
    return best;
  }

  // Reverse sweep from a scalar loss; gradients accumulate into the
  // ParamStore (callers zero them between batches).
  void backward(Expr loss) {
    if (len(loss) != 1) throw ArgumentError("backward: loss must be scalar");
    if (!std::isfinite(*value(loss)))
      throw NumericError("backward: non-finite loss");
    grads_.assign(vals_.size(), 0.0);
    grads_[nodes_[loss].val_ofs] = 1.0;

    for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
      const Node& n = nodes_[id];
      const double* g = grads_.data() + n.val_ofs;
      switch (n.op) {
        case Op::kConst:
          break;
        case Op::kLinear: {
          MatD& dw = params_->grad(n.p0);
          MatD& db = params_->grad(n.p1);
          const MatD& w = params_->value(n.p0);
          const double* xv = vals_.data() + nodes_[n.in0].val_ofs;
          double* dx = grads_.data() + nodes_[n.in0].val_ofs;
          for (std::size_t i = 0; i < w.rows(); ++i) {
            const double gi = g[i];
            if (gi == 0.0) continue;
            db(i, 0) += gi;
            double* dwr = dw.row(i);
            const double* wr = w.row(i);
            for (std::size_t j = 0; j < w.cols(); ++j) {
              dwr[j] += gi * xv[j];
              dx[j] += wr[j] * gi;
            }
          }
          break;
        }
        case Op::kLstm:
          backward_lstm(n, g);
          break;
        case Op::kEmbedRow: {
          MatD& dt = params_->grad(n.p0);
          double* row = dt.row(n.idx);
          for (std::size_t i = 0; i < n.val_len; ++i) row[i] += g[i];
          break;
        }
        case Op::kConcat: {
          const Node& a = nodes_[n.in0];
          const Node& b = nodes_[n.in1];
          double* da = grads_.data() + a.val_ofs;
          double* dbv = grads_.data() + b.val_ofs;
          for (std::size_t i = 0; i < a.val_len; ++i) da[i] += g[i];
          for (std::size_t i = 0; i < b.val_len; ++i)
            dbv[i] += g[a.val_len + i];
          break;
        }
        case Op::kSlice: {
          double* dp = grads_.data() + nodes_[n.in0].val_ofs + n.idx;
          for (std::size_t i = 0; i < n.val_len; ++i) dp[i] += g[i];
          break;
        }
        case Op::kMse: {
          const double g0 = g[0];
          const std::size_t m = n.aux_len;
          const double* p = vals_.data() + nodes_[n.in0].val_ofs;
          const double* tgt = aux_.data() + n.aux_ofs;
          double* dp = grads_.data() + nodes_[n.in0].val_ofs;
          const double scale = 2.0 * g0 / static_cast<double>(m);
          for (std::size_t i = 0; i < m; ++i) dp[i] += scale * (p[i] - tgt[i]);
          break;
        }
        case Op::kNll: {
          const double g0 = g[0];
          const std::size_t v = n.aux_len;
          const double* probs = aux_.data() + n.aux_ofs;
          double* dl = grads_.data() + nodes_[n.in0].val_ofs;
          for (std::size_t i = 0; i < v; ++i) dl[i] += g0 * probs[i];
          dl[n.idx] -= g0;
          break;
        }
        case Op::kMean: {
          const double share = g[0] / static_cast<double>(n.in0);
          for (int k = 0; k < n.in0; ++k) {
            Expr child = pool_[n.idx + k];
            grads_[nodes_[child].val_ofs] += share;
          }
          break;
        }
      }
    }
  }

 private:
  enum class Op : std::uint8_t {
    kConst,
    kLinear,
    kLstm,
    kEmbedRow,
    kConcat,
    kSlice,
    kMse,
    kNll,
    kMean
  };

  struct Node {
    Op op = Op::kConst;
    int in0 = -1, in1 = -1, in2 = -1;
    int p0 = -1, p1 = -1, p2 = -1, p3 = -1;
    std::size_t val_ofs = 0, val_len = 0;
    std::size_t aux_ofs = 0, aux_len = 0;
    std::size_t idx = 0;
  };

  Expr new_node(Op op, std::size_t val_len, std::size_t aux_len = 0) {
    Node n;
    n.op = op;
    n.val_ofs = vals_.size();
    n.val_len = val_len;
    n.aux_ofs = aux_.size();
    n.aux_len = aux_len;
    vals_.resize(vals_.size() + val_len, 0.0);
    aux_.resize(aux_.size() + aux_len, 0.0);
    nodes_.push_back(n);
    return static_cast<Expr>(nodes_.size()) - 1;
  }

  double* val_ptr(Expr e) { return vals_.data() + nodes_[e].val_ofs; }
  double* aux_ptr(Expr e) { return aux_.data() + nodes_[e].aux_ofs; }

  void backward_lstm(const Node& n, const double* g) {
    const MatD& w_ih = params_->value(n.p0);
    const MatD& w_hh = params_->value(n.p1);
    MatD& dw_ih = params_->grad(n.p0);
    MatD& dw_hh = params_->grad(n.p1);
    MatD& db_ih = params_->grad(n.p2);
    MatD& db_hh = params_->grad(n.p3);
    const std::size_t hidden = w_hh.cols();
    const std::size_t input_dim = w_ih.cols();
    const double* acts = aux_.data() + n.aux_ofs;
    const double* xv = vals_.data() + nodes_[n.in0].val_ofs;
    const double* hv = vals_.data() + nodes_[n.in1].val_ofs;
    const double* cv = vals_.data() + nodes_[n.in2].val_ofs;
    double* dx = grads_.data() + nodes_[n.in0].val_ofs;
    double* dh = grads_.data() + nodes_[n.in1].val_ofs;
    double* dc = grads_.data() + nodes_[n.in2].val_ofs;
    const double* gh = g;
    const double* gc_ext = g + hidden;

    scratch_.resize(4 * hidden);
    double* da = scratch_.data();
    for (std::size_t j = 0; j < hidden; ++j) {
      const double gi = acts[j];
      const double gf = acts[hidden + j];
      const double gg = acts[2 * hidden + j];
      const double go = acts[3 * hidden + j];
      const double tc = acts[4 * hidden + j];
      const double d_o = gh[j] * tc;
      const double dc_total = gc_ext[j] + gh[j] * go * (1.0 - tc * tc);
      dc[j] += dc_total * gf;
      const double di = dc_total * gg;
      const double df = dc_total * cv[j];
      const double dg = dc_total * gi;
      da[j] = di * gi * (1.0 - gi);
      da[hidden + j] = df * gf * (1.0 - gf);
      da[2 * hidden + j] = dg * (1.0 - gg * gg);
      da[3 * hidden + j] = d_o * go * (1.0 - go);
    }
    for (std::size_t k = 0; k < 4 * hidden; ++k) {
      const double dak = da[k];
      if (dak == 0.0) continue;
      db_ih(k, 0) += dak;
      db_hh(k, 0) += dak;
      double* dwi = dw_ih.row(k);
      const double* wi = w_ih.row(k);
      for (std::size_t i = 0; i < input_dim; ++i) {
        dwi[i] += dak * xv[i];
        dx[i] += wi[i] * dak;
      }
      double* dwh = dw_hh.row(k);
      const double* wh = w_hh.row(k);
      for (std::size_t j = 0; j < hidden; ++j) {
        dwh[j] += dak * hv[j];
        dh[j] += wh[j] * dak;
      }
    }
  }

  ParamStore* params_;
  std::vector<Node> nodes_;
  std::vector<double> vals_;
  std::vector<double> grads_;
  std::vector<double> aux_;
  std::vector<int> pool_;
  std::vector<double> scratch_;
};

// ---------------------------------------------------------------------------
// Graph builders shared by the model and by value-level helpers.
// ---------------------------------------------------------------------------

struct BilstmOutput {
  std::vector<std::vector<Expr>> layer_outputs;  // per layer, per step (2H)
  Expr embedding = -1;                           // concat of final states (2H)
};

// Bidirectional stack over a sequence of input exprs; initial states are
// zero. The embedding concatenates the last layer's forward state at t=T
// with its backward state at t=1.
inline BilstmOutput build_bilstm(Tape& tape,
                                 const std::vector<std::array<LstmIds, 2>>& layers,
                                 const std::vector<Expr>& inputs,
                                 std::size_t hidden) {
  if (inputs.empty()) throw ArgumentError("bilstm: empty sequence");
  const std::size_t steps = inputs.size();
  BilstmOutput out;
  std::vector<Expr> seq = inputs;
  Expr final_fwd = -1, final_bwd = -1;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::vector<Expr> h_fwd(steps), h_bwd(steps);
    Expr h = tape.zeros(hidden);
    Expr c = tape.zeros(hidden);
    for (std::size_t t = 0; t < steps; ++t) {
      Expr cell = tape.lstm_cell(layers[l][0], seq[t], h, c);
      h = tape.lstm_h(cell);
      c = tape.lstm_c(cell);
      h_fwd[t] = h;
    }
    final_fwd = h;
    h = tape.zeros(hidden);
    c = tape.zeros(hidden);
    for (std::size_t t = steps; t-- > 0;) {
      Expr cell = tape.lstm_cell(layers[l][1], seq[t], h, c);
      h = tape.lstm_h(cell);
      c = tape.lstm_c(cell);
      h_bwd[t] = h;
    }
    final_bwd = h;
    std::vector<Expr> merged(steps);
    for (std::size_t t = 0; t < steps; ++t)
      merged[t] = tape.concat(h_fwd[t], h_bwd[t]);
    out.layer_outputs.push_back(merged);
    seq = std::move(merged);
  }
  out.embedding = tape.concat(final_fwd, final_bwd);
  return out;
}

/// Plain-matrix parameter set of one LSTM layer, for the value-level API.
struct LstmLayerParams {
  MatD w_ih, w_hh, b_ih, b_hh;
};

// Value-level bidirectional encoding used by tests and diagnostics; routes
// through the same graph builder as training.
inline std::pair<std::vector<MatD>, std::vector<double>> bilstm_encode(
    const std::vector<std::array<LstmLayerParams, 2>>& layers,
    const MatD& x) {
  if (x.rows() < 1) throw ArgumentError("bilstm_encode: empty sequence");
  if (layers.empty()) throw ArgumentError("bilstm_encode: no layers");
  const std::size_t hidden = layers[0][0].w_hh.cols();
  ParamStore store;
  std::vector<std::array<LstmIds, 2>> ids(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (int d = 0; d < 2; ++d) {
      const LstmLayerParams& p = layers[l][d];
      LstmIds id;
      id.w_ih = store.add("w_ih", p.w_ih.rows(), p.w_ih.cols());
      id.w_hh = store.add("w_hh", p.w_hh.rows(), p.w_hh.cols());
      id.b_ih = store.add("b_ih", p.b_ih.rows(), 1);
      id.b_hh = store.add("b_hh", p.b_hh.rows(), 1);
      store.value(id.w_ih) = p.w_ih;
      store.value(id.w_hh) = p.w_hh;
      store.value(id.b_ih) = p.b_ih;
      store.value(id.b_hh) = p.b_hh;
      ids[l][d] = id;
    }
  }
  Tape tape(&store);
  std::vector<Expr> inputs(x.rows());
  for (std::size_t t = 0; t < x.rows(); ++t)
    inputs[t] = tape.constant(x.row(t), x.cols());
  BilstmOutput out = build_bilstm(tape, ids, inputs, hidden);
  std::vector<MatD> layer_outputs;
  for (const auto& layer : out.layer_outputs) {
    MatD m(x.rows(), 2 * hidden);
    for (std::size_t t = 0; t < layer.size(); ++t) {
      const double* v = tape.value(layer[t]);
      std::copy(v, v + 2 * hidden, m.row(t));
    }
    layer_outputs.push_back(std::move(m));
  }
  return {std::move(layer_outputs), tape.value_vec(out.embedding)};
}

// ---------------------------------------------------------------------------

/// Encoder parameter count: sum over layers and directions of
/// 4*(H*(I_l + H) + 2H), with I_1 = I and deeper layers fed by the previous
/// layer's (possibly concatenated) output.
inline std::uint64_t count_encoder_params(std::uint64_t input_dim,
                                          std::uint64_t hidden,
                                          std::uint64_t layers,
                                          bool bidirectional) {
  const std::uint64_t dirs = bidirectional ? 2 : 1;
  std::uint64_t total = 0;
  for (std::uint64_t l = 0; l < layers; ++l) {
    const std::uint64_t in_dim = (l == 0) ? input_dim : dirs * hidden;
    total += dirs * 4 * (hidden * (in_dim + hidden) + 2 * hidden);
  }
  return total;
}

// Inverted dropout on a feature sequence: training zeroes entries with
// probability p and scales survivors by 1/(1-p); evaluation is identity.
inline MatD input_dropout(const MatD& x, double p, bool training, Rng& rng) {
  if (p < 0.0 || p >= 1.0)
    throw ArgumentError("dropout probability must be in [0, 1)");
  MatD out = x;
  if (!training || p == 0.0) return out;
  const double scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = rng.bernoulli(p) ? 0.0 : out.data()[i] * scale;
  return out;
}

inline std::vector<double> softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw ArgumentError("softmax: empty input");
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double sum = 0.0;
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace awe::nn

#endif  // AWE_NN_HPP_
