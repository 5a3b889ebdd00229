// awe/eval.hpp

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

#ifndef AWE_EVAL_HPP_
#define AWE_EVAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "awe/errors.hpp"
#include "awe/manifest.hpp"
#include "awe/matrix.hpp"
#include "awe/rng.hpp"
#include "awe/text.hpp"

namespace awe {

/// Minimal insert/delete/substitute edits over Unicode scalar values.
inline std::size_t levenshtein(const std::string& s, const std::string& t) {
  const std::vector<std::uint32_t> a = utf8_codepoints(s);
  const std::vector<std::uint32_t> b = utf8_codepoints(t);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cur[0] = i + 1;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::size_t sub = prev[j] + (a[i] == b[j] ? 0 : 1);
      cur[j + 1] = std::min({cur[j] + 1, prev[j + 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

enum class AbxVariant { kWithinSpeaker, kAcrossSpeaker };

inline const char* to_string(AbxVariant v) {
  return v == AbxVariant::kWithinSpeaker ? "within_speaker" : "across_speaker";
}

inline AbxVariant abx_variant_from_string(const std::string& s) {
  if (s == "within_speaker") return AbxVariant::kWithinSpeaker;
  if (s == "across_speaker") return AbxVariant::kAcrossSpeaker;
  throw ArgumentError("unknown ABX variant '" + s + "'");
}

/// One discrimination item: X must be closer to the side sharing its word.
struct AbxTriple {
  std::string a, b, x;
  enum class Match { kA, kB } x_matches = Match::kA;
  AbxVariant variant = AbxVariant::kWithinSpeaker;
};

struct AbxTaskSet {
  std::vector<AbxTriple> triples;
  std::size_t contrast_pairs = 0;  // word pairs passing the text filters
  std::size_t skipped_pairs = 0;   // of those, pairs yielding no triple
};

namespace detail {

struct Token {
  const WordSegment* seg;
};

// Speaker equality with the no-speaker-label rule: UNK segments count as
// mutually distinct speakers.
inline bool same_speaker(const WordSegment& a, const WordSegment& b) {
  if (a.speaker_id == kUnknownSpeaker || b.speaker_id == kUnknownSpeaker)
    return false;
  return a.speaker_id == b.speaker_id;
}

}  // namespace detail

// Candidate words have at least five characters; contrast pairs share
// character length and sit at edit distance 1 or 2. Each triple's X is a
// different token of the matched word under the variant's speaker rule.
// Segments are sorted internally so the output is invariant to input order;
// pairs above the cap are downsampled with the seeded generator.
inline AbxTaskSet build_abx_tasks(const std::vector<WordSegment>& segments,
                                  AbxVariant variant, Rng& rng,
                                  std::size_t cap_per_pair = 10) {
  std::vector<const WordSegment*> sorted;
  sorted.reserve(segments.size());
  for (const WordSegment& s : segments) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(),
            [](const WordSegment* a, const WordSegment* b) {
              return a->segment_id < b->segment_id;
            });

  std::map<std::string, std::vector<const WordSegment*>> by_word;
  for (const WordSegment* s : sorted) {
    if (utf8_length(s->word) >= 5) by_word[s->word].push_back(s);
  }
  std::vector<std::string> words;
  for (const auto& [w, toks] : by_word) words.push_back(w);

  AbxTaskSet out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      if (utf8_length(words[i]) != utf8_length(words[j])) continue;
      const std::size_t dist = levenshtein(words[i], words[j]);
      if (dist < 1 || dist > 2) continue;
      ++out.contrast_pairs;

      std::vector<AbxTriple> candidates;
      auto add_role = [&](const std::vector<const WordSegment*>& matched,
                          const std::vector<const WordSegment*>& other,
                          AbxTriple::Match which) {
        for (const WordSegment* a : matched) {
          for (const WordSegment* b : other) {
            for (const WordSegment* x : matched) {
              if (x == a) continue;
              const WordSegment& m = *a;
              if (variant == AbxVariant::kWithinSpeaker) {
                if (m.speaker_id == kUnknownSpeaker) continue;
                if (!detail::same_speaker(m, *b) ||
                    !detail::same_speaker(m, *x))
                  continue;
              } else {
                if (detail::same_speaker(*x, m)) continue;
              }
              AbxTriple t;
              if (which == AbxTriple::Match::kA) {
                t.a = a->segment_id;
                t.b = b->segment_id;
              } else {
                t.a = b->segment_id;
                t.b = a->segment_id;
              }
              t.x = x->segment_id;
              t.x_matches = which;
              t.variant = variant;
              candidates.push_back(std::move(t));
            }
          }
        }
      };
      add_role(by_word[words[i]], by_word[words[j]], AbxTriple::Match::kA);
      add_role(by_word[words[j]], by_word[words[i]], AbxTriple::Match::kB);

      if (candidates.empty()) {
        ++out.skipped_pairs;
        continue;
      }
      if (cap_per_pair > 0 && candidates.size() > cap_per_pair) {
        // Partial Fisher-Yates: the first cap_per_pair slots become the
        // sample, in draw order.
        for (std::size_t k = 0; k < cap_per_pair; ++k) {
          const std::size_t pick =
              k + static_cast<std::size_t>(rng.below(candidates.size() - k));
          std::swap(candidates[k], candidates[pick]);
        }
        candidates.resize(cap_per_pair);
      }
      out.triples.insert(out.triples.end(), candidates.begin(),
                         candidates.end());
    }
  }
  return out;
}

struct AbxVariantStats {
  std::size_t n_triples = 0;
  double error_rate = 0.0;  // percent
};

/// Aggregated error rates, micro-averaged over triples.
struct AbxReport {
  std::size_t n_triples = 0;
  double error_rate = 0.0;  // percent
  std::map<AbxVariant, AbxVariantStats> breakdown;
};

// Per triple: 0 if X is strictly closer to the matched side, 1 if strictly
// farther, 0.5 on an exact tie.
inline AbxReport score_abx(
    const std::vector<AbxTriple>& triples,
    const std::function<double(const std::string&, const std::string&)>&
        distance) {
  AbxReport report;
  std::map<AbxVariant, double> err_sum;
  for (const AbxTriple& t : triples) {
    const std::string& matched = (t.x_matches == AbxTriple::Match::kA) ? t.a : t.b;
    const std::string& other = (t.x_matches == AbxTriple::Match::kA) ? t.b : t.a;
    const double d_match = distance(t.x, matched);
    const double d_other = distance(t.x, other);
    double err;
    if (d_match < d_other)
      err = 0.0;
    else if (d_match > d_other)
      err = 1.0;
    else
      err = 0.5;
    err_sum[t.variant] += err;
    report.breakdown[t.variant].n_triples += 1;
  }
  double total_err = 0.0;
  for (auto& [variant, stats] : report.breakdown) {
    total_err += err_sum[variant];
    stats.error_rate = 100.0 * err_sum[variant] /
                       static_cast<double>(stats.n_triples);
    report.n_triples += stats.n_triples;
  }
  report.error_rate =
      report.n_triples == 0
          ? 0.0
          : 100.0 * total_err / static_cast<double>(report.n_triples);
  return report;
}

// ---------------------------------------------------------------------------
// K-means with k-means++ seeding and farthest-point reseeding of emptied
// clusters. Deterministic given the generator.
// ---------------------------------------------------------------------------

struct KmeansResult {
  std::vector<std::size_t> assignments;
  MatD centroids;
  double inertia = 0.0;
  int iterations = 0;
};

namespace detail {

inline double sqdist(const double* a, const double* b, std::size_t d) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace detail

namespace detail {
KmeansResult kmeans_single(const MatD& points, std::size_t k, Rng& rng,
                           int max_iter, double tol);
}

// Single seeded run by default; extra restarts rerun the seeding and keep
// the lowest-inertia result.
inline KmeansResult kmeans(const MatD& points, std::size_t k, Rng& rng,
                           int max_iter = 300, double tol = 1e-6,
                           int restarts = 1) {
  if (restarts < 1) throw ArgumentError("kmeans: restarts must be >= 1");
  KmeansResult best = detail::kmeans_single(points, k, rng, max_iter, tol);
  for (int r = 1; r < restarts; ++r) {
    KmeansResult cand = detail::kmeans_single(points, k, rng, max_iter, tol);
    if (cand.inertia < best.inertia) best = std::move(cand);
  }
  return best;
}

inline KmeansResult detail::kmeans_single(const MatD& points, std::size_t k,
                                          Rng& rng, int max_iter, double tol) {
  const std::size_t n = points.rows();
  const std::size_t d = points.cols();
  if (k < 1) throw ArgumentError("kmeans: k must be >= 1");
  if (k > n)
    throw ArgumentError("kmeans: k=" + std::to_string(k) + " exceeds " +
                        std::to_string(n) + " points");

  KmeansResult res;
  res.centroids = MatD(k, d);
  std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());

  // k-means++: first centroid uniform, the rest D^2-weighted.
  std::size_t first = static_cast<std::size_t>(rng.below(n));
  std::copy(points.row(first), points.row(first) + d, res.centroids.row(0));
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ds = detail::sqdist(points.row(i), res.centroids.row(c - 1), d);
      min_sq[i] = std::min(min_sq[i], ds);
      total += min_sq[i];
    }
    std::size_t chosen = 0;
    if (total <= 0.0) {
      chosen = static_cast<std::size_t>(rng.below(n));
    } else {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += min_sq[i];
        if (acc >= r) {
          chosen = i;
          break;
        }
      }
    }
    std::copy(points.row(chosen), points.row(chosen) + d,
              res.centroids.row(c));
  }

  res.assignments.assign(n, 0);
  std::vector<std::size_t> counts(k);
  MatD next(k, d);
  for (int iter = 1; iter <= max_iter; ++iter) {
    res.iterations = iter;
    // Assignment: nearest centroid, ties to the lowest index.
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double ds = detail::sqdist(points.row(i), res.centroids.row(c), d);
        if (ds < best) {
          best = ds;
          arg = c;
        }
      }
      res.assignments[i] = arg;
    }
    next.fill(0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      counts[res.assignments[i]] += 1;
      double* row = next.row(res.assignments[i]);
      const double* p = points.row(i);
      for (std::size_t j = 0; j < d; ++j) row[j] += p[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Reseed to the point farthest from its current centroid.
        double far_best = -1.0;
        std::size_t far_arg = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const double ds = detail::sqdist(
              points.row(i), res.centroids.row(res.assignments[i]), d);
          if (ds > far_best) {
            far_best = ds;
            far_arg = i;
          }
        }
        std::copy(points.row(far_arg), points.row(far_arg) + d, next.row(c));
        res.assignments[far_arg] = c;
      } else {
        double* row = next.row(c);
        for (std::size_t j = 0; j < d; ++j)
          row[j] /= static_cast<double>(counts[c]);
      }
    }
    double movement = 0.0;
    for (std::size_t c = 0; c < k; ++c)
      movement = std::max(movement, std::sqrt(detail::sqdist(
                                        next.row(c), res.centroids.row(c), d)));
    res.centroids = next;
    if (movement < tol) break;
  }

  // Final assignment against the converged centroids.
  res.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double ds = detail::sqdist(points.row(i), res.centroids.row(c), d);
      if (ds < best) {
        best = ds;
        arg = c;
      }
    }
    res.assignments[i] = arg;
    res.inertia += best;
  }
  return res;
}

struct ClusterReport {
  std::size_t k = 0;
  double accuracy = 0.0;  // percent
  int iterations = 0;
  double inertia = 0.0;
};

// Each cluster is labeled by its modal word (lexicographically smallest on
// ties); accuracy is the percentage of segments matching their cluster
// label.
inline ClusterReport clustering_accuracy(
    const std::vector<std::size_t>& assignments,
    const std::vector<std::string>& word_ids) {
  if (assignments.size() != word_ids.size())
    throw ArgumentError("clustering_accuracy: length mismatch");
  if (assignments.empty())
    throw ArgumentError("clustering_accuracy: empty input");
  std::map<std::size_t, std::map<std::string, std::size_t>> counts;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    counts[assignments[i]][word_ids[i]] += 1;

  std::map<std::size_t, std::string> label;
  for (const auto& [cluster, words] : counts) {
    std::size_t best = 0;
    std::string best_word;
    for (const auto& [word, cnt] : words) {
      if (cnt > best) {  // map order makes ties lexicographically smallest
        best = cnt;
        best_word = word;
      }
    }
    label[cluster] = best_word;
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (word_ids[i] == label[assignments[i]]) ++correct;

  ClusterReport report;
  report.k = counts.size();
  report.accuracy =
      100.0 * static_cast<double>(correct) / static_cast<double>(word_ids.size());
  return report;
}

// ---------------------------------------------------------------------------
// Serialization of tasks and reports.
// ---------------------------------------------------------------------------

inline constexpr const char* kAbxTaskHeader = "a\tb\tx\tx_matches\tvariant";

inline std::string abx_tasks_tsv(const std::vector<AbxTriple>& triples) {
  std::string out = std::string(kAbxTaskHeader) + "\n";
  for (const AbxTriple& t : triples) {
    out += t.a + "\t" + t.b + "\t" + t.x + "\t" +
           (t.x_matches == AbxTriple::Match::kA ? "A" : "B") + "\t" +
           to_string(t.variant) + "\n";
  }
  return out;
}

inline std::vector<AbxTriple> parse_abx_tasks_tsv(const std::string& text) {
  std::vector<AbxTriple> triples;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kAbxTaskHeader)
        throw ParseError("ABX task file line 1: bad header");
      continue;
    }
    std::vector<std::string> f = split_tab(line);
    if (f.size() != 5)
      throw ParseError("ABX task file line " + std::to_string(line_no) +
                       ": expected 5 columns");
    AbxTriple t;
    t.a = f[0];
    t.b = f[1];
    t.x = f[2];
    if (f[3] == "A")
      t.x_matches = AbxTriple::Match::kA;
    else if (f[3] == "B")
      t.x_matches = AbxTriple::Match::kB;
    else
      throw ParseError("ABX task file line " + std::to_string(line_no) +
                       ": x_matches must be A or B");
    t.variant = abx_variant_from_string(f[4]);
    triples.push_back(std::move(t));
  }
  return triples;
}

inline std::string abx_report_tsv(const AbxReport& r) {
  char buf[128];
  std::string out = "variant\tn_triples\terror_rate\n";
  for (const auto& [variant, stats] : r.breakdown) {
    std::snprintf(buf, sizeof(buf), "%s\t%zu\t%.4f\n", to_string(variant),
                  stats.n_triples, stats.error_rate);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "all\t%zu\t%.4f\n", r.n_triples,
                r.error_rate);
  out += buf;
  return out;
}

inline std::string abx_report_table(const AbxReport& r,
                                    const std::string& source) {
  char buf[160];
  std::string out = "ABX error rates (%)\n";
  const AbxVariantStats* within = nullptr;
  const AbxVariantStats* across = nullptr;
  for (const auto& [variant, stats] : r.breakdown) {
    if (variant == AbxVariant::kWithinSpeaker) within = &stats;
    if (variant == AbxVariant::kAcrossSpeaker) across = &stats;
  }
  std::snprintf(buf, sizeof(buf), "%-16s %10s %10s\n", "", "within", "across");
  out += buf;
  auto cell = [](const AbxVariantStats* s) {
    char c[32];
    if (s == nullptr)
      std::snprintf(c, sizeof(c), "%10s", "n/a");
    else
      std::snprintf(c, sizeof(c), "%10.2f", s->error_rate);
    return std::string(c);
  };
  std::snprintf(buf, sizeof(buf), "%-16s %s %s\n", source.c_str(),
                cell(within).c_str(), cell(across).c_str());
  out += buf;
  return out;
}

inline std::string cluster_report_tsv(const ClusterReport& r) {
  char buf[160];
  std::string out = "k\taccuracy\titerations\tinertia\n";
  std::snprintf(buf, sizeof(buf), "%zu\t%.4f\t%d\t%.6g\n", r.k, r.accuracy,
                r.iterations, r.inertia);
  out += buf;
  return out;
}

inline std::string cluster_report_table(const ClusterReport& r,
                                        const std::string& source) {
  char buf[160];
  std::string out = "K-Means Clustering Accuracy (%)\n";
  std::snprintf(buf, sizeof(buf), "%-16s %10s %10s\n", "", "k", "accuracy");
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-16s %10zu %10.2f\n", source.c_str(), r.k,
                r.accuracy);
  out += buf;
  return out;
}

}  // namespace awe

#endif  // AWE_EVAL_HPP_
