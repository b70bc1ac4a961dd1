// Copyright 2026 The Nlidb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nlidb/encoding.h"

#include <algorithm>
#include <cctype>
#include <random>

#include "nlidb/error.h"

namespace nlidb {
namespace {

std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::string> value_tokens(const std::string& value) {
  std::vector<std::string> words = question_words(value);
  if (words.empty()) words.push_back(to_lower(value));
  return words;
}

void push(InputEncoding& enc, EncodedToken::Kind kind, std::string text) {
  enc.tokens.push_back({kind, std::move(text)});
}

[[noreturn]] void shape_error(const std::string& message) {
  throw Error(ErrorCode::kShapeMismatch, message);
}

// Smooths rows [begin, end) of `in` into `out` with weights 1/2, 1/4, 1/4.
void mix_segment(const Eigen::MatrixXd& in, Eigen::MatrixXd& out, std::size_t begin,
                 std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.row(r) = 0.5 * in.row(r);
    if (i > begin) out.row(r) += 0.25 * in.row(r - 1);
    if (i + 1 < end) out.row(r) += 0.25 * in.row(r + 1);
  }
}

Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

}  // namespace

double picklist_score(std::string_view question, std::string_view value) {
  if (value.empty() || question.empty()) return 0.0;
  const std::string q = to_lower(question);
  const std::string v = to_lower(value);
  std::vector<std::size_t> prev(v.size() + 1, 0), cur(v.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= q.size(); ++i) {
    for (std::size_t j = 1; j <= v.size(); ++j) {
      cur[j] = q[i - 1] == v[j - 1] ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(best) / static_cast<double>(v.size());
}

std::vector<PicklistMatch> match_picklists(std::string_view question,
                                           const DatabaseSchema& schema, double theta,
                                           std::size_t cap) {
  std::vector<PicklistMatch> matches;
  for (const Field& f : schema.fields) {
    if (!f.picklist) continue;
    const std::string* best = nullptr;
    double best_score = -1;
    for (const auto& value : *f.picklist) {
      if (value.empty()) continue;
      const double s = picklist_score(question, value);
      if (s > best_score) {
        best_score = s;
        best = &value;
      }
    }
    if (best != nullptr && best_score >= theta) matches.push_back({f.field_id, *best, best_score});
  }
  std::stable_sort(matches.begin(), matches.end(),
                   [](const PicklistMatch& a, const PicklistMatch& b) { return a.score > b.score; });
  if (matches.size() > cap) matches.resize(cap);
  return matches;
}

std::string_view token_kind_name(EncodedToken::Kind kind) {
  switch (kind) {
    case EncodedToken::Kind::kCls: return "CLS";
    case EncodedToken::Kind::kSep: return "SEP";
    case EncodedToken::Kind::kTableMark: return "T_MARK";
    case EncodedToken::Kind::kFieldMark: return "C_MARK";
    case EncodedToken::Kind::kValueMark: return "V_MARK";
    case EncodedToken::Kind::kWord: return "WORD";
  }
  return "WORD";
}

InputEncoding serialize(const std::vector<QuestionToken>& question,
                        const DatabaseSchema& schema,
                        const std::vector<PicklistMatch>& matches) {
  using Kind = EncodedToken::Kind;
  InputEncoding enc;
  enc.question = question;
  for (const auto& m : matches) enc.value_attachments[m.field] = m.value;
  push(enc, Kind::kCls, "[CLS]");
  enc.question_begin = enc.tokens.size();
  for (const auto& q : question) push(enc, Kind::kWord, q.normalized);
  enc.question_end = enc.tokens.size();
  push(enc, Kind::kSep, "[SEP]");
  for (const Table& t : schema.tables) {
    enc.table_marker_positions[t.table_id] = enc.tokens.size();
    push(enc, Kind::kTableMark, "[T]");
    for (const auto& w : t.display_tokens) push(enc, Kind::kWord, w);
    for (FieldId fid : t.field_ids) {
      const Field& f = schema.field(fid);
      enc.field_marker_positions[fid] = enc.tokens.size();
      push(enc, Kind::kFieldMark, "[C]");
      for (const auto& w : f.display_tokens) push(enc, Kind::kWord, w);
      auto it = enc.value_attachments.find(fid);
      if (it != enc.value_attachments.end()) {
        push(enc, Kind::kValueMark, "[V]");
        for (auto& w : value_tokens(it->second)) push(enc, Kind::kWord, std::move(w));
      }
    }
  }
  push(enc, Kind::kSep, "[SEP]");
  return enc;
}

ReferenceEmbedder::ReferenceEmbedder(std::uint64_t seed, int dim) : seed_(seed), dim_(dim) {
  if (dim <= 0) throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be positive");
}

Eigen::VectorXd ReferenceEmbedder::hashed(std::string_view key) const {
  std::uint64_t state = fnv1a(key, seed_);
  Eigen::VectorXd v(dim_);
  std::uint64_t bits = 0;
  for (int i = 0; i < dim_; ++i) {
    if (i % 64 == 0) bits = splitmix64(state);
    v(i) = (bits >> (i % 64)) & 1U ? 1.0 : -1.0;
  }
  return v / std::sqrt(static_cast<double>(dim_));
}

Eigen::VectorXd ReferenceEmbedder::token_vector(EncodedToken::Kind kind,
                                                std::string_view text) const {
  Eigen::VectorXd v = 0.5 * hashed("kind:" + std::string(token_kind_name(kind)));
  if (kind == EncodedToken::Kind::kWord && !text.empty()) {
    const std::string padded = "#" + to_lower(text) + "#";
    Eigen::VectorXd grams = Eigen::VectorXd::Zero(dim_);
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) grams += hashed(padded.substr(i, 3));
    if (padded.size() < 3) grams += hashed(padded);
    v += grams.normalized();
  }
  return v.normalized();
}

Eigen::VectorXd ReferenceEmbedder::text_vector(const std::vector<std::string>& words) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  for (const auto& w : words) v += token_vector(EncodedToken::Kind::kWord, w);
  if (!words.empty()) v /= static_cast<double>(words.size());
  return v;
}

EmbeddingOutput ReferenceEmbedder::embed(const InputEncoding& encoding) const {
  using Kind = EncodedToken::Kind;
  const std::size_t n = encoding.tokens.size();
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(n), dim_);
  for (std::size_t i = 0; i < n; ++i) {
    raw.row(static_cast<Eigen::Index>(i)) =
        token_vector(encoding.tokens[i].kind, encoding.tokens[i].text).transpose();
  }
  EmbeddingOutput out;
  out.h_input = raw;
  // Segment boundaries: special tokens stand alone, a table block runs from
  // its marker to the next table marker or separator.
  std::size_t i = 0;
  while (i < n) {
    std::size_t end = i + 1;
    const Kind kind = encoding.tokens[i].kind;
    if (i == encoding.question_begin && encoding.question_end > i) {
      end = encoding.question_end;
    } else if (kind == Kind::kTableMark) {
      while (end < n && encoding.tokens[end].kind != Kind::kTableMark &&
             encoding.tokens[end].kind != Kind::kSep) {
        ++end;
      }
    }
    mix_segment(raw, out.h_input, i, end);
    i = end;
  }
  const auto qb = static_cast<Eigen::Index>(encoding.question_begin);
  const auto qn = static_cast<Eigen::Index>(encoding.question_length());
  Eigen::MatrixXd q = out.h_input.middleRows(qb, qn);
  out.h_q = q;
  mix_segment(q, out.h_q, 0, static_cast<std::size_t>(qn));
  return out;
}

FieldFeatureIndex field_feature_index(const DatabaseSchema& schema, FieldId field) {
  const Field& f = schema.field(field);
  return {f.is_primary ? 1 : 0, schema.in_foreign_pair(field) ? 1 : 0,
          static_cast<int>(f.field_type)};
}

MetaFeatures make_meta_features(const DatabaseSchema& schema, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MetaFeatures mf;
  mf.f_pri = uniform_matrix(2, dim, rng);
  mf.f_for = uniform_matrix(2, dim, rng);
  mf.f_type = uniform_matrix(kFieldTypeCount, dim, rng);
  for (const Field& f : schema.fields) mf.index[f.field_id] = field_feature_index(schema, f.field_id);
  return mf;
}

FusionParams make_fusion_params(int dim, int out_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  FusionParams p;
  p.w_g = uniform_matrix(out_dim, 4 * static_cast<Eigen::Index>(dim), rng);
  p.b_g = uniform_matrix(out_dim, 1, rng).col(0);
  return p;
}

ComponentVectors fuse_metadata(const EmbeddingOutput& embedding, const MetaFeatures& features,
                               const FusionParams& params, const InputEncoding& encoding) {
  const Eigen::Index d = embedding.h_input.cols();
  if (embedding.h_input.rows() != static_cast<Eigen::Index>(encoding.tokens.size())) {
    shape_error("h_input has " + std::to_string(embedding.h_input.rows()) + " rows for " +
                std::to_string(encoding.tokens.size()) + " tokens");
  }
  if (features.f_pri.rows() != 2 || features.f_for.rows() != 2 ||
      features.f_type.rows() != kFieldTypeCount) {
    shape_error("metadata tables must have 2, 2 and " + std::to_string(kFieldTypeCount) + " rows");
  }
  if (features.f_pri.cols() != d || features.f_for.cols() != d || features.f_type.cols() != d) {
    shape_error("metadata dimension differs from embedding dimension " + std::to_string(d));
  }
  if (params.w_g.cols() != 4 * d || params.w_g.rows() != params.b_g.size()) {
    shape_error("W_g must be d_out x " + std::to_string(4 * d) + " with d_out = |b_g|");
  }
  ComponentVectors out;
  Eigen::VectorXd x(4 * d);
  auto fuse = [&]() -> Eigen::VectorXd {
    return (params.w_g * x + params.b_g).cwiseMax(0.0);
  };
  for (const auto& [tid, pos] : encoding.table_marker_positions) {
    if (pos >= encoding.tokens.size()) shape_error("marker position out of range");
    x.setZero();
    x.head(d) = embedding.h_input.row(static_cast<Eigen::Index>(pos)).transpose();
    out.tables[tid] = fuse();
  }
  for (const auto& [fid, pos] : encoding.field_marker_positions) {
    auto it = features.index.find(fid);
    if (it == features.index.end()) shape_error("no metadata index for field " + std::to_string(index_of(fid)));
    const FieldFeatureIndex& ix = it->second;
    if (ix.primary < 0 || ix.primary > 1 || ix.foreign < 0 || ix.foreign > 1 || ix.type < 0 ||
        ix.type >= kFieldTypeCount) {
      shape_error("metadata index out of range");
    }
    if (pos >= encoding.tokens.size()) shape_error("marker position out of range");
    x.segment(0, d) = embedding.h_input.row(static_cast<Eigen::Index>(pos)).transpose();
    x.segment(d, d) = features.f_pri.row(ix.primary).transpose();
    x.segment(2 * d, d) = features.f_for.row(ix.foreign).transpose();
    x.segment(3 * d, d) = features.f_type.row(ix.type).transpose();
    out.fields[fid] = fuse();
  }
  return out;
}

}  // namespace nlidb
