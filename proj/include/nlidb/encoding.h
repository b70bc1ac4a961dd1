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

#ifndef NLIDB_ENCODING_H_
#define NLIDB_ENCODING_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nlidb/schema.h"
#include "nlidb/text.h"

namespace nlidb {

inline constexpr double kDefaultMatchThreshold = 0.85;
inline constexpr std::size_t kDefaultMatchCap = 8;
inline constexpr int kDefaultEmbeddingDim = 512;

struct PicklistMatch {
  FieldId field{};
  std::string value;
  double score = 0;

  bool operator==(const PicklistMatch&) const = default;
};

// Case-insensitive longest common substring of question and value, divided
// by the value length. In [0, 1]; 0 for an empty value.
double picklist_score(std::string_view question, std::string_view value);

// Best picklist value per field with score >= theta. Ties keep the earlier
// (more frequent) value. At most `cap` fields, highest score first, ordered
// by field id on equal scores.
std::vector<PicklistMatch> match_picklists(std::string_view question,
                                           const DatabaseSchema& schema,
                                           double theta = kDefaultMatchThreshold,
                                           std::size_t cap = kDefaultMatchCap);

struct EncodedToken {
  enum class Kind { kCls, kSep, kTableMark, kFieldMark, kValueMark, kWord };
  Kind kind = Kind::kWord;
  std::string text;

  bool operator==(const EncodedToken&) const = default;
};

std::string_view token_kind_name(EncodedToken::Kind kind);

struct InputEncoding {
  std::vector<EncodedToken> tokens;
  // Question words occupy tokens [question_begin, question_end).
  std::size_t question_begin = 1;
  std::size_t question_end = 1;
  std::map<TableId, std::size_t> table_marker_positions;
  std::map<FieldId, std::size_t> field_marker_positions;
  std::map<FieldId, std::string> value_attachments;
  std::vector<QuestionToken> question;

  std::size_t question_length() const { return question_end - question_begin; }
};

// [CLS] q1 .. qn [SEP] ([T] table ([C] field ([V] value)?)+)+ [SEP]
// Words are lowercased display tokens; tables and fields in id order.
InputEncoding serialize(const std::vector<QuestionToken>& question,
                        const DatabaseSchema& schema,
                        const std::vector<PicklistMatch>& matches);

struct EmbeddingOutput {
  Eigen::MatrixXd h_input;  // one row per encoding token
  Eigen::MatrixXd h_q;      // one row per question token
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual int dim() const = 0;
  virtual EmbeddingOutput embed(const InputEncoding& encoding) const = 0;
};

// Training-free provider: each token is the normalized sum of seeded random
// sign vectors of its padded character trigrams plus a kind vector, then
// smoothed with its neighbors inside its segment (question, one table block,
// or a lone special token). h_q repeats the smoothing over the question rows.
class ReferenceEmbedder : public Embedder {
 public:
  explicit ReferenceEmbedder(std::uint64_t seed = 0, int dim = kDefaultEmbeddingDim);

  int dim() const override { return dim_; }
  EmbeddingOutput embed(const InputEncoding& encoding) const override;

  // Unit-norm context-free vector of one token.
  Eigen::VectorXd token_vector(EncodedToken::Kind kind, std::string_view text) const;
  // Mean of the word vectors of `words`, zero for an empty list.
  Eigen::VectorXd text_vector(const std::vector<std::string>& words) const;

 private:
  Eigen::VectorXd hashed(std::string_view key) const;

  std::uint64_t seed_;
  int dim_;
};

// Indices into the metadata lookup tables for one field.
struct FieldFeatureIndex {
  int primary = 0;  // 1 for a primary key
  int foreign = 0;  // 1 for a member of a foreign pair
  int type = 0;     // FieldType ordinal

  bool operator==(const FieldFeatureIndex&) const = default;
};

FieldFeatureIndex field_feature_index(const DatabaseSchema& schema, FieldId field);

struct MetaFeatures {
  Eigen::MatrixXd f_pri;   // 2 x d
  Eigen::MatrixXd f_for;   // 2 x d
  Eigen::MatrixXd f_type;  // kFieldTypeCount x d
  std::map<FieldId, FieldFeatureIndex> index;

  int dim() const { return static_cast<int>(f_pri.cols()); }
};

// Seeded uniform(-0.1, 0.1) tables with the indices of `schema`.
MetaFeatures make_meta_features(const DatabaseSchema& schema, int dim, std::uint64_t seed);

struct FusionParams {
  Eigen::MatrixXd w_g;  // d_out x 4d
  Eigen::VectorXd b_g;  // d_out
};

FusionParams make_fusion_params(int dim, int out_dim, std::uint64_t seed);

struct ComponentVectors {
  std::map<TableId, Eigen::VectorXd> tables;
  std::map<FieldId, Eigen::VectorXd> fields;
};

// h^C = ReLU(W_g [h_m; f_pri; f_for; f_type] + b_g) at each field marker m;
// tables use zeros in the three feature slots. Throws Error(kShapeMismatch).
ComponentVectors fuse_metadata(const EmbeddingOutput& embedding,
                               const MetaFeatures& features,
                               const FusionParams& params,
                               const InputEncoding& encoding);

}  // namespace nlidb

#endif  // NLIDB_ENCODING_H_
