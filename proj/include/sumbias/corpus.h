// Copyright 2026 The sumbias Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUMBIAS_CORPUS_H_
#define SUMBIAS_CORPUS_H_

// Annotated document model and the CoNLL-2012-style column reader/writer.
// The column layout is documented in docs/formats.md.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace sumbias {

struct Token {
  int index = 0;     // 0-based position in the document
  std::string text;
  int sentence = 0;  // 0-based sentence index
  std::string pos;   // may be empty

  bool operator==(const Token&) const = default;
};

// Token range [start, end], inclusive on both ends.
struct MentionSpan {
  int start = 0;
  int end = 0;
  std::optional<std::string> chain;  // nullopt for singleton candidates

  int length() const { return end - start + 1; }
  bool Contains(int s, int e) const { return start <= s && e <= end; }
  bool operator==(const MentionSpan&) const = default;
};

struct NamedEntitySpan {
  int start = 0;
  int end = 0;
  std::string label;

  bool operator==(const NamedEntitySpan&) const = default;
};

struct AnnotatedDocument {
  std::string name;  // doc-id column
  int part = 0;
  std::vector<Token> tokens;
  std::vector<MentionSpan> mentions;
  // chain id -> indices into `mentions`.
  std::map<std::string, std::vector<int>> chains;
  std::vector<NamedEntitySpan> entities;

  // "<name>_<part, 3 digits>", unique within a corpus.
  std::string id() const;

  // A document with no PERSON span is kept but cannot yield a template.
  bool HasPersonEntity() const;

  // Number of sentences (last sentence index + 1).
  int SentenceCount() const;

  // Token texts of sentence `s`.
  std::vector<std::string> SentenceTokens(int s) const;

  // Rebuilds `chains` from the chain ids on `mentions`.
  void RebuildChains();

  bool operator==(const AnnotatedDocument&) const = default;
};

struct Diagnostic {
  std::string code;
  std::string message;
};

// Parses a CoNLL-2012-style file. Accepts the compact 7-column layout
// (doc-id, part, token-index, token, POS, NE, coref) and the full
// OntoNotes *_conll layout (NE in column 11, coref in the last column).
// Output is sorted by document id.
// Throws ParseError on malformed lines and IntegrityError on unbalanced
// brackets or duplicate document ids.
std::vector<AnnotatedDocument> ParseConllCorpus(const std::string& path);
std::vector<AnnotatedDocument> ParseConll(std::istream& in);

// Writes the compact 7-column layout. Re-parsing the output yields equal
// documents.
void WriteConll(const std::vector<AnnotatedDocument>& docs, std::ostream& out);

// Lists invariant violations; an empty list means the document is valid.
std::vector<Diagnostic> ValidateDocument(const AnnotatedDocument& doc);

nlohmann::json ToJson(const AnnotatedDocument& doc);
AnnotatedDocument DocumentFromJson(const nlohmann::json& j);

// Reads either a CoNLL file or an ingest JSONL file (by extension).
std::vector<AnnotatedDocument> LoadCorpus(const std::string& path);

}  // namespace sumbias

#endif  // SUMBIAS_CORPUS_H_
