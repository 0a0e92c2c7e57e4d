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

#include "sumbias/corpus.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "sumbias/errors.h"
#include "sumbias/jsonl.h"
#include "sumbias/text_util.h"

namespace sumbias {

std::string AnnotatedDocument::id() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%03d", part);
  return name + buf;
}

bool AnnotatedDocument::HasPersonEntity() const {
  return std::any_of(entities.begin(), entities.end(),
                     [](const NamedEntitySpan& e) { return e.label == "PERSON"; });
}

int AnnotatedDocument::SentenceCount() const {
  return tokens.empty() ? 0 : tokens.back().sentence + 1;
}

std::vector<std::string> AnnotatedDocument::SentenceTokens(int s) const {
  std::vector<std::string> out;
  for (const Token& t : tokens) {
    if (t.sentence == s) out.push_back(t.text);
  }
  return out;
}

void AnnotatedDocument::RebuildChains() {
  chains.clear();
  for (size_t i = 0; i < mentions.size(); ++i) {
    if (mentions[i].chain) chains[*mentions[i].chain].push_back(static_cast<int>(i));
  }
}

namespace {

bool MentionLess(const MentionSpan& a, const MentionSpan& b) {
  if (a.start != b.start) return a.start < b.start;
  if (a.end != b.end) return a.end > b.end;  // outer before inner
  return a.chain < b.chain;
}

struct OpenMention {
  int start;
  int line;
};

// Accumulates one document while reading lines.
class DocumentBuilder {
 public:
  DocumentBuilder(std::string name, int part, int line)
      : begin_line_(line) {
    doc_.name = std::move(name);
    doc_.part = part;
  }

  int begin_line() const { return begin_line_; }

  void AddToken(const std::vector<std::string>& cols, int line) {
    const bool full = cols.size() >= 12;
    const std::string& name = cols[0];
    if (name != doc_.name) {
      throw ParseError("doc-id column '" + name + "' does not match header '" +
                           doc_.name + "'",
                       line);
    }
    int within = 0;
    try {
      size_t used = 0;
      within = std::stoi(cols[2], &used);
      if (used != cols[2].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ParseError("token-index column is not an integer", line);
    }
    if (within != sentence_pos_) {
      throw ParseError("token-index " + cols[2] + " out of sequence (expected " +
                           std::to_string(sentence_pos_) + ")",
                       line);
    }
    Token tok;
    tok.index = static_cast<int>(doc_.tokens.size());
    tok.text = cols[3];
    tok.pos = cols[4] == "-" ? "" : cols[4];
    tok.sentence = sentence_;
    doc_.tokens.push_back(tok);
    ++sentence_pos_;

    ParseNamedEntity(full ? cols[10] : cols[5], tok.index, line);
    ParseCoref(cols.back(), tok.index, line);
  }

  void EndSentence(int line) {
    if (sentence_pos_ == 0) return;
    if (ne_open_) {
      throw IntegrityError("named-entity bracket opened at line " +
                           std::to_string(ne_line_) + " not closed by sentence end (line " +
                           std::to_string(line) + ")");
    }
    for (const auto& [chain, stack] : open_) {
      if (!stack.empty()) {
        throw IntegrityError("coreference bracket for chain " + chain +
                             " opened at line " + std::to_string(stack.back().line) +
                             " never closed");
      }
    }
    ++sentence_;
    sentence_pos_ = 0;
  }

  AnnotatedDocument Finish(int line) {
    EndSentence(line);
    std::sort(doc_.mentions.begin(), doc_.mentions.end(), MentionLess);
    doc_.mentions.erase(std::unique(doc_.mentions.begin(), doc_.mentions.end()),
                        doc_.mentions.end());
    doc_.RebuildChains();
    return std::move(doc_);
  }

 private:
  void ParseNamedEntity(const std::string& field, int index, int line) {
    if (field == "*" || field == "-") return;
    std::string f = field;
    const bool opens = f.front() == '(';
    const bool closes = f.back() == ')';
    if (opens) {
      if (ne_open_) {
        throw IntegrityError("nested named-entity bracket at line " + std::to_string(line));
      }
      size_t star = f.find('*');
      size_t stop = star == std::string::npos ? f.size() - 1 : star;
      ne_label_ = f.substr(1, stop - 1);
      if (ne_label_.empty()) throw ParseError("empty named-entity label", line);
      ne_start_ = index;
      ne_open_ = true;
      ne_line_ = line;
    } else if (f != "*)") {
      throw ParseError("malformed named-entity field '" + field + "'", line);
    }
    if (closes) {
      if (!ne_open_) {
        throw IntegrityError("named-entity close without open at line " + std::to_string(line));
      }
      doc_.entities.push_back({ne_start_, index, ne_label_});
      ne_open_ = false;
    }
  }

  void ParseCoref(const std::string& field, int index, int line) {
    if (field == "-" || field == "*") return;
    std::stringstream ss(field);
    std::string item;
    while (std::getline(ss, item, '|')) {
      if (item.empty()) throw ParseError("empty coreference item", line);
      const bool opens = item.front() == '(';
      const bool closes = item.back() == ')';
      std::string chain = item.substr(opens ? 1 : 0);
      if (closes && !chain.empty()) chain.pop_back();
      if (chain.empty() || (!opens && !closes)) {
        throw ParseError("malformed coreference item '" + item + "'", line);
      }
      if (opens && closes) {
        doc_.mentions.push_back({index, index, chain});
      } else if (opens) {
        open_[chain].push_back({index, line});
      } else {
        auto& stack = open_[chain];
        if (stack.empty()) {
          throw IntegrityError("coreference close for chain " + chain +
                               " without open at line " + std::to_string(line));
        }
        doc_.mentions.push_back({stack.back().start, index, chain});
        stack.pop_back();
      }
    }
  }

  AnnotatedDocument doc_;
  int begin_line_;
  int sentence_ = 0;
  int sentence_pos_ = 0;
  bool ne_open_ = false;
  int ne_start_ = 0;
  int ne_line_ = 0;
  std::string ne_label_;
  std::map<std::string, std::vector<OpenMention>> open_;
};

const std::regex& BeginRegex() {
  static const std::regex re(R"(^#begin document \(([^)]*)\);\s*part\s+(\d+)\s*$)");
  return re;
}

}  // namespace

std::vector<AnnotatedDocument> ParseConll(std::istream& in) {
  std::vector<AnnotatedDocument> docs;
  std::optional<DocumentBuilder> current;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("#begin document", 0) == 0) {
      if (current) throw ParseError("#begin document inside an open document", lineno);
      std::smatch m;
      if (!std::regex_match(line, m, BeginRegex())) {
        throw ParseError("malformed #begin document header", lineno);
      }
      current.emplace(m[1].str(), std::stoi(m[2].str()), lineno);
      continue;
    }
    if (line.rfind("#end document", 0) == 0) {
      if (!current) throw ParseError("#end document without #begin", lineno);
      docs.push_back(current->Finish(lineno));
      current.reset();
      continue;
    }
    const std::vector<std::string> cols = SplitWhitespace(line);
    if (cols.empty()) {
      if (current) current->EndSentence(lineno);
      continue;
    }
    if (cols[0].front() == '#') continue;  // comment
    if (!current) throw ParseError("token line outside of a document", lineno);
    if (cols.size() != 7 && cols.size() < 12) {
      throw ParseError("expected 7 columns (or >= 12 for full CoNLL-2012), got " +
                           std::to_string(cols.size()),
                       lineno);
    }
    current->AddToken(cols, lineno);
  }
  if (current) {
    throw IntegrityError("document opened at line " + std::to_string(current->begin_line()) +
                         " not terminated by #end document");
  }

  std::sort(docs.begin(), docs.end(),
            [](const AnnotatedDocument& a, const AnnotatedDocument& b) { return a.id() < b.id(); });
  for (size_t i = 1; i < docs.size(); ++i) {
    if (docs[i].id() == docs[i - 1].id()) {
      throw IntegrityError("duplicate document id " + docs[i].id());
    }
  }
  return docs;
}

std::vector<AnnotatedDocument> ParseConllCorpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open corpus " + path);
  return ParseConll(in);
}

void WriteConll(const std::vector<AnnotatedDocument>& docs, std::ostream& out) {
  for (const AnnotatedDocument& doc : docs) {
    char part[8];
    std::snprintf(part, sizeof(part), "%03d", doc.part);
    out << "#begin document (" << doc.name << "); part " << part << "\n";
    const int n = static_cast<int>(doc.tokens.size());
    std::vector<std::string> ne(n, "*");
    for (const auto& e : doc.entities) {
      if (e.start == e.end) {
        ne[e.start] = "(" + e.label + ")";
      } else {
        ne[e.start] = "(" + e.label + "*";
        ne[e.end] = "*)";
      }
    }
    // Closes of earlier-opened mentions come first, then opens (outer first),
    // then single-token mentions, so the reader's per-chain stack pops the
    // right bracket.
    std::vector<std::vector<std::string>> closes(n), singles(n);
    std::vector<std::vector<std::pair<int, std::string>>> opens(n);
    for (const auto& m : doc.mentions) {
      if (!m.chain) continue;  // singletons have no column representation
      if (m.start == m.end) {
        singles[m.start].push_back("(" + *m.chain + ")");
      } else {
        opens[m.start].push_back({m.end, "(" + *m.chain});
        closes[m.end].push_back(*m.chain + ")");
      }
    }
    int within = 0;
    for (int i = 0; i < n; ++i) {
      const Token& t = doc.tokens[i];
      if (i > 0 && t.sentence != doc.tokens[i - 1].sentence) {
        out << "\n";
        within = 0;
      }
      std::sort(opens[i].begin(), opens[i].end(),
                [](const auto& a, const auto& b) { return a.first > b.first; });
      std::vector<std::string> items = closes[i];
      for (const auto& o : opens[i]) items.push_back(o.second);
      items.insert(items.end(), singles[i].begin(), singles[i].end());
      const std::string coref = items.empty() ? "-" : Join(items, "|");
      out << doc.name << "\t" << doc.part << "\t" << within++ << "\t" << t.text << "\t"
          << (t.pos.empty() ? "-" : t.pos) << "\t" << ne[i] << "\t" << coref << "\n";
    }
    out << "\n#end document\n";
  }
}

std::vector<Diagnostic> ValidateDocument(const AnnotatedDocument& doc) {
  std::vector<Diagnostic> out;
  const int n = static_cast<int>(doc.tokens.size());
  for (int i = 0; i < n; ++i) {
    if (doc.tokens[i].index != i) {
      out.push_back({"token_index", "token " + std::to_string(i) + " has index " +
                                        std::to_string(doc.tokens[i].index)});
    }
    if (i > 0 && doc.tokens[i].sentence < doc.tokens[i - 1].sentence) {
      out.push_back({"sentence_order", "sentence index decreases at token " + std::to_string(i)});
    }
  }
  auto in_bounds = [n](int s, int e) { return 0 <= s && s <= e && e < n; };
  for (size_t i = 0; i < doc.mentions.size(); ++i) {
    const MentionSpan& m = doc.mentions[i];
    if (!in_bounds(m.start, m.end)) {
      out.push_back({"mention_bounds", "mention " + std::to_string(i) + " [" +
                                           std::to_string(m.start) + "," +
                                           std::to_string(m.end) + "] out of range"});
    } else if (doc.tokens[m.start].sentence != doc.tokens[m.end].sentence) {
      out.push_back({"mention_sentence", "mention " + std::to_string(i) +
                                             " crosses a sentence boundary"});
    }
  }
  for (size_t i = 0; i < doc.entities.size(); ++i) {
    const NamedEntitySpan& e = doc.entities[i];
    if (!in_bounds(e.start, e.end)) {
      out.push_back({"entity_bounds", "named entity " + std::to_string(i) + " [" +
                                          std::to_string(e.start) + "," +
                                          std::to_string(e.end) + "] out of range"});
    }
  }
  for (const auto& [chain, members] : doc.chains) {
    if (members.empty()) out.push_back({"empty_chain", "chain " + chain + " has no mentions"});
    for (int idx : members) {
      if (idx < 0 || idx >= static_cast<int>(doc.mentions.size()) ||
          doc.mentions[idx].chain != chain) {
        out.push_back({"chain_reference", "chain " + chain + " references missing mention " +
                                              std::to_string(idx)});
      }
    }
  }
  return out;
}

nlohmann::json ToJson(const AnnotatedDocument& doc) {
  nlohmann::json j;
  j["id"] = doc.id();
  j["name"] = doc.name;
  j["part"] = doc.part;
  j["eligible"] = doc.HasPersonEntity();
  auto& toks = j["tokens"] = nlohmann::json::array();
  for (const Token& t : doc.tokens) {
    toks.push_back({{"text", t.text}, {"sentence", t.sentence}, {"pos", t.pos}});
  }
  auto& ments = j["mentions"] = nlohmann::json::array();
  for (const MentionSpan& m : doc.mentions) {
    ments.push_back({{"start", m.start},
                     {"end", m.end},
                     {"chain", m.chain ? nlohmann::json(*m.chain) : nlohmann::json()}});
  }
  auto& ents = j["entities"] = nlohmann::json::array();
  for (const NamedEntitySpan& e : doc.entities) {
    ents.push_back({{"start", e.start}, {"end", e.end}, {"label", e.label}});
  }
  return j;
}

AnnotatedDocument DocumentFromJson(const nlohmann::json& j) {
  AnnotatedDocument doc;
  doc.name = j.at("name").get<std::string>();
  doc.part = j.at("part").get<int>();
  for (const auto& t : j.at("tokens")) {
    Token tok;
    tok.index = static_cast<int>(doc.tokens.size());
    tok.text = t.at("text").get<std::string>();
    tok.sentence = t.at("sentence").get<int>();
    tok.pos = t.value("pos", "");
    doc.tokens.push_back(std::move(tok));
  }
  for (const auto& m : j.at("mentions")) {
    MentionSpan span{m.at("start").get<int>(), m.at("end").get<int>(), std::nullopt};
    if (m.contains("chain") && !m["chain"].is_null()) span.chain = m["chain"].get<std::string>();
    doc.mentions.push_back(span);
  }
  for (const auto& e : j.at("entities")) {
    doc.entities.push_back(
        {e.at("start").get<int>(), e.at("end").get<int>(), e.at("label").get<std::string>()});
  }
  doc.RebuildChains();
  return doc;
}

std::vector<AnnotatedDocument> LoadCorpus(const std::string& path) {
  const bool jsonl = path.size() >= 6 && (path.rfind(".jsonl") == path.size() - 6);
  if (!jsonl) return ParseConllCorpus(path);
  std::vector<AnnotatedDocument> docs;
  for (const auto& row : ReadJsonl(path)) docs.push_back(DocumentFromJson(row));
  std::sort(docs.begin(), docs.end(),
            [](const AnnotatedDocument& a, const AnnotatedDocument& b) { return a.id() < b.id(); });
  return docs;
}

}  // namespace sumbias
