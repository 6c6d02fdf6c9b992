#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "authorid/errors.hpp"

namespace authorid {

// Fixed class order used everywhere (argmax ties, confusion matrices, CSV):
// llm < collab < human.
enum class Source : uint8_t { llm = 0, collab = 1, human = 2 };

enum class CollabMode : uint8_t { polished = 0, continued = 1, paraphrased = 2 };

enum class Split : uint8_t { train = 0, val = 1, test = 2 };

const std::string& to_string(Source s);
const std::string& to_string(CollabMode m);
const std::string& to_string(Split s);
Source source_from_string(const std::string& s);
CollabMode collab_mode_from_string(const std::string& s);
Split split_from_string(const std::string& s);

struct AuthorshipLabel {
  Source source = Source::human;
  std::optional<std::string> family;       // required for llm and collab
  std::optional<CollabMode> collab_mode;   // optional, collab only

  // Throws InvalidLabelCombination when the (source, family, collab_mode)
  // combination is inconsistent.
  void validate(const std::string& record_id) const;

  bool operator==(const AuthorshipLabel&) const = default;
};

struct TextRecord {
  std::string id;
  std::string text;
  std::string lang;
  std::string domain;
  AuthorshipLabel label;
  Split split = Split::train;

  bool operator==(const TextRecord&) const = default;
};

// Sentinel family code meaning "no family" (human records).
inline constexpr uint16_t kNoFamily = 0xFFFF;

// Bijection family name <-> small integer code, codes assigned by first
// appearance. The index file stores codes only; this table gives them names.
class FamilyTable {
public:
  uint16_t add(const std::string& name);                 // idempotent
  std::optional<uint16_t> code(const std::string& name) const;
  const std::string& name(uint16_t code) const;
  size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  std::string to_json() const;
  static FamilyTable from_json(const std::string& text);

  bool operator==(const FamilyTable& other) const { return names_ == other.names_; }

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, uint16_t> codes_;
};

// The (x, y, z) triple stored per record: x = 0 iff fully LLM-generated,
// y = 0 iff fully human-written, z = family code (kNoFamily for humans).
// Fully-LLM records store y = 1 so the triple is total; nothing downstream
// reads y unless x = 1.
struct Codes {
  uint8_t x = 1;
  uint8_t y = 0;
  uint16_t z = kNoFamily;

  bool operator==(const Codes&) const = default;
};

Codes label_to_codes(const AuthorshipLabel& label, const FamilyTable& table);

// Degree of human involvement: llm = 0, collab = 1, human = 2.
int ordinal_code(Source source);
int ordinal_code(const AuthorshipLabel& label);

struct CorpusDataset {
  std::vector<TextRecord> records;
  FamilyTable family_table;
};

// Validates records (unique ids, label invariants, non-empty text) and builds
// the family table by first appearance.
CorpusDataset dataset_from_records(std::vector<TextRecord> records);

// One JSON object per line; exactly the keys id, text, lang, domain, source,
// family, collab_mode, split. Unknown keys are rejected.
CorpusDataset load_corpus(const std::string& path);
void save_corpus(const CorpusDataset& dataset, const std::string& path);
std::string corpus_to_string(const CorpusDataset& dataset);
CorpusDataset corpus_from_string(const std::string& text);

// Record indices of a dataset restricted to one split.
std::vector<size_t> split_indices(const CorpusDataset& dataset, Split split);

}  // namespace authorid
