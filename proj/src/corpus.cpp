#include "authorid/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace authorid {

using nlohmann::json;

namespace {

const std::string kSourceNames[] = {"llm", "collab", "human"};
const std::string kCollabNames[] = {"polished", "continued", "paraphrased"};
const std::string kSplitNames[] = {"train", "val", "test"};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool all_whitespace(const std::string& s) {
  for (char c : s)
    if (!is_space(c)) return false;
  return true;
}

}  // namespace

const std::string& to_string(Source s) { return kSourceNames[static_cast<size_t>(s)]; }
const std::string& to_string(CollabMode m) { return kCollabNames[static_cast<size_t>(m)]; }
const std::string& to_string(Split s) { return kSplitNames[static_cast<size_t>(s)]; }

Source source_from_string(const std::string& s) {
  if (s == "llm") return Source::llm;
  if (s == "collab") return Source::collab;
  if (s == "human") return Source::human;
  throw Error(errc::malformed_record, "unknown source '" + s + "'");
}

CollabMode collab_mode_from_string(const std::string& s) {
  if (s == "polished") return CollabMode::polished;
  if (s == "continued") return CollabMode::continued;
  if (s == "paraphrased") return CollabMode::paraphrased;
  throw Error(errc::malformed_record, "unknown collab_mode '" + s + "'");
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw Error(errc::malformed_record, "unknown split '" + s + "'");
}

void AuthorshipLabel::validate(const std::string& record_id) const {
  switch (source) {
    case Source::human:
      if (family || collab_mode)
        throw Error(errc::invalid_label_combination,
                    "record '" + record_id + "': human records carry no family or collab_mode");
      break;
    case Source::llm:
      if (!family)
        throw Error(errc::invalid_label_combination,
                    "record '" + record_id + "': llm records require a family");
      if (collab_mode)
        throw Error(errc::invalid_label_combination,
                    "record '" + record_id + "': llm records carry no collab_mode");
      break;
    case Source::collab:
      if (!family)
        throw Error(errc::invalid_label_combination,
                    "record '" + record_id + "': collab records require a family");
      break;
  }
}

uint16_t FamilyTable::add(const std::string& name) {
  auto it = codes_.find(name);
  if (it != codes_.end()) return it->second;
  if (names_.size() >= kNoFamily)
    throw Error(errc::config_invalid, "family table exceeds 65534 entries");
  uint16_t code = static_cast<uint16_t>(names_.size());
  names_.push_back(name);
  codes_.emplace(name, code);
  return code;
}

std::optional<uint16_t> FamilyTable::code(const std::string& name) const {
  auto it = codes_.find(name);
  if (it == codes_.end()) return std::nullopt;
  return it->second;
}

const std::string& FamilyTable::name(uint16_t code) const {
  if (code >= names_.size()) throw Error(errc::unknown_family, "no family with code " + std::to_string(code));
  return names_[code];
}

std::string FamilyTable::to_json() const {
  json j = json::array();
  for (const auto& n : names_) j.push_back(n);
  return j.dump();
}

FamilyTable FamilyTable::from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_array())
    throw Error(errc::malformed_record, "family table must be a JSON array of names");
  FamilyTable t;
  for (const auto& v : j) {
    if (!v.is_string()) throw Error(errc::malformed_record, "family table entries must be strings");
    t.add(v.get<std::string>());
  }
  return t;
}

Codes label_to_codes(const AuthorshipLabel& label, const FamilyTable& table) {
  Codes c;
  switch (label.source) {
    case Source::human:
      c = {1, 0, kNoFamily};
      break;
    case Source::llm:
    case Source::collab: {
      auto code = table.code(*label.family);
      if (!code) throw Error(errc::unknown_family, "family '" + *label.family + "' not in table");
      c.x = label.source == Source::llm ? 0 : 1;
      c.y = 1;
      c.z = *code;
      break;
    }
  }
  return c;
}

int ordinal_code(Source source) {
  switch (source) {
    case Source::llm: return 0;
    case Source::collab: return 1;
    case Source::human: return 2;
  }
  return 2;
}

int ordinal_code(const AuthorshipLabel& label) { return ordinal_code(label.source); }

CorpusDataset dataset_from_records(std::vector<TextRecord> records) {
  CorpusDataset ds;
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.id).second)
      throw Error(errc::duplicate_id, "record id '" + r.id + "' appears more than once");
    if (r.text.empty() || all_whitespace(r.text))
      throw Error(errc::empty_text, "record '" + r.id + "' has empty text");
    r.label.validate(r.id);
    if (r.label.family) ds.family_table.add(*r.label.family);
  }
  ds.records = std::move(records);
  return ds;
}

namespace {

TextRecord record_from_json_line(const std::string& line, size_t line_no) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw Error(errc::malformed_record, "line " + std::to_string(line_no) + ": not a JSON object");

  static const std::set<std::string> kAllowed = {"id",     "text",   "lang",        "domain",
                                                 "source", "family", "collab_mode", "split"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kAllowed.count(it.key()))
      throw Error(errc::malformed_record,
                  "line " + std::to_string(line_no) + ": unknown key '" + it.key() + "'");
  }
  for (const auto& key : kAllowed) {
    if (!j.contains(key))
      throw Error(errc::malformed_record,
                  "line " + std::to_string(line_no) + ": missing key '" + key + "'");
  }

  auto str_field = [&](const char* key) {
    if (!j[key].is_string())
      throw Error(errc::malformed_record,
                  "line " + std::to_string(line_no) + ": '" + key + "' must be a string");
    return j[key].get<std::string>();
  };

  TextRecord r;
  r.id = str_field("id");
  r.text = str_field("text");
  r.lang = str_field("lang");
  r.domain = str_field("domain");
  r.label.source = source_from_string(str_field("source"));
  if (!j["family"].is_null()) r.label.family = str_field("family");
  if (!j["collab_mode"].is_null()) r.label.collab_mode = collab_mode_from_string(str_field("collab_mode"));
  r.split = split_from_string(str_field("split"));
  return r;
}

json record_to_json(const TextRecord& r) {
  json j;
  j["id"] = r.id;
  j["text"] = r.text;
  j["lang"] = r.lang;
  j["domain"] = r.domain;
  j["source"] = to_string(r.label.source);
  j["family"] = r.label.family ? json(*r.label.family) : json(nullptr);
  j["collab_mode"] = r.label.collab_mode ? json(to_string(*r.label.collab_mode)) : json(nullptr);
  j["split"] = to_string(r.split);
  return j;
}

CorpusDataset parse_corpus(std::istream& in) {
  std::vector<TextRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || all_whitespace(line)) continue;
    records.push_back(record_from_json_line(line, line_no));
  }
  return dataset_from_records(std::move(records));
}

}  // namespace

CorpusDataset load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_error, "cannot open corpus file: " + path);
  return parse_corpus(in);
}

CorpusDataset corpus_from_string(const std::string& text) {
  std::istringstream in(text);
  return parse_corpus(in);
}

std::string corpus_to_string(const CorpusDataset& dataset) {
  std::string out;
  for (const auto& r : dataset.records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const CorpusDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::io_error, "cannot open for writing: " + path);
  out << corpus_to_string(dataset);
  if (!out) throw Error(errc::io_error, "write failed: " + path);
}

std::vector<size_t> split_indices(const CorpusDataset& dataset, Split split) {
  std::vector<size_t> idx;
  for (size_t i = 0; i < dataset.records.size(); ++i)
    if (dataset.records[i].split == split) idx.push_back(i);
  return idx;
}

}  // namespace authorid
