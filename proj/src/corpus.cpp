#include "synimp/corpus.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "synimp/digest.hpp"
#include "synimp/rng.hpp"
#include "synimp/text.hpp"

namespace synimp {

using nlohmann::json;

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::original: return "original";
    case Origin::synthetic_llm: return "synthetic_llm";
    case Origin::synthetic_ssmba: return "synthetic_ssmba";
    case Origin::synthetic_eda: return "synthetic_eda";
  }
  return "original";
}

Origin origin_from_string(std::string_view s) {
  if (s == "original") return Origin::original;
  if (s == "synthetic_llm") return Origin::synthetic_llm;
  if (s == "synthetic_ssmba") return Origin::synthetic_ssmba;
  if (s == "synthetic_eda") return Origin::synthetic_eda;
  throw CorpusError("unknown origin '" + std::string(s) + "'");
}

namespace {

std::string with_line(const std::string& what, std::optional<std::size_t> line) {
  if (!line) return what;
  return "line " + std::to_string(*line) + ": " + what;
}

}  // namespace

CorpusError::CorpusError(const std::string& what, std::optional<std::size_t> line)
    : std::runtime_error(with_line(what, line)), line_(line) {}

Corpus::Corpus(std::vector<LabeledExample> examples) : examples_(std::move(examples)) {
  index_.reserve(examples_.size());
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    auto& e = examples_[i];
    e.label = std::string(trim(e.label));
    if (e.id.empty()) throw CorpusError("example " + std::to_string(i) + " has an empty id");
    if (trim(e.text).empty()) throw CorpusError("example '" + e.id + "' has empty text");
    if (e.label.empty()) throw CorpusError("example '" + e.id + "' has an empty label");
    if (!index_.emplace(e.id, i).second) throw CorpusError("duplicate id '" + e.id + "'");
    labels_.insert(e.label);
  }
}

const LabeledExample* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &examples_[it->second];
}

Corpus Corpus::with_label(const std::string& label) const {
  std::vector<LabeledExample> out;
  for (const auto& e : examples_)
    if (e.label == label) out.push_back(e);
  return Corpus(std::move(out));
}

Corpus Corpus::without_label(const std::string& label) const {
  std::vector<LabeledExample> out;
  for (const auto& e : examples_)
    if (e.label != label) out.push_back(e);
  return Corpus(std::move(out));
}

Corpus Corpus::merged(const Corpus& other) const {
  std::vector<LabeledExample> out = examples_;
  out.insert(out.end(), other.examples_.begin(), other.examples_.end());
  return Corpus(std::move(out));
}

CorpusFormat format_from_string(std::string_view s) {
  if (s == "jsonl") return CorpusFormat::jsonl;
  if (s == "csv") return CorpusFormat::csv;
  throw CorpusError("unknown corpus format '" + std::string(s) + "' (expected jsonl or csv)");
}

CorpusFormat format_from_path(const std::filesystem::path& p) {
  return p.extension() == ".csv" ? CorpusFormat::csv : CorpusFormat::jsonl;
}

namespace {

// Collects rows, assigns missing ids, and converts per-row failures into
// line-numbered errors.
class RowSink {
 public:
  void add(std::size_t line, std::optional<std::string> id, std::string text, std::string label,
           std::optional<std::string> origin) {
    if (trim(text).empty()) throw CorpusError("empty text", line);
    if (trim(label).empty()) throw CorpusError("empty label", line);
    LabeledExample e;
    e.id = id ? *id : "row-" + std::to_string(line);
    if (e.id.empty()) throw CorpusError("empty id", line);
    e.text = std::move(text);
    e.label = std::string(trim(label));
    if (origin) {
      try {
        e.origin = origin_from_string(trim(*origin));
      } catch (const CorpusError& err) {
        throw CorpusError(err.what(), line);
      }
    }
    if (!seen_.emplace(e.id, line).second)
      throw CorpusError("duplicate id '" + e.id + "' (first seen on line " +
                            std::to_string(seen_[e.id]) + ")",
                        line);
    rows_.push_back(std::move(e));
  }

  Corpus finish() {
    if (rows_.empty()) throw CorpusError("corpus is empty");
    return Corpus(std::move(rows_));
  }

 private:
  std::vector<LabeledExample> rows_;
  std::unordered_map<std::string, std::size_t> seen_;
};

Corpus read_jsonl(std::istream& in) {
  RowSink sink;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw CorpusError(std::string("malformed JSON: ") + e.what(), lineno);
    }
    if (!row.is_object()) throw CorpusError("expected a JSON object", lineno);
    auto get_str = [&](const char* key, bool required) -> std::optional<std::string> {
      auto it = row.find(key);
      if (it == row.end() || it->is_null()) {
        if (required) throw CorpusError(std::string("missing field '") + key + "'", lineno);
        return std::nullopt;
      }
      if (!it->is_string())
        throw CorpusError(std::string("field '") + key + "' must be a string", lineno);
      return it->get<std::string>();
    };
    auto text = get_str("text", true);
    auto label = get_str("label", true);
    sink.add(lineno, get_str("id", false), std::move(*text), std::move(*label),
             get_str("origin", false));
  }
  return sink.finish();
}

struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// RFC 4180: fields separated by commas, optionally double-quoted; quoted
// fields may contain commas, CR/LF and doubled quotes.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  bool next(CsvRecord& rec) {
    rec.fields.clear();
    int c = in_.peek();
    if (c == std::char_traits<char>::eof()) return false;
    rec.line = line_;
    std::string field;
    bool quoted = false;
    bool after_quote = false;
    bool at_field_start = true;
    while (true) {
      c = in_.get();
      if (c == std::char_traits<char>::eof()) {
        if (quoted) throw CorpusError("unterminated quoted field", rec.line);
        rec.fields.push_back(std::move(field));
        return true;
      }
      char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
        continue;
      }
      if (ch == ',') {
        rec.fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
        at_field_start = true;
        continue;
      }
      if (ch == '\r' && in_.peek() == '\n') continue;
      if (ch == '\n') {
        ++line_;
        rec.fields.push_back(std::move(field));
        return true;
      }
      if (ch == '"' && at_field_start) {
        quoted = true;
        at_field_start = false;
        continue;
      }
      if (after_quote) throw CorpusError("unexpected character after closing quote", rec.line);
      at_field_start = false;
      field.push_back(ch);
    }
  }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

Corpus read_csv(std::istream& in) {
  CsvReader reader(in);
  CsvRecord header;
  if (!reader.next(header)) throw CorpusError("corpus is empty");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.fields.size(); ++i)
    col[std::string(trim(header.fields[i]))] = i;
  if (!col.count("text") || !col.count("label"))
    throw CorpusError("CSV header must name 'text' and 'label' columns", header.line);
  RowSink sink;
  CsvRecord rec;
  while (reader.next(rec)) {
    if (rec.fields.size() == 1 && trim(rec.fields[0]).empty()) continue;
    if (rec.fields.size() != header.fields.size())
      throw CorpusError("expected " + std::to_string(header.fields.size()) + " fields, found " +
                            std::to_string(rec.fields.size()),
                        rec.line);
    auto opt = [&](const char* name) -> std::optional<std::string> {
      auto it = col.find(name);
      if (it == col.end()) return std::nullopt;
      const auto& v = rec.fields[it->second];
      if (v.empty()) return std::nullopt;
      return v;
    };
    sink.add(rec.line, opt("id"), rec.fields[col["text"]], rec.fields[col["label"]],
             opt("origin"));
  }
  return sink.finish();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Corpus read_corpus(std::istream& in, CorpusFormat format) {
  return format == CorpusFormat::jsonl ? read_jsonl(in) : read_csv(in);
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open corpus file '" + path.string() + "'");
  return read_corpus(in, format);
}

Corpus load_corpus(const std::filesystem::path& path) {
  return load_corpus(path, format_from_path(path));
}

void write_corpus(std::ostream& out, const Corpus& c, CorpusFormat format) {
  if (format == CorpusFormat::jsonl) {
    for (const auto& e : c) {
      json row = {{"id", e.id}, {"text", e.text}, {"label", e.label},
                  {"origin", std::string(to_string(e.origin))}};
      out << row.dump() << '\n';
    }
    return;
  }
  out << "id,text,label,origin\r\n";
  for (const auto& e : c) {
    out << csv_field(e.id) << ',' << csv_field(e.text) << ',' << csv_field(e.label) << ','
        << to_string(e.origin) << "\r\n";
  }
}

void save_corpus(const std::filesystem::path& path, const Corpus& c, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError("cannot write corpus file '" + path.string() + "'");
  write_corpus(out, c, format);
  if (!out) throw CorpusError("failed writing corpus file '" + path.string() + "'");
}

LabelDistribution label_distribution(const Corpus& c) {
  LabelDistribution d;
  for (const auto& e : c) ++d.counts[e.label];
  d.total = c.size();
  for (const auto& [label, n] : d.counts)
    d.shares[label] = static_cast<double>(n) / static_cast<double>(d.total);
  return d;
}

LabeledExample truncate_to_tokens(const LabeledExample& e, std::size_t max_tokens) {
  if (max_tokens == 0) throw std::invalid_argument("truncate_to_tokens: max_tokens must be >= 1");
  auto words = split_words(e.text);
  if (words.size() > max_tokens) words.resize(max_tokens);
  LabeledExample out = e;
  out.text = join_words(words);
  return out;
}

Corpus truncate_corpus(const Corpus& c, std::size_t max_tokens) {
  std::vector<LabeledExample> out;
  out.reserve(c.size());
  for (const auto& e : c) out.push_back(truncate_to_tokens(e, max_tokens));
  return Corpus(std::move(out));
}

Corpus draw_category_subset(const Corpus& c, const std::string& label, std::size_t n,
                            std::uint64_t seed) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i].label == label) members.push_back(i);
  if (members.empty()) throw CorpusError("category '" + label + "' not present in corpus");
  if (n == 0) throw CorpusError("subset size must be at least 1");
  if (n > members.size())
    throw CorpusError("requested " + std::to_string(n) + " examples of '" + label +
                      "' but only " + std::to_string(members.size()) + " available");
  Rng rng(seed);
  std::vector<LabeledExample> out;
  out.reserve(n);
  for (std::size_t k : rng.sample_without_replacement(members.size(), n))
    out.push_back(c[members[k]]);
  return Corpus(std::move(out));
}

std::string corpus_digest(const Corpus& c) {
  std::ostringstream os;
  write_corpus(os, c, CorpusFormat::jsonl);
  return sha256_hex(os.str());
}

}  // namespace synimp
