#include "r2f/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "r2f/error.hpp"
#include "r2f/io.hpp"
#include "r2f/text.hpp"

namespace r2f {
namespace {

using nlohmann::json;

std::string lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string required_string(const json& record, const std::string& field, std::size_t line) {
  const auto it = record.find(field);
  if (it == record.end() || it->is_null()) throw ParseError(line, "missing field '" + field + "'");
  if (!it->is_string()) throw ParseError(line, "field '" + field + "' is not a string");
  return it->get<std::string>();
}

Label label_from_json(const json& value, std::size_t line) {
  try {
    if (value.is_string()) return parse_label(value.get<std::string>());
    if (value.is_boolean()) return value.get<bool>() ? Label::kEntailment : Label::kNotEntailment;
    if (value.is_number_integer()) {
      const auto v = value.get<long>();
      if (v == 1) return Label::kEntailment;
      if (v == 0) return Label::kNotEntailment;
    }
  } catch (const Error& e) {
    throw ParseError(line, e.what());
  }
  throw ParseError(line, "unrecognized label " + value.dump());
}

DocPair pair_from_json(const json& record, const FieldMapping& fields, std::size_t line) {
  if (!record.is_object()) throw ParseError(line, "record is not a JSON object");
  DocPair pair;
  pair.id = required_string(record, fields.id, line);
  pair.hypothesis = required_string(record, fields.hypothesis, line);
  pair.premise = required_string(record, fields.premise, line);
  if (trim(pair.id).empty()) {
    throw Error(ErrorCode::kEmptyField, "line " + std::to_string(line) + ": empty id");
  }
  if (normalize_for_substring(pair.hypothesis).empty()) {
    throw Error(ErrorCode::kEmptyField, "line " + std::to_string(line) + ": empty hypothesis");
  }
  if (normalize_for_substring(pair.premise).empty()) {
    throw Error(ErrorCode::kEmptyField, "line " + std::to_string(line) + ": empty premise");
  }
  const auto it = record.find(fields.label);
  if (it != record.end() && !it->is_null()) pair.label = label_from_json(*it, line);
  return pair;
}

json pair_to_json(const DocPair& pair, const FieldMapping& fields) {
  json record = json::object();
  record[fields.id] = pair.id;
  record[fields.hypothesis] = pair.hypothesis;
  record[fields.premise] = pair.premise;
  if (pair.label) record[fields.label] = to_string(*pair.label);
  return record;
}

template <typename Fn>
void for_each_record(std::string_view content, Fn&& fn) {
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  for (auto& line : split(content, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    const std::string id = fn(record, line_no);
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "line " + std::to_string(line_no) + ": duplicate id '" + id + "'");
    }
  }
}

}  // namespace

std::string to_string(Label label) {
  return label == Label::kEntailment ? "entailment" : "not_entailment";
}

Label parse_label(std::string_view text) {
  const std::string v = lower_ascii(trim(text));
  if (v == "entailment" || v == "entailed") return Label::kEntailment;
  if (v == "not_entailment" || v == "not entailment" || v == "not-entailment") {
    return Label::kNotEntailment;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown label '" + std::string(text) + "'");
}

std::vector<DocPair> parse_pairs(std::string_view content, const FieldMapping& fields) {
  std::vector<DocPair> pairs;
  for_each_record(content, [&](const json& record, std::size_t line) {
    pairs.push_back(pair_from_json(record, fields, line));
    return pairs.back().id;
  });
  return pairs;
}

std::vector<DocPair> load_pairs(const std::string& path, const FieldMapping& fields) {
  return parse_pairs(read_file(path), fields);
}

std::string serialize_pairs(const std::vector<DocPair>& pairs, const FieldMapping& fields) {
  std::string out;
  for (const auto& pair : pairs) {
    out += pair_to_json(pair, fields).dump();
    out += '\n';
  }
  return out;
}

void save_pairs(const std::vector<DocPair>& pairs, const std::string& path,
                const FieldMapping& fields) {
  write_file_atomic(path, serialize_pairs(pairs, fields));
}

void AnnotatedSample::validate(std::size_t premise_sentence_count) const {
  const auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kValidation, "annotation '" + pair.id + "': " + what);
  };
  bool all_entailed = true;
  for (std::size_t s = 0; s < hypothesis_sentences.size(); ++s) {
    const auto& sentence = hypothesis_sentences[s];
    all_entailed = all_entailed && is_entailment(sentence.label);
    if (is_entailment(sentence.label) && sentence.evidence_groups.empty()) {
      fail("entailed sentence " + std::to_string(s) + " has no evidence group");
    }
    for (const auto& group : sentence.evidence_groups) {
      if (group.empty()) fail("sentence " + std::to_string(s) + " has an empty evidence group");
      for (std::size_t index : group) {
        if (index >= premise_sentence_count) {
          fail("evidence index " + std::to_string(index) + " outside premise of " +
               std::to_string(premise_sentence_count) + " sentences");
        }
      }
    }
  }
  if (pair.label && is_entailment(*pair.label) && !all_entailed) {
    fail("entailed document contains a non-entailed sentence");
  }
}

std::vector<AnnotatedSample> parse_annotations(std::string_view content,
                                               const FieldMapping& fields) {
  std::vector<AnnotatedSample> samples;
  for_each_record(content, [&](const json& record, std::size_t line) {
    AnnotatedSample sample;
    sample.pair = pair_from_json(record, fields, line);
    const auto it = record.find("hypothesis_sentences");
    if (it == record.end() || !it->is_array()) {
      throw ParseError(line, "missing array 'hypothesis_sentences'");
    }
    for (const auto& item : *it) {
      if (!item.is_object()) throw ParseError(line, "hypothesis sentence is not an object");
      AnnotatedSentence sentence;
      sentence.text = required_string(item, "text", line);
      const auto label = item.find("label");
      if (label == item.end()) throw ParseError(line, "hypothesis sentence without label");
      sentence.label = label_from_json(*label, line);
      const auto groups = item.find("evidence_groups");
      if (groups != item.end() && !groups->is_null()) {
        try {
          sentence.evidence_groups = groups->get<std::vector<std::vector<std::size_t>>>();
        } catch (const json::exception&) {
          throw ParseError(line, "evidence_groups must be a list of index lists");
        }
      }
      sample.hypothesis_sentences.push_back(std::move(sentence));
    }
    const std::size_t premise_sentences = split_sentences(sample.pair.premise).size();
    try {
      sample.validate(premise_sentences);
    } catch (const Error& e) {
      throw ParseError(line, e.what());
    }
    samples.push_back(std::move(sample));
    return samples.back().pair.id;
  });
  return samples;
}

std::vector<AnnotatedSample> load_annotations(const std::string& path, const FieldMapping& fields) {
  return parse_annotations(read_file(path), fields);
}

std::string serialize_annotations(const std::vector<AnnotatedSample>& samples,
                                  const FieldMapping& fields) {
  std::string out;
  for (const auto& sample : samples) {
    json record = pair_to_json(sample.pair, fields);
    json sentences = json::array();
    for (const auto& s : sample.hypothesis_sentences) {
      sentences.push_back({{"text", s.text},
                           {"label", to_string(s.label)},
                           {"evidence_groups", s.evidence_groups}});
    }
    record["hypothesis_sentences"] = std::move(sentences);
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::size_t pair_word_count(const DocPair& pair) {
  return tokenize(pair.hypothesis).size() + tokenize(pair.premise).size();
}

std::vector<std::string> DatasetStats::bucket_names() const {
  std::vector<std::string> names;
  if (edges.empty()) return {"all"};
  names.push_back("<" + std::to_string(edges.front()));
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    names.push_back(std::to_string(edges[i]) + "-" + std::to_string(edges[i + 1]));
  }
  names.push_back(">=" + std::to_string(edges.back()));
  return names;
}

DatasetStats dataset_stats(const std::vector<DocPair>& pairs, std::vector<std::size_t> edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  DatasetStats stats;
  stats.edges = edges;
  stats.histogram.assign(edges.size() + 1, 0);
  stats.total = pairs.size();
  double word_sum = 0.0;
  for (const auto& pair : pairs) {
    if (!pair.label) {
      ++stats.unlabeled;
    } else if (is_entailment(*pair.label)) {
      ++stats.entailment;
    } else {
      ++stats.not_entailment;
    }
    const std::size_t words = pair_word_count(pair);
    word_sum += static_cast<double>(words);
    const auto bucket = std::upper_bound(edges.begin(), edges.end(), words) - edges.begin();
    ++stats.histogram[static_cast<std::size_t>(bucket)];
    stats.over_500_words += words > 500;
    stats.over_1000_words += words > 1000;
  }
  stats.mean_words = pairs.empty() ? 0.0 : word_sum / static_cast<double>(pairs.size());
  return stats;
}

std::string DatasetStats::to_text() const {
  std::ostringstream out;
  const auto share = [&](std::size_t n) {
    return total == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(total);
  };
  out << "total=" << total << '\n';
  out << "entailment=" << entailment << '\n';
  out << "not_entailment=" << not_entailment << '\n';
  out << "unlabeled=" << unlabeled << '\n';
  out << "mean_words=" << format_double(mean_words) << '\n';
  out << "share_over_500_words=" << format_double(share(over_500_words)) << '\n';
  out << "share_over_1000_words=" << format_double(share(over_1000_words)) << '\n';
  const auto names = bucket_names();
  for (std::size_t b = 0; b < histogram.size(); ++b) {
    out << "words[" << names[b] << "]=" << histogram[b] << '\n';
  }
  return out.str();
}

}  // namespace r2f
