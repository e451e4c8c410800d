#include "topbin/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "topbin/binning.hpp"
#include "topbin/evaluation.hpp"

namespace topbin {

using ordered_json = nlohmann::ordered_json;

std::string csv_format_name(CsvFormat format) {
  switch (format) {
    case CsvFormat::ScoresCsv: return "scores";
    case CsvFormat::ScalarCsv: return "scalar";
    case CsvFormat::EnsembleCsv: return "ensemble";
  }
  return "scores";
}

CsvFormat csv_format_from_name(const std::string& name) {
  if (name == "scores") return CsvFormat::ScoresCsv;
  if (name == "scalar") return CsvFormat::ScalarCsv;
  if (name == "ensemble") return CsvFormat::EnsembleCsv;
  throw Error(ErrorCode::InvalidArgument,
              "unknown input format '" + name + "'");
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& field, std::size_t line_no) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                           ": '" + field +
                                           "' is not a number");
  }
  return value;
}

long parse_long(const std::string& field, std::size_t line_no) {
  long value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                           ": '" + field +
                                           "' is not an integer");
  }
  return value;
}

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, ptr);
}

struct LineReader {
  std::ifstream stream;
  std::size_t line_no = 0;

  explicit LineReader(const std::filesystem::path& path)
      : stream(path, std::ios::binary) {
    if (!stream) {
      throw Error(ErrorCode::ParseError,
                  "cannot open '" + path.string() + "'");
    }
  }

  bool next(std::string& line) {
    if (!std::getline(stream, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    return true;
  }
};

void check_header(const std::vector<std::string>& fields,
                  const std::vector<std::string>& expected_prefix,
                  std::size_t score_offset) {
  for (std::size_t i = 0; i < expected_prefix.size(); ++i) {
    if (i >= fields.size() || fields[i] != expected_prefix[i]) {
      throw Error(ErrorCode::SchemaError,
                  "header is missing column '" + expected_prefix[i] + "'");
    }
  }
  for (std::size_t i = score_offset; i < fields.size(); ++i) {
    const std::string want = "s" + std::to_string(i - score_offset);
    if (fields[i] != want) {
      throw Error(ErrorCode::SchemaError,
                  "header is missing column '" + want + "'");
    }
  }
}

void check_row_width(const std::vector<std::string>& fields,
                     const std::vector<std::string>& header,
                     std::size_t line_no) {
  if (fields.size() < header.size()) {
    throw Error(ErrorCode::SchemaError,
                "line " + std::to_string(line_no) + ": missing column '" +
                    header[fields.size()] + "'");
  }
  if (fields.size() > header.size()) {
    throw Error(ErrorCode::SchemaError,
                "line " + std::to_string(line_no) + ": " +
                    std::to_string(fields.size() - header.size()) +
                    " extra column(s)");
  }
}

std::vector<PredictionRecord> ingest_scores(const std::filesystem::path& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) {
    throw Error(ErrorCode::SchemaError, "empty file, expected a header");
  }
  const auto header = split_fields(line);
  check_header(header, {"id", "label"}, 2);
  const std::size_t classes = header.size() - 2;
  if (classes < 2) {
    throw Error(ErrorCode::SchemaError, "header is missing column 's1'");
  }

  std::vector<PredictionRecord> records;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    check_row_width(fields, header, reader.line_no);
    PredictionRecord record;
    record.sample_id = fields[0];
    record.true_label = static_cast<int>(parse_long(fields[1], reader.line_no));
    record.scores.reserve(classes);
    for (std::size_t i = 2; i < fields.size(); ++i) {
      record.scores.push_back(parse_double(fields[i], reader.line_no));
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<PredictionRecord> ingest_ensemble(
    const std::filesystem::path& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) {
    throw Error(ErrorCode::SchemaError, "empty file, expected a header");
  }
  const auto header = split_fields(line);
  check_header(header, {"id", "label", "member"}, 3);
  const std::size_t classes = header.size() - 3;
  if (classes < 2) {
    throw Error(ErrorCode::SchemaError, "header is missing column 's1'");
  }

  struct Draft {
    int label = 0;
    std::map<long, std::vector<double>> members;  // keyed by member index
    std::size_t order = 0;
  };
  std::map<std::string, Draft> drafts;
  std::size_t next_order = 0;

  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    check_row_width(fields, header, reader.line_no);
    const std::string& id = fields[0];
    const int label = static_cast<int>(parse_long(fields[1], reader.line_no));
    const long member = parse_long(fields[2], reader.line_no);
    std::vector<double> scores;
    scores.reserve(classes);
    for (std::size_t i = 3; i < fields.size(); ++i) {
      scores.push_back(parse_double(fields[i], reader.line_no));
    }
    auto [it, inserted] = drafts.try_emplace(id);
    Draft& draft = it->second;
    if (inserted) {
      draft.label = label;
      draft.order = next_order++;
    } else if (draft.label != label) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(reader.line_no) + ": sample '" +
                      id + "' repeats with a different label");
    }
    if (!draft.members.emplace(member, std::move(scores)).second) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(reader.line_no) + ": sample '" +
                      id + "' repeats member " + std::to_string(member));
    }
  }

  std::vector<PredictionRecord> records(drafts.size());
  for (auto& [id, draft] : drafts) {
    PredictionRecord record;
    record.sample_id = id;
    record.true_label = draft.label;
    std::vector<std::vector<double>> members;
    members.reserve(draft.members.size());
    for (auto& [index, scores] : draft.members) {
      members.push_back(std::move(scores));
    }
    // Point prediction of an ensemble: the member mean.
    record.scores.assign(classes, 0.0);
    for (const auto& member : members) {
      for (std::size_t i = 0; i < member.size() && i < classes; ++i) {
        record.scores[i] += member[i];
      }
    }
    for (double& s : record.scores) {
      s /= static_cast<double>(members.size());
    }
    record.ensemble_scores = std::move(members);
    records[draft.order] = std::move(record);
  }
  return records;
}

}  // namespace

std::vector<PredictionRecord> ingest_records(const std::filesystem::path& path,
                                             CsvFormat format) {
  switch (format) {
    case CsvFormat::ScoresCsv: {
      auto records = ingest_scores(path);
      validate_records(records);
      return records;
    }
    case CsvFormat::EnsembleCsv: {
      auto records = ingest_ensemble(path);
      validate_records(records);
      return records;
    }
    case CsvFormat::ScalarCsv:
      throw Error(ErrorCode::InvalidArgument,
                  "scalar input carries no per-class records");
  }
  throw Error(ErrorCode::InvalidArgument, "unhandled format");
}

ScalarSeries ingest_scalar_csv(const std::filesystem::path& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) {
    throw Error(ErrorCode::SchemaError, "empty file, expected a header");
  }
  const auto header = split_fields(line);
  const std::vector<std::string> expected = {"id", "uncertainty", "correct"};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i >= header.size() || header[i] != expected[i]) {
      throw Error(ErrorCode::SchemaError,
                  "header is missing column '" + expected[i] + "'");
    }
  }
  if (header.size() > expected.size()) {
    throw Error(ErrorCode::SchemaError, "unexpected column '" +
                                            header[expected.size()] + "'");
  }

  ScalarSeries scalar;
  scalar.series.event_kind = EventKind{1};
  scalar.series.direction = Direction::HigherMoreConfident;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    check_row_width(fields, header, reader.line_no);
    const double u = parse_double(fields[1], reader.line_no);
    if (!std::isfinite(u)) {
      throw Error(ErrorCode::NonFiniteScore,
                  "line " + std::to_string(reader.line_no) + ": sample '" +
                      fields[0] + "' has a non-finite uncertainty");
    }
    const long correct = parse_long(fields[2], reader.line_no);
    if (correct != 0 && correct != 1) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(reader.line_no) +
                      ": 'correct' must be 0 or 1");
    }
    scalar.ids.push_back(fields[0]);
    scalar.series.uncertainties.push_back(u);
    scalar.series.outcomes.push_back(static_cast<std::uint8_t>(correct));
  }
  scalar.series.validate();
  return scalar;
}

void write_scalar_csv(const ScalarSeries& scalar,
                      const std::filesystem::path& path) {
  std::string out = "id,uncertainty,correct\n";
  for (std::size_t i = 0; i < scalar.series.size(); ++i) {
    out += scalar.ids[i];
    out += ',';
    out += format_double(scalar.series.uncertainties[i]);
    out += ',';
    out += scalar.series.outcomes[i] ? '1' : '0';
    out += '\n';
  }
  write_file_atomic(path, out);
}

namespace {

ordered_json edges_to_json(const std::vector<double>& edges) {
  ordered_json arr = ordered_json::array();
  for (double e : edges) {
    if (std::isinf(e)) {
      arr.push_back(e > 0 ? "inf" : "-inf");
    } else {
      arr.push_back(e);
    }
  }
  return arr;
}

double edge_from_json(const ordered_json& value) {
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::ParseError, "bad edge value '" + s + "'");
  }
  return value.get<double>();
}

ordered_json terms_to_json(const ScoreTerms& terms) {
  return ordered_json{{"uncertainty", terms.uncertainty},
                      {"resolution", terms.resolution},
                      {"calibration_error", terms.calibration_error}};
}

ordered_json scores_to_json(const Scores& scores) {
  return ordered_json{{"brier", scores.brier},
                      {"nll", scores.nll},
                      {"ece", scores.ece},
                      {"eor", scores.eor},
                      {"auroc", scores.auroc},
                      {"brier_terms", terms_to_json(scores.brier_terms)},
                      {"nll_terms", terms_to_json(scores.nll_terms)}};
}

}  // namespace

std::string bin_model_to_json(const BinModel& model) {
  ordered_json doc;
  doc["edges"] = edges_to_json(model.edges);
  doc["probs"] = model.probs;
  doc["raw_probs"] = model.raw_probs;
  doc["weights"] = model.weights;
  doc["counts"] = model.counts;
  doc["accuracy"] = model.accuracy;
  doc["measure"] = model.measure;
  doc["event_kind"] = "top" + std::to_string(model.event_kind.k);
  doc["regularized"] = model.regularized;
  return doc.dump(2) + "\n";
}

BinModel bin_model_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  try {
    BinModel model;
    for (const auto& edge : doc.at("edges")) {
      model.edges.push_back(edge_from_json(edge));
    }
    model.probs = doc.at("probs").get<std::vector<double>>();
    model.raw_probs = doc.at("raw_probs").get<std::vector<double>>();
    model.weights = doc.at("weights").get<std::vector<double>>();
    model.counts = doc.at("counts").get<std::vector<std::size_t>>();
    model.accuracy = doc.at("accuracy").get<double>();
    model.measure = doc.at("measure").get<std::string>();
    model.regularized = doc.at("regularized").get<bool>();
    const std::string kind = doc.at("event_kind").get<std::string>();
    int event_k = 0;
    const char* digits = kind.c_str() + 3;
    const char* digits_end = kind.c_str() + kind.size();
    const auto [ptr, ec] =
        kind.rfind("top", 0) == 0
            ? std::from_chars(digits, digits_end, event_k)
            : std::from_chars_result{digits, std::errc::invalid_argument};
    if (ec != std::errc() || ptr != digits_end || event_k < 1) {
      throw Error(ErrorCode::ParseError, "bad event_kind '" + kind + "'");
    }
    model.event_kind.k = event_k;
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, e.what());
  }
}

std::string score_report_to_json(const ScoreReport& report) {
  ordered_json doc = scores_to_json(report.overall);
  ordered_json folds = ordered_json::array();
  for (const auto& fold : report.folds) {
    folds.push_back(scores_to_json(fold));
  }
  doc["folds"] = std::move(folds);
  if (report.mean) doc["mean"] = scores_to_json(*report.mean);
  if (report.std_dev) doc["std"] = scores_to_json(*report.std_dev);
  doc["warnings"] = report.warnings;
  return doc.dump(2) + "\n";
}

std::string reliability_csv(const BinModel& train, const BinModel& test,
                            double delta) {
  if (train.edges != test.edges) {
    throw Error(ErrorCode::EdgeMismatch,
                "reliability data needs matching edges");
  }
  std::string out =
      "bin,lower_edge,upper_edge,weight,train_prob,test_prob,count,"
      "hoeffding_halfwidth\n";
  for (std::size_t i = 0; i < train.bin_count(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(train.edges[i]);
    out += ',';
    out += format_double(train.edges[i + 1]);
    out += ',';
    out += format_double(train.weights[i]);
    out += ',';
    out += format_double(train.probs[i]);
    out += ',';
    out += format_double(test.probs[i]);
    out += ',';
    out += std::to_string(train.counts[i]);
    out += ',';
    out += format_double(train.counts[i] > 0
                             ? hoeffding_half_width(train.counts[i], delta)
                             : std::numeric_limits<double>::infinity());
    out += '\n';
  }
  return out;
}

std::string suspects_csv(const std::vector<Suspect>& suspects) {
  std::string out = "id,bin,prob\n";
  for (const auto& suspect : suspects) {
    out += suspect.sample_id;
    out += ',';
    out += std::to_string(suspect.bin);
    out += ',';
    out += format_double(suspect.prob);
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream stream(tmp, std::ios::binary | std::ios::trunc);
    if (!stream) {
      throw Error(ErrorCode::ParseError,
                  "cannot write '" + tmp.string() + "'");
    }
    stream.write(contents.data(),
                 static_cast<std::streamsize>(contents.size()));
    stream.flush();
    if (!stream) {
      throw Error(ErrorCode::ParseError,
                  "short write to '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::ParseError, "cannot replace '" + path.string() +
                                           "': " + ec.message());
  }
}

}  // namespace topbin
