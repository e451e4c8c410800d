#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "topbin/types.hpp"

namespace topbin {

struct Suspect;

enum class CsvFormat {
  ScoresCsv,    // id,label,s0,...,s{K-1}
  ScalarCsv,    // id,uncertainty,correct
  EnsembleCsv,  // id,label,member,s0,...,s{K-1}
};

std::string csv_format_name(CsvFormat format);
CsvFormat csv_format_from_name(const std::string& name);

// ScoresCsv / EnsembleCsv ingestion. Ensemble rows with the same id form
// one record (ordered by member index); the record's point scores are the
// member mean. Throws ParseError with the 1-based line number or
// SchemaError naming the offending column.
std::vector<PredictionRecord> ingest_records(const std::filesystem::path& path,
                                             CsvFormat format);

struct ScalarSeries {
  std::vector<std::string> ids;
  EventSeries series;
};

// ScalarCsv ingestion: a ready-made (uncertainty, outcome) series.
ScalarSeries ingest_scalar_csv(const std::filesystem::path& path);

// Emission uses shortest round-trip formatting, so emit -> ingest -> emit
// is byte-identical.
void write_scalar_csv(const ScalarSeries& scalar,
                      const std::filesystem::path& path);

std::string bin_model_to_json(const BinModel& model);
BinModel bin_model_from_json(const std::string& text);

std::string score_report_to_json(const ScoreReport& report);

// Reliability diagram data: one row per bin,
// bin,lower_edge,upper_edge,weight,train_prob,test_prob,count,hoeffding_halfwidth
std::string reliability_csv(const BinModel& train, const BinModel& test,
                            double delta);

std::string suspects_csv(const std::vector<Suspect>& suspects);

// Write via temp file + rename so readers never observe partial output.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

}  // namespace topbin
