#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "corpus.hpp"
#include "eval.hpp"
#include "ranking.hpp"

namespace dret::pipeline {

// artifact names under the ingest output directory
inline constexpr const char* kCorpusFile = "corpus.txt";
inline constexpr const char* kVocabFile = "vocab.tsv";
inline constexpr const char* kStatsFile = "stats.txt";

struct IngestResult {
  std::size_t parsed = 0;
  std::size_t skipped = 0;
  std::size_t kept = 0;  // after the turn filter
  int vocab_size = 0;
  corpus::CorpusStats stats;
};

// parse -> anonymize -> min-turn filter -> vocabulary -> encode -> stats;
// writes corpus.txt / vocab.tsv / stats.txt under outdir.
IngestResult cmd_ingest(const std::string& input_path, const std::string& outdir,
                        const PipelineConfig& cfg);

struct TrainOutcome {
  std::vector<double> epoch_loss;
};

TrainOutcome cmd_train(const std::string& corpus_path, const std::string& vocab_path,
                       const std::string& checkpoint_path, const std::string& trace_path,
                       const PipelineConfig& cfg);

struct IndexOutcome {
  std::size_t records = 0;
};

IndexOutcome cmd_index(const std::string& checkpoint_path, const std::string& corpus_path,
                       const std::string& vocab_path, const std::string& store_path,
                       const std::string& forest_path, const PipelineConfig& cfg);

struct QueryHit {
  double score = 0.0;
  std::string response;
};

std::vector<QueryHit> cmd_query(const std::string& store_path, const std::string& forest_path,
                                const std::string& checkpoint_path, const std::string& vocab_path,
                                const std::string& context_text, const PipelineConfig& cfg);

// modes: any of "generative", "CR", "AR", "CAR". Writes one combined
// table to report_path and one key-value file per mode under
// kv_prefix + mode + ".kv" (either may be empty to skip writing).
// speaker: "", "A" or "B" restricts samples to that speaker's responses.
std::vector<eval::RecallReport> cmd_eval(const std::string& store_path,
                                         const std::string& forest_path,
                                         const std::string& checkpoint_path,
                                         const std::string& vocab_path,
                                         const std::string& heldout_path,
                                         const std::vector<std::string>& modes,
                                         const PipelineConfig& cfg,
                                         const std::string& report_path,
                                         const std::string& kv_prefix,
                                         const std::string& speaker = "");

// Table-I style statistics; reuses an existing vocabulary when given so
// unknown rates reflect it, otherwise builds one from the input.
corpus::CorpusStats cmd_stats(const std::string& input_path, const std::string& vocab_path,
                              const PipelineConfig& cfg);

// raw corpus file -> dialogues; preprocess applies anonymization and the
// min-turn filter (ingest output is already preprocessed)
std::vector<corpus::Dialogue> load_corpus_file(const std::string& path,
                                               const PipelineConfig& cfg, bool preprocess);

}  // namespace dret::pipeline
