#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace dret {

// Everything the pipeline commands share. Loaded from a flat key-value
// text file ("key = value", '#' comments) and overridable per-flag.
struct PipelineConfig {
  // encoder/decoder dims
  std::size_t embed_dim = 64;
  std::size_t utt_hidden = 128;
  std::size_t ctx_hidden = 128;
  std::size_t dec_hidden = 128;
  // corpus
  int min_count = 10;
  std::size_t min_turns = 5;
  std::string delimiter = "__eou__";
  bool anonymize = true;
  bool split_punctuation = false;
  // training
  double learning_rate = 0.1;
  std::size_t epochs = 5;
  double grad_clip = 1.0;
  std::uint64_t train_seed = 1;
  // forest
  std::size_t trees = 10;
  std::size_t max_label_len = 32;
  std::uint64_t forest_seed = 1;
  // ranking
  std::string method = "AR";
  std::size_t candidates = 15;  // m
  std::size_t car_pool = 5;     // n
  // eval / generation
  std::size_t eval_options = 10;
  std::uint64_t eval_seed = 1;
  std::size_t beams = 5;
  std::size_t max_gen_len = 20;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
  // Sets one field by key; throws on unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  void load(std::istream& in);
  static PipelineConfig from_file(const std::string& path);
};

}  // namespace dret
