#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "hred.hpp"
#include "lsh_forest.hpp"
#include "ranking.hpp"
#include "vec.hpp"

namespace dret::eval {

// One Recall@k trial: the turns before a target turn form the context,
// the target turn is the truth, and n-1 distractor responses are drawn
// from other turns of the held-out set.
struct EvalSample {
  std::vector<std::vector<int>> context;  // encoded utterances before the turn
  std::vector<int> truth_ids;
  std::vector<std::string> truth_tokens;
  std::vector<std::vector<int>> distractor_ids;
  std::size_t truth_position = 0;  // index of the truth among the options
  corpus::Speaker speaker = corpus::Speaker::A;

  // n option id-sequences with the truth at truth_position
  std::vector<std::vector<int>> options() const;
};

struct SampleConfig {
  std::size_t n_options = 10;
  std::uint64_t seed = 1;
  // distractors never come from the truth's own dialogue when set
  bool exclude_same_dialogue = true;
};

// One sample per turn with at least one preceding turn. Distractors are
// drawn uniformly without replacement from the held-out turn responses,
// never textually identical to the truth. Deterministic under the seed.
std::vector<EvalSample> make_samples(const std::vector<corpus::Dialogue>& heldout,
                                     const SampleConfig& cfg);

// Option indices sorted by descending cosine to the answer embedding,
// ties broken by lower option index.
std::vector<std::size_t> rank_answers(const Vec& answer_embedding,
                                      const std::vector<Vec>& options);

struct RecallReport {
  std::string model;
  std::vector<std::size_t> ks;
  std::vector<double> recall;      // hit ratio per k
  std::vector<double> half_width;  // 1.96 sqrt(p(1-p)/N)
  std::size_t samples = 0;
};

// Turns an encoded utterance into its embedding.
using Embedder = std::function<Vec(const std::vector<int>&)>;
// Produces the model's answer embedding for a sample's context.
using AnswerModel = std::function<Vec(const EvalSample&)>;

RecallReport recall_at_k(const std::vector<EvalSample>& samples, const Embedder& embed,
                         const AnswerModel& model, std::string model_name,
                         std::vector<std::size_t> ks = {1, 2, 5});

// Keeps samples whose truth turn belongs to the given speaker.
std::vector<EvalSample> filter_by_speaker(std::vector<EvalSample> samples,
                                          corpus::Speaker speaker);

Embedder hred_embedder(const hred::HredParams& p);

// Beam-search generation re-encoded by the utterance encoder. The
// referenced params must outlive the returned callable.
AnswerModel generative_model(const hred::HredParams& p, const hred::GenerateConfig& gcfg);

// Top-ranked retrieved candidate's response embedding. Falls back to the
// forest's single best hit if every candidate was excluded as a duplicate
// of the query context.
AnswerModel retrieval_model(const hred::HredParams& p, const rank::CandidateStore& store,
                            const lsh::LshForest& forest, const rank::RetrieveConfig& rcfg);

std::string format_report_table(const std::vector<RecallReport>& reports);
std::string format_report_kv(const RecallReport& report);

}  // namespace dret::eval
