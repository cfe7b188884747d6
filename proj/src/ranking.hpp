#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "hred.hpp"
#include "lsh_forest.hpp"
#include "vec.hpp"

namespace dret::rank {

enum class Method { CR, AR, CAR };

Method parse_method(const std::string& name);  // throws on unknown name
const char* method_name(Method m);

struct CandidateRecord {
  std::uint64_t id = 0;
  Vec context_embedding;   // context preceding the response
  Vec response_embedding;  // the response utterance itself
  std::vector<std::string> response_text;
};

struct RankedCandidate {
  std::uint64_t id = 0;
  double score = 0.0;  // higher is better
  Method method = Method::CR;
};

struct CandidateStore {
  std::vector<CandidateRecord> records;  // ids are dense indices into this
  const CandidateRecord& by_id(std::uint64_t id) const;
};

// One record per (context prefix, next utterance): for every encoded
// dialogue and every utterance after the first, the context embedding of
// everything before it and its own utterance embedding. Embeddings are
// rounded through 32-bit floats so the in-memory store is bit-identical
// to its serialized form. Throws if no dialogue yields a record.
CandidateStore build_store(const hred::HredParams& p,
                           const std::vector<corpus::Dialogue>& dialogues);

// Indexes every record's context embedding.
lsh::LshForest build_forest(const CandidateStore& store, const lsh::ForestConfig& cfg);

// Context relevance: cosine between each candidate's context and the
// query context.
std::vector<RankedCandidate> score_cr(const Vec& c_q,
                                      const std::vector<CandidateRecord>& candidates);

// Answer relevance: mean cosine between a candidate's response and every
// candidate response. The self term is a constant 1/k shift, so rankings
// are identical either way; include_self follows the formula as printed.
std::vector<RankedCandidate> score_ar(const std::vector<CandidateRecord>& candidates,
                                      bool include_self = true);

// Combined: mean response cosine against the pool of the `pool` most
// context-relevant candidates. Requires 1 <= pool <= candidate count.
std::vector<RankedCandidate> score_car(const Vec& c_q,
                                       const std::vector<CandidateRecord>& candidates,
                                       std::size_t pool);

struct RetrieveConfig {
  Method method = Method::AR;
  std::size_t budget = 15;   // candidates fetched from the forest
  std::size_t car_pool = 5;  // CAR pool size, clamped to the fetched count
};

// Forest lookup, duplicate-context exclusion (cosine >= 1 - 1e-9 to the
// query), then the configured scorer. May return fewer than budget
// entries; empty only if every fetched candidate was a duplicate.
std::vector<RankedCandidate> retrieve_and_rank(const Vec& c_q, const CandidateStore& store,
                                               const lsh::LshForest& forest,
                                               const RetrieveConfig& cfg);

}  // namespace dret::rank
