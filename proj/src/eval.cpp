#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rng.hpp"

namespace dret::eval {

namespace {

struct TurnResponse {
  std::size_t dialogue = 0;
  std::vector<int> ids;
  std::vector<std::string> tokens;
  corpus::Speaker speaker = corpus::Speaker::A;
};

}  // namespace

std::vector<std::vector<int>> EvalSample::options() const {
  std::vector<std::vector<int>> out;
  out.reserve(distractor_ids.size() + 1);
  std::size_t d = 0;
  for (std::size_t i = 0; i <= distractor_ids.size(); ++i) {
    if (i == truth_position) {
      out.push_back(truth_ids);
    } else {
      out.push_back(distractor_ids[d++]);
    }
  }
  return out;
}

std::vector<EvalSample> make_samples(const std::vector<corpus::Dialogue>& heldout,
                                     const SampleConfig& cfg) {
  if (cfg.n_options < 2) throw std::invalid_argument("make_samples: n must be >= 2");

  // turn-level response pool over the whole held-out set
  std::vector<TurnResponse> pool;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> dialogue_turns(heldout.size());
  for (std::size_t di = 0; di < heldout.size(); ++di) {
    dialogue_turns[di] = heldout[di].turns();
    for (const auto& [begin, end] : dialogue_turns[di]) {
      TurnResponse r;
      r.dialogue = di;
      r.speaker = heldout[di].utterances[begin].speaker;
      for (std::size_t u = begin; u < end; ++u) {
        const auto& utt = heldout[di].utterances[u];
        if (utt.word_ids.empty()) {
          throw std::invalid_argument("make_samples: dialogues must be encoded");
        }
        r.ids.insert(r.ids.end(), utt.word_ids.begin(), utt.word_ids.end());
        r.tokens.insert(r.tokens.end(), utt.tokens.begin(), utt.tokens.end());
      }
      pool.push_back(std::move(r));
    }
  }

  std::set<std::vector<std::string>> distinct;
  for (const auto& r : pool) distinct.insert(r.tokens);
  if (distinct.size() < cfg.n_options) {
    throw std::invalid_argument("make_samples: held-out set has fewer than n distinct responses");
  }

  Rng rng(cfg.seed);
  std::vector<EvalSample> samples;
  std::vector<std::size_t> eligible;
  std::size_t pool_cursor = 0;
  for (std::size_t di = 0; di < heldout.size(); ++di) {
    const auto& turns = dialogue_turns[di];
    for (std::size_t t = 0; t < turns.size(); ++t) {
      const TurnResponse& truth = pool[pool_cursor + t];
      if (t == 0) continue;  // needs at least one preceding turn

      EvalSample s;
      s.speaker = truth.speaker;
      s.truth_ids = truth.ids;
      s.truth_tokens = truth.tokens;
      for (std::size_t u = 0; u < turns[t].first; ++u) {
        s.context.push_back(heldout[di].utterances[u].word_ids);
      }

      eligible.clear();
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (cfg.exclude_same_dialogue && pool[i].dialogue == di) continue;
        if (!cfg.exclude_same_dialogue && i == pool_cursor + t) continue;
        if (pool[i].tokens == truth.tokens) continue;
        eligible.push_back(i);
      }
      const std::size_t need = cfg.n_options - 1;
      if (eligible.size() < need) {
        throw std::invalid_argument("make_samples: not enough distinct distractor responses");
      }
      for (std::size_t j = 0; j < need; ++j) {
        std::size_t pick = j + rng.index(eligible.size() - j);
        std::swap(eligible[j], eligible[pick]);
        s.distractor_ids.push_back(pool[eligible[j]].ids);
      }
      s.truth_position = rng.index(cfg.n_options);
      samples.push_back(std::move(s));
    }
    pool_cursor += turns.size();
  }
  return samples;
}

std::vector<std::size_t> rank_answers(const Vec& answer_embedding,
                                      const std::vector<Vec>& options) {
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(options.size());
  for (std::size_t i = 0; i < options.size(); ++i) {
    scored.emplace_back(cosine(answer_embedding, options[i]), i);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::size_t> out;
  out.reserve(scored.size());
  for (const auto& [score, idx] : scored) out.push_back(idx);
  return out;
}

RecallReport recall_at_k(const std::vector<EvalSample>& samples, const Embedder& embed,
                         const AnswerModel& model, std::string model_name,
                         std::vector<std::size_t> ks) {
  if (samples.empty()) throw std::invalid_argument("recall_at_k: no samples");
  std::sort(ks.begin(), ks.end());

  std::vector<std::size_t> hits(ks.size(), 0);
  for (const EvalSample& s : samples) {
    std::vector<std::vector<int>> option_ids = s.options();
    std::vector<Vec> option_embeddings;
    option_embeddings.reserve(option_ids.size());
    for (const auto& ids : option_ids) option_embeddings.push_back(embed(ids));

    Vec answer = model(s);
    std::vector<std::size_t> ranked = rank_answers(answer, option_embeddings);
    std::size_t rank = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      if (ranked[i] == s.truth_position) {
        rank = i + 1;
        break;
      }
    }
    for (std::size_t j = 0; j < ks.size(); ++j) {
      if (rank <= ks[j]) ++hits[j];
    }
  }

  RecallReport report;
  report.model = std::move(model_name);
  report.ks = ks;
  report.samples = samples.size();
  const double n = static_cast<double>(samples.size());
  for (std::size_t j = 0; j < ks.size(); ++j) {
    double p = static_cast<double>(hits[j]) / n;
    report.recall.push_back(p);
    report.half_width.push_back(1.96 * std::sqrt(p * (1.0 - p) / n));
  }
  return report;
}

std::vector<EvalSample> filter_by_speaker(std::vector<EvalSample> samples,
                                          corpus::Speaker speaker) {
  std::vector<EvalSample> out;
  out.reserve(samples.size());
  for (auto& s : samples) {
    if (s.speaker == speaker) out.push_back(std::move(s));
  }
  return out;
}

Embedder hred_embedder(const hred::HredParams& p) {
  return [&p](const std::vector<int>& ids) { return hred::encode_utterance(p, ids); };
}

AnswerModel generative_model(const hred::HredParams& p, const hred::GenerateConfig& gcfg) {
  return [&p, gcfg](const EvalSample& s) {
    std::vector<int> generated = hred::generate(p, s.context, gcfg);
    generated.push_back(corpus::Vocabulary::kEou);  // encode like a corpus utterance
    return hred::encode_utterance(p, generated);
  };
}

AnswerModel retrieval_model(const hred::HredParams& p, const rank::CandidateStore& store,
                            const lsh::LshForest& forest, const rank::RetrieveConfig& rcfg) {
  return [&p, &store, &forest, rcfg](const EvalSample& s) {
    std::vector<Vec> h;
    h.reserve(s.context.size());
    for (const auto& ids : s.context) h.push_back(hred::encode_utterance(p, ids));
    Vec c_q = hred::encode_context(p, h).back();
    std::vector<rank::RankedCandidate> ranked = rank::retrieve_and_rank(c_q, store, forest, rcfg);
    std::uint64_t id = ranked.empty() ? forest.query(c_q, 1).front() : ranked.front().id;
    return store.by_id(id).response_embedding;
  };
}

std::string format_report_table(const std::vector<RecallReport>& reports) {
  std::ostringstream out;
  char buf[64];
  out << "Model";
  if (!reports.empty()) {
    for (std::size_t k : reports.front().ks) out << "\tR@" << k;
  }
  out << "\n";
  for (const auto& r : reports) {
    out << r.model;
    for (std::size_t j = 0; j < r.ks.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.1f±%.1f", 100.0 * r.recall[j],
                    100.0 * r.half_width[j]);
      out << "\t" << buf;
    }
    out << "\n";
  }
  return out.str();
}

std::string format_report_kv(const RecallReport& report) {
  std::ostringstream out;
  char buf[64];
  out << "model\t" << report.model << "\n";
  out << "samples\t" << report.samples << "\n";
  for (std::size_t j = 0; j < report.ks.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.6f", report.recall[j]);
    out << "r_at_" << report.ks[j] << "\t" << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", report.half_width[j]);
    out << "r_at_" << report.ks[j] << "_ci\t" << buf << "\n";
  }
  return out.str();
}

}  // namespace dret::eval
