#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dret::corpus {

enum class Speaker : std::uint8_t { A = 0, B = 1 };

const char* speaker_tag(Speaker s);  // "A" / "B"

struct Utterance {
  Speaker speaker = Speaker::A;
  std::vector<std::string> tokens;  // nonempty
  // Vocabulary ids, filled by encode_dialogue. One id per token plus a
  // trailing end-of-utterance id.
  std::vector<int> word_ids;
};

struct Dialogue {
  std::vector<Utterance> utterances;

  // Turns are maximal runs of consecutive same-speaker utterances,
  // returned as [begin, end) index ranges.
  std::vector<std::pair<std::size_t, std::size_t>> turns() const;
  std::size_t turn_count() const;
};

struct ParseOptions {
  std::string delimiter = "__eou__";
  bool split_punctuation = false;
};

struct ParseResult {
  std::vector<Dialogue> dialogues;
  std::size_t skipped_records = 0;
};

// One dialogue per line; utterances separated by the delimiter. An
// utterance may start with a speaker tag ("A:", "B:", "<customer>",
// "<assistant>"); untagged utterances alternate from the previous
// speaker. Records that yield no utterances are skipped and counted.
ParseResult parse_corpus(std::istream& in, const ParseOptions& opt = {});

struct AnonymizeRules {
  // Multi-token rule: a sequence of patterns collapses into one meta
  // token. A pattern entry is a literal token or "*" (any token).
  struct SequenceRule {
    std::vector<std::string> pattern;
    std::string meta;
  };
  std::vector<SequenceRule> sequences;
  // word -> meta token, exact match (case-insensitive)
  std::unordered_map<std::string, std::string> words;
  bool digits_to_number = true;  // digit runs -> <number>

  static AnonymizeRules defaults();
};

// Sequence rules apply first (greedy, left to right); then per-token
// rules, which preserve sequence length.
std::vector<std::string> anonymize(const std::vector<std::string>& tokens,
                                   const AnonymizeRules& rules);

void anonymize_dialogues(std::vector<Dialogue>& ds, const AnonymizeRules& rules);

// Keeps dialogues with turn count >= min_turns, in order. Idempotent.
std::vector<Dialogue> filter_dialogues(std::vector<Dialogue> ds, std::size_t min_turns);

struct Vocabulary {
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kEou = 2;
  static constexpr int kReserved = 3;

  std::vector<std::string> words;         // id -> word
  std::vector<std::uint64_t> counts;      // id -> corpus frequency
  std::unordered_map<std::string, int> ids;
  int min_count = 1;

  int size() const { return static_cast<int>(words.size()); }
  // id for w, or kUnk when w was not kept
  int lookup(const std::string& w) const;
};

// Kept set = words with frequency >= min_count plus the reserved meta
// tokens. Ids are assigned by descending count, ties lexicographically.
// The <unk> count records the total occurrences that were dropped.
Vocabulary build_vocabulary(const std::vector<Dialogue>& ds, int min_count);

// Fills word_ids: kept words map to their id, others to <unk>, and the
// end-of-utterance id is appended to every utterance.
Dialogue encode_dialogue(Dialogue d, const Vocabulary& v);
void encode_dialogues(std::vector<Dialogue>& ds, const Vocabulary& v);

struct CorpusStats {
  std::uint64_t dialogues = 0;
  std::uint64_t turns = 0;
  std::uint64_t utterances = 0;
  std::uint64_t words = 0;
  double avg_words_per_dialogue = 0.0;
  double avg_turns_per_dialogue = 0.0;
  double avg_words_per_turn = 0.0;
  double avg_utterances_per_dialogue = 0.0;
  double avg_words_per_utterance = 0.0;
  // mean over dialogues of (#<unk> tokens / #tokens), in [0, 1]
  double unknown_rate = 0.0;
};

// Dialogues must be encoded (unknown_rate counts <unk> ids).
CorpusStats compute_stats(const std::vector<Dialogue>& ds, const Vocabulary& v);

// Key-value report, one "name<TAB>value" line per statistic.
std::string format_stats(const CorpusStats& s);

}  // namespace dret::corpus
