#include "corpus.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace dret::corpus {

namespace {

std::string to_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_digit_run(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

bool is_punct_char(char c) {
  static const std::string punct = ".,!?;:()[]\"'";
  return punct.find(c) != std::string::npos;
}

std::vector<std::string> whitespace_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

void split_punct(std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    std::string cur;
    for (char c : t) {
      if (is_punct_char(c)) {
        if (!cur.empty()) out.push_back(cur);
        out.push_back(std::string(1, c));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(cur);
  }
  tokens = std::move(out);
}

// Recognized leading speaker tags. Returns true and sets `s` if `tok` is one.
bool speaker_from_tag(const std::string& tok, Speaker& s) {
  if (tok == "A:") { s = Speaker::A; return true; }
  if (tok == "B:") { s = Speaker::B; return true; }
  std::string low = to_lower(tok);
  if (low == "<customer>") { s = Speaker::A; return true; }
  if (low == "<assistant>") { s = Speaker::B; return true; }
  return false;
}

std::vector<std::string> split_on_delimiter(const std::string& line, const std::string& delim) {
  std::vector<std::string> chunks;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t hit = line.find(delim, pos);
    if (hit == std::string::npos) {
      chunks.push_back(line.substr(pos));
      break;
    }
    chunks.push_back(line.substr(pos, hit - pos));
    pos = hit + delim.size();
  }
  return chunks;
}

}  // namespace

const char* speaker_tag(Speaker s) { return s == Speaker::A ? "A" : "B"; }

std::vector<std::pair<std::size_t, std::size_t>> Dialogue::turns() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= utterances.size(); ++i) {
    if (i == utterances.size() || utterances[i].speaker != utterances[begin].speaker) {
      out.emplace_back(begin, i);
      begin = i;
    }
  }
  return out;
}

std::size_t Dialogue::turn_count() const { return turns().size(); }

ParseResult parse_corpus(std::istream& in, const ParseOptions& opt) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;  // blank line

    Dialogue d;
    Speaker prev = Speaker::B;  // first untagged utterance becomes A
    for (const std::string& chunk : split_on_delimiter(line, opt.delimiter)) {
      std::vector<std::string> toks = whitespace_tokens(chunk);
      Speaker sp;
      if (!toks.empty() && speaker_from_tag(toks.front(), sp)) {
        toks.erase(toks.begin());
      } else {
        sp = prev == Speaker::A ? Speaker::B : Speaker::A;
      }
      if (opt.split_punctuation) split_punct(toks);
      if (toks.empty()) continue;
      Utterance u;
      u.speaker = sp;
      u.tokens = std::move(toks);
      d.utterances.push_back(std::move(u));
      prev = sp;
    }
    if (d.utterances.empty()) {
      std::cerr << "warning: skipped malformed record at line " << line_no << "\n";
      ++result.skipped_records;
      continue;
    }
    result.dialogues.push_back(std::move(d));
  }
  return result;
}

AnonymizeRules AnonymizeRules::defaults() {
  AnonymizeRules r;
  r.digits_to_number = true;
  for (const char* m : {"january", "february", "march", "april", "may", "june", "july",
                        "august", "september", "october", "november", "december"}) {
    r.words.emplace(m, "<month>");
  }
  return r;
}

std::vector<std::string> anonymize(const std::vector<std::string>& tokens,
                                   const AnonymizeRules& rules) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    for (const auto& rule : rules.sequences) {
      if (rule.pattern.empty() || i + rule.pattern.size() > tokens.size()) continue;
      bool ok = true;
      for (std::size_t j = 0; j < rule.pattern.size(); ++j) {
        const std::string& pat = rule.pattern[j];
        if (pat != "*" && to_lower(pat) != to_lower(tokens[i + j])) {
          ok = false;
          break;
        }
      }
      if (ok) {
        out.push_back(rule.meta);
        i += rule.pattern.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;

    const std::string& tok = tokens[i];
    if (rules.digits_to_number && is_digit_run(tok)) {
      out.push_back("<number>");
    } else if (auto it = rules.words.find(to_lower(tok)); it != rules.words.end()) {
      out.push_back(it->second);
    } else {
      out.push_back(tok);
    }
    ++i;
  }
  return out;
}

void anonymize_dialogues(std::vector<Dialogue>& ds, const AnonymizeRules& rules) {
  for (auto& d : ds) {
    for (auto& u : d.utterances) u.tokens = anonymize(u.tokens, rules);
  }
}

std::vector<Dialogue> filter_dialogues(std::vector<Dialogue> ds, std::size_t min_turns) {
  std::vector<Dialogue> out;
  out.reserve(ds.size());
  for (auto& d : ds) {
    if (d.turn_count() >= min_turns) out.push_back(std::move(d));
  }
  return out;
}

int Vocabulary::lookup(const std::string& w) const {
  auto it = ids.find(w);
  return it == ids.end() ? kUnk : it->second;
}

Vocabulary build_vocabulary(const std::vector<Dialogue>& ds, int min_count) {
  if (min_count < 1) throw std::invalid_argument("build_vocabulary: min_count must be >= 1");

  std::unordered_map<std::string, std::uint64_t> freq;
  for (const auto& d : ds) {
    for (const auto& u : d.utterances) {
      for (const auto& t : u.tokens) ++freq[t];
    }
  }

  Vocabulary v;
  v.min_count = min_count;
  v.words = {"<pad>", "<unk>", "<eou>"};
  v.counts = {0, 0, 0};
  for (int i = 0; i < Vocabulary::kReserved; ++i) v.ids.emplace(v.words[i], i);

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  std::uint64_t dropped = 0;
  for (const auto& [word, count] : freq) {
    if (auto it = v.ids.find(word); it != v.ids.end()) {
      v.counts[it->second] += count;  // corpus word collides with a meta token
      continue;
    }
    if (count >= static_cast<std::uint64_t>(min_count)) {
      kept.emplace_back(word, count);
    } else {
      dropped += count;
    }
  }
  v.counts[Vocabulary::kUnk] += dropped;

  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (auto& [word, count] : kept) {
    v.ids.emplace(word, v.size());
    v.words.push_back(word);
    v.counts.push_back(count);
  }
  return v;
}

Dialogue encode_dialogue(Dialogue d, const Vocabulary& v) {
  for (auto& u : d.utterances) {
    u.word_ids.clear();
    u.word_ids.reserve(u.tokens.size() + 1);
    for (const auto& t : u.tokens) u.word_ids.push_back(v.lookup(t));
    u.word_ids.push_back(Vocabulary::kEou);
  }
  return d;
}

void encode_dialogues(std::vector<Dialogue>& ds, const Vocabulary& v) {
  for (auto& d : ds) d = encode_dialogue(std::move(d), v);
}

CorpusStats compute_stats(const std::vector<Dialogue>& ds, const Vocabulary&) {
  CorpusStats s;
  double unk_fraction_sum = 0.0;
  for (const auto& d : ds) {
    ++s.dialogues;
    s.turns += d.turn_count();
    s.utterances += d.utterances.size();
    std::uint64_t dialogue_words = 0;
    std::uint64_t dialogue_unks = 0;
    for (const auto& u : d.utterances) {
      if (u.word_ids.empty()) {
        throw std::logic_error("compute_stats: dialogues must be encoded first");
      }
      dialogue_words += u.tokens.size();
      for (std::size_t i = 0; i < u.tokens.size(); ++i) {
        if (u.word_ids[i] == Vocabulary::kUnk) ++dialogue_unks;
      }
    }
    s.words += dialogue_words;
    if (dialogue_words > 0) {
      unk_fraction_sum += static_cast<double>(dialogue_unks) / static_cast<double>(dialogue_words);
    }
  }
  if (s.dialogues > 0) {
    s.avg_words_per_dialogue = static_cast<double>(s.words) / static_cast<double>(s.dialogues);
    s.avg_turns_per_dialogue = static_cast<double>(s.turns) / static_cast<double>(s.dialogues);
    s.avg_utterances_per_dialogue =
        static_cast<double>(s.utterances) / static_cast<double>(s.dialogues);
    s.unknown_rate = unk_fraction_sum / static_cast<double>(s.dialogues);
  }
  if (s.turns > 0) s.avg_words_per_turn = static_cast<double>(s.words) / static_cast<double>(s.turns);
  if (s.utterances > 0) {
    s.avg_words_per_utterance = static_cast<double>(s.words) / static_cast<double>(s.utterances);
  }
  return s;
}

std::string format_stats(const CorpusStats& s) {
  char buf[64];
  std::ostringstream out;
  out << "Total # of dialogues\t" << s.dialogues << "\n";
  out << "Total # of turns\t" << s.turns << "\n";
  out << "Total # of utterances\t" << s.utterances << "\n";
  out << "Total # of words\t" << s.words << "\n";
  auto avg = [&](const char* name, double value) {
    std::snprintf(buf, sizeof(buf), "%.3f", value);
    out << name << "\t" << buf << "\n";
  };
  avg("Avg. # of words per dialogue", s.avg_words_per_dialogue);
  avg("Avg. # of turns per dialogue", s.avg_turns_per_dialogue);
  avg("Avg. # of words per turn", s.avg_words_per_turn);
  avg("Avg. # of utterances per dialogue", s.avg_utterances_per_dialogue);
  avg("Avg. % of unknowns per dialogue", 100.0 * s.unknown_rate);
  return out.str();
}

}  // namespace dret::corpus
