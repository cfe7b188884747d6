#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "hred.hpp"
#include "lsh_forest.hpp"
#include "ranking.hpp"
#include "vec.hpp"

namespace dret::io {

// Binary layouts share one scheme: 8-byte magic, u32 format version, a
// config echo, then little-endian payloads. Embedding payloads are 32-bit
// floats, widened to double on load.

void write_checkpoint(std::ostream& out, const hred::HredParams& p);
hred::HredParams read_checkpoint(std::istream& in);  // throws "bad checkpoint header"

void write_store(std::ostream& out, const rank::CandidateStore& store);
rank::CandidateStore read_store(std::istream& in);

// The forest file stores seed, l, k_m, hyperplanes and trie structure;
// record vectors live in the store file and are passed back in on load.
void write_forest(std::ostream& out, const lsh::LshForest& forest);
lsh::LshForest read_forest(std::istream& in, std::map<std::uint64_t, Vec> records);

// "word<TAB>count" per line, in id order.
void write_vocabulary(std::ostream& out, const corpus::Vocabulary& v);
corpus::Vocabulary read_vocabulary(std::istream& in);

// One dialogue per line, speaker-tagged utterances separated by the
// delimiter; parses back to the identical dialogue list.
void write_corpus(std::ostream& out, const std::vector<corpus::Dialogue>& ds,
                  const std::string& delimiter);

// convenience file wrappers; throw std::runtime_error on open failure
void save_file(const std::string& path, const std::string& text);
void append_file(const std::string& path, const std::string& text);
std::string load_file(const std::string& path);

}  // namespace dret::io
