#include "serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dret::io {

namespace {

constexpr std::uint32_t kVersion = 1;
constexpr char kCkptMagic[9] = "DRETCKPT";
constexpr char kStoreMagic[9] = "DRETSTOR";
constexpr char kForestMagic[9] = "DRETFRST";

void put_bytes(std::ostream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void get_bytes(std::istream& in, void* p, std::size_t n, const char* what) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw std::runtime_error(std::string("unexpected end of file reading ") + what);
  }
}

void put_u8(std::ostream& out, std::uint8_t v) { put_bytes(out, &v, 1); }

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<unsigned char, 4> b;
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(out, b.data(), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<unsigned char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(out, b.data(), 8);
}

void put_f32(std::ostream& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

std::uint8_t get_u8(std::istream& in, const char* what) {
  std::uint8_t v;
  get_bytes(in, &v, 1, what);
  return v;
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> b;
  get_bytes(in, b.data(), 4, what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in, const char* what) {
  std::array<unsigned char, 8> b;
  get_bytes(in, b.data(), 8, what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f32(std::istream& in, const char* what) {
  return static_cast<double>(std::bit_cast<float>(get_u32(in, what)));
}

void put_f32_vec(std::ostream& out, const Vec& v) {
  for (double x : v) put_f32(out, x);
}

Vec get_f32_vec(std::istream& in, std::size_t n, const char* what) {
  Vec v(n);
  for (double& x : v) x = get_f32(in, what);
  return v;
}

void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  put_bytes(out, s.data(), s.size());
}

std::string get_string(std::istream& in, const char* what) {
  std::uint32_t n = get_u32(in, what);
  std::string s(n, '\0');
  if (n > 0) get_bytes(in, s.data(), n, what);
  return s;
}

void check_magic(std::istream& in, const char* magic, const char* diagnostic) {
  char buf[8];
  in.read(buf, 8);
  if (in.gcount() != 8 || std::memcmp(buf, magic, 8) != 0) {
    throw std::runtime_error(diagnostic);
  }
}

void check_version(std::istream& in, const char* what) {
  std::uint32_t v = get_u32(in, what);
  if (v != kVersion) {
    throw std::runtime_error(std::string(what) + ": unsupported format version " +
                             std::to_string(v));
  }
}

void write_trie(std::ostream& out, const lsh::LshForest::Node& node) {
  std::uint8_t flags = 0;
  if (node.child[0]) flags |= 1;
  if (node.child[1]) flags |= 2;
  if (!node.records.empty()) flags |= 4;
  put_u8(out, flags);
  if (!node.records.empty()) {
    put_u32(out, static_cast<std::uint32_t>(node.records.size()));
    for (std::uint64_t id : node.records) put_u64(out, id);
  }
  if (node.child[0]) write_trie(out, *node.child[0]);
  if (node.child[1]) write_trie(out, *node.child[1]);
}

void read_trie(std::istream& in, lsh::LshForest::Node& node, std::size_t depth,
               std::size_t max_depth) {
  if (depth > max_depth) throw std::runtime_error("forest file: trie deeper than k_m");
  std::uint8_t flags = get_u8(in, "forest trie");
  if (flags & 4) {
    std::uint32_t n = get_u32(in, "forest trie records");
    for (std::uint32_t i = 0; i < n; ++i) node.records.push_back(get_u64(in, "forest record id"));
  }
  if (flags & 1) {
    node.child[0] = std::make_unique<lsh::LshForest::Node>();
    read_trie(in, *node.child[0], depth + 1, max_depth);
  }
  if (flags & 2) {
    node.child[1] = std::make_unique<lsh::LshForest::Node>();
    read_trie(in, *node.child[1], depth + 1, max_depth);
  }
}

}  // namespace

void write_checkpoint(std::ostream& out, const hred::HredParams& p) {
  put_bytes(out, kCkptMagic, 8);
  put_u32(out, kVersion);
  put_u64(out, p.dims.vocab);
  put_u64(out, p.dims.embed);
  put_u64(out, p.dims.utt_hidden);
  put_u64(out, p.dims.ctx_hidden);
  put_u64(out, p.dims.dec_hidden);
  for (hred::TensorRef t : hred::tensors(const_cast<hred::HredParams&>(p))) {
    put_f32_vec(out, *t.data);
  }
}

hred::HredParams read_checkpoint(std::istream& in) {
  check_magic(in, kCkptMagic, "bad checkpoint header");
  check_version(in, "checkpoint");
  hred::HredDims dims;
  dims.vocab = get_u64(in, "checkpoint dims");
  dims.embed = get_u64(in, "checkpoint dims");
  dims.utt_hidden = get_u64(in, "checkpoint dims");
  dims.ctx_hidden = get_u64(in, "checkpoint dims");
  dims.dec_hidden = get_u64(in, "checkpoint dims");
  hred::HredParams p = hred::HredParams::zeros(dims);
  for (hred::TensorRef t : hred::tensors(p)) {
    *t.data = get_f32_vec(in, t.data->size(), t.name);
  }
  p.validate();
  return p;
}

void write_store(std::ostream& out, const rank::CandidateStore& store) {
  if (store.records.empty()) throw std::runtime_error("write_store: empty store");
  put_bytes(out, kStoreMagic, 8);
  put_u32(out, kVersion);
  put_u64(out, store.records.front().context_embedding.size());
  put_u64(out, store.records.front().response_embedding.size());
  put_u64(out, store.records.size());
  for (const auto& rec : store.records) {
    put_u64(out, rec.id);
    put_f32_vec(out, rec.context_embedding);
    put_f32_vec(out, rec.response_embedding);
    put_u32(out, static_cast<std::uint32_t>(rec.response_text.size()));
    for (const auto& tok : rec.response_text) put_string(out, tok);
  }
}

rank::CandidateStore read_store(std::istream& in) {
  check_magic(in, kStoreMagic, "bad store header");
  check_version(in, "store");
  std::size_t ctx_dim = get_u64(in, "store dims");
  std::size_t resp_dim = get_u64(in, "store dims");
  std::size_t count = get_u64(in, "store count");
  rank::CandidateStore store;
  store.records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    rank::CandidateRecord rec;
    rec.id = get_u64(in, "store record id");
    rec.context_embedding = get_f32_vec(in, ctx_dim, "store context embedding");
    rec.response_embedding = get_f32_vec(in, resp_dim, "store response embedding");
    std::uint32_t ntok = get_u32(in, "store token count");
    rec.response_text.reserve(ntok);
    for (std::uint32_t t = 0; t < ntok; ++t) rec.response_text.push_back(get_string(in, "store token"));
    if (rec.id != i) throw std::runtime_error("store file: non-dense record ids");
    store.records.push_back(std::move(rec));
  }
  return store;
}

void write_forest(std::ostream& out, const lsh::LshForest& forest) {
  put_bytes(out, kForestMagic, 8);
  put_u32(out, kVersion);
  put_u64(out, forest.config().seed);
  put_u64(out, forest.config().trees);
  put_u64(out, forest.config().max_label_len);
  put_u64(out, forest.dim());
  for (const auto& tree : forest.trees()) {
    for (const auto& fn : tree.levels) put_f32_vec(out, fn.hyperplane);
  }
  for (const auto& tree : forest.trees()) write_trie(out, tree.root);
}

lsh::LshForest read_forest(std::istream& in, std::map<std::uint64_t, Vec> records) {
  check_magic(in, kForestMagic, "bad forest header");
  check_version(in, "forest");
  lsh::ForestConfig cfg;
  cfg.seed = get_u64(in, "forest seed");
  cfg.trees = get_u64(in, "forest tree count");
  cfg.max_label_len = get_u64(in, "forest k_m");
  std::size_t dim = get_u64(in, "forest dim");
  std::vector<lsh::LshForest::Tree> trees(cfg.trees);
  for (auto& tree : trees) {
    tree.levels.resize(cfg.max_label_len);
    for (auto& fn : tree.levels) fn.hyperplane = get_f32_vec(in, dim, "forest hyperplane");
  }
  for (auto& tree : trees) read_trie(in, tree.root, 0, cfg.max_label_len);
  return lsh::LshForest(dim, cfg, std::move(trees), std::move(records));
}

void write_vocabulary(std::ostream& out, const corpus::Vocabulary& v) {
  for (int id = 0; id < v.size(); ++id) {
    out << v.words[static_cast<std::size_t>(id)] << "\t"
        << v.counts[static_cast<std::size_t>(id)] << "\n";
  }
}

corpus::Vocabulary read_vocabulary(std::istream& in) {
  corpus::Vocabulary v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error("vocabulary file: line " + std::to_string(line_no) +
                               " is not 'word<TAB>count'");
    }
    std::string word = line.substr(0, tab);
    std::uint64_t count = std::stoull(line.substr(tab + 1));
    v.ids.emplace(word, v.size());
    v.words.push_back(std::move(word));
    v.counts.push_back(count);
  }
  if (v.size() < corpus::Vocabulary::kReserved || v.words[0] != "<pad>" ||
      v.words[1] != "<unk>" || v.words[2] != "<eou>") {
    throw std::runtime_error("vocabulary file: missing reserved meta tokens");
  }
  return v;
}

void write_corpus(std::ostream& out, const std::vector<corpus::Dialogue>& ds,
                  const std::string& delimiter) {
  for (const auto& d : ds) {
    bool first = true;
    for (const auto& u : d.utterances) {
      if (!first) out << " ";
      first = false;
      out << corpus::speaker_tag(u.speaker) << ":";
      for (const auto& tok : u.tokens) out << " " << tok;
      out << " " << delimiter;
    }
    out << "\n";
  }
}

void save_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void append_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot open for appending: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dret::io
