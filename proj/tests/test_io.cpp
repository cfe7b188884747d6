#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "config.hpp"
#include "corpus.hpp"
#include "hred.hpp"
#include "pipeline.hpp"
#include "ranking.hpp"
#include "rng.hpp"
#include "serialize.hpp"

using dret::Rng;
using dret::Vec;
namespace io = dret::io;

namespace {

std::string checkpoint_bytes(const dret::hred::HredParams& p) {
  std::ostringstream out;
  io::write_checkpoint(out, p);
  return out.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("dret_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("io") {

TEST_CASE("checkpoint bytes round-trip exactly") {
  dret::hred::HredDims dims{12, 4, 5, 6, 7};
  dret::hred::HredParams p = dret::hred::HredParams::init(dims, 5);
  std::string bytes = checkpoint_bytes(p);

  std::istringstream in(bytes);
  dret::hred::HredParams q = io::read_checkpoint(in);
  CHECK(q.dims.vocab == dims.vocab);
  CHECK(q.dims.dec_hidden == dims.dec_hidden);
  CHECK(checkpoint_bytes(q) == bytes);  // write -> read -> write is identity
}

TEST_CASE("corrupted checkpoint magic is reported") {
  dret::hred::HredDims dims{4, 2, 2, 2, 2};
  dret::hred::HredParams p = dret::hred::HredParams::zeros(dims);
  std::string bytes = checkpoint_bytes(p);
  bytes[0] = 'X';
  std::istringstream in(bytes);
  CHECK_THROWS_WITH_AS(io::read_checkpoint(in), "bad checkpoint header", std::runtime_error);
}

TEST_CASE("truncated checkpoint is reported") {
  dret::hred::HredDims dims{4, 2, 2, 2, 2};
  dret::hred::HredParams p = dret::hred::HredParams::zeros(dims);
  std::string bytes = checkpoint_bytes(p);
  std::istringstream in(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(io::read_checkpoint(in), std::runtime_error);
}

TEST_CASE("store bytes round-trip exactly") {
  dret::rank::CandidateStore store;
  Rng rng(9);
  for (std::uint64_t id = 0; id < 5; ++id) {
    dret::rank::CandidateRecord r;
    r.id = id;
    r.context_embedding = dret::f32_round({rng.normal(), rng.normal(), rng.normal()});
    r.response_embedding = dret::f32_round({rng.normal(), rng.normal()});
    r.response_text = {"tok" + std::to_string(id), "x"};
    store.records.push_back(std::move(r));
  }
  std::ostringstream out;
  io::write_store(out, store);
  std::string bytes = out.str();

  std::istringstream in(bytes);
  dret::rank::CandidateStore loaded = io::read_store(in);
  REQUIRE(loaded.records.size() == 5);
  CHECK(loaded.records[3].response_text == store.records[3].response_text);
  CHECK(loaded.records[2].context_embedding == store.records[2].context_embedding);

  std::ostringstream out2;
  io::write_store(out2, loaded);
  CHECK(out2.str() == bytes);
}

TEST_CASE("forest bytes round-trip and answer queries identically") {
  Rng rng(11);
  dret::lsh::LshForest forest(6, {4, 10, 13});
  std::map<std::uint64_t, Vec> records;
  for (std::uint64_t id = 0; id < 25; ++id) {
    Vec v(6);
    for (double& x : v) x = dret::f32_round(rng.normal());
    forest.insert(id, v);
    records.emplace(id, std::move(v));
  }
  std::ostringstream out;
  io::write_forest(out, forest);
  std::string bytes = out.str();

  std::istringstream in(bytes);
  dret::lsh::LshForest loaded = io::read_forest(in, records);
  std::ostringstream out2;
  io::write_forest(out2, loaded);
  CHECK(out2.str() == bytes);

  for (int trial = 0; trial < 10; ++trial) {
    Vec q(6);
    for (double& x : q) x = rng.normal();
    CHECK(forest.query(q, 7) == loaded.query(q, 7));
  }
}

TEST_CASE("forest load rejects records that are off their path") {
  dret::lsh::LshForest forest(3, {2, 6, 17});
  forest.insert(0, {1.0, 0.2, -0.4});
  forest.insert(1, {-0.7, 0.9, 0.1});
  std::ostringstream out;
  io::write_forest(out, forest);

  std::map<std::uint64_t, Vec> wrong;
  wrong.emplace(0, Vec{-1.0, -0.2, 0.4});  // flipped: bits disagree with the trie
  wrong.emplace(1, Vec{0.7, -0.9, -0.1});
  std::istringstream in(out.str());
  CHECK_THROWS_AS(io::read_forest(in, wrong), std::invalid_argument);
}

TEST_CASE("vocabulary file round-trips") {
  dret::corpus::Dialogue d;
  dret::corpus::Utterance u;
  u.speaker = dret::corpus::Speaker::A;
  u.tokens = {"apple", "apple", "pear", "pear", "pear", "kiwi"};
  d.utterances.push_back(u);
  dret::corpus::Vocabulary v = dret::corpus::build_vocabulary({d}, 2);

  std::ostringstream out;
  io::write_vocabulary(out, v);
  std::istringstream in(out.str());
  dret::corpus::Vocabulary loaded = io::read_vocabulary(in);
  CHECK(loaded.size() == v.size());
  CHECK(loaded.lookup("pear") == v.lookup("pear"));
  CHECK(loaded.lookup("kiwi") == dret::corpus::Vocabulary::kUnk);

  std::ostringstream out2;
  io::write_vocabulary(out2, loaded);
  CHECK(out2.str() == out.str());
}

TEST_CASE("normalized corpus text re-parses to the same dialogues") {
  std::istringstream raw(
      "A: hello there __eou__ B: hi __eou__ B: again __eou__ A: bye __eou__\n"
      "one __eou__ two words __eou__\n");
  dret::corpus::ParseResult first = dret::corpus::parse_corpus(raw);

  std::ostringstream text;
  io::write_corpus(text, first.dialogues, "__eou__");
  std::istringstream again(text.str());
  dret::corpus::ParseResult second = dret::corpus::parse_corpus(again);

  REQUIRE(second.dialogues.size() == first.dialogues.size());
  for (std::size_t i = 0; i < first.dialogues.size(); ++i) {
    const auto& a = first.dialogues[i];
    const auto& b = second.dialogues[i];
    REQUIRE(a.utterances.size() == b.utterances.size());
    for (std::size_t j = 0; j < a.utterances.size(); ++j) {
      CHECK(a.utterances[j].speaker == b.utterances[j].speaker);
      CHECK(a.utterances[j].tokens == b.utterances[j].tokens);
    }
  }

  std::ostringstream text2;
  io::write_corpus(text2, second.dialogues, "__eou__");
  CHECK(text2.str() == text.str());
}

TEST_CASE("config validation names the offending field") {
  dret::PipelineConfig cfg;
  cfg.embed_dim = 0;
  CHECK_THROWS_WITH_AS(cfg.validate(), "config: embed_dim must be >= 1", std::invalid_argument);

  cfg = {};
  cfg.car_pool = 30;  // > candidates
  CHECK_THROWS_WITH_AS(cfg.validate(), "config: car_pool must satisfy 1 <= n <= candidates",
                       std::invalid_argument);

  cfg = {};
  cfg.method = "BEST";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = {};
  cfg.grad_clip = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("config files load with overrides and reject unknown keys") {
  std::istringstream file(
      "# toy settings\n"
      "embed_dim = 24\n"
      "method = CAR\n"
      "learning_rate = 0.25\n"
      "\n"
      "anonymize = false\n");
  dret::PipelineConfig cfg;
  cfg.load(file);
  CHECK(cfg.embed_dim == 24);
  CHECK(cfg.method == "CAR");
  CHECK(cfg.learning_rate == 0.25);
  CHECK_FALSE(cfg.anonymize);

  CHECK_THROWS_AS(cfg.set("unknown_key", "1"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.set("epochs", "three"), std::invalid_argument);
}

TEST_CASE("pipeline commands run end to end on a tiny corpus") {
  TempDir tmp;
  std::ostringstream corpus;
  Rng rng(15);
  const char* words[] = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta"};
  for (int i = 0; i < 12; ++i) {
    corpus << "A: " << words[rng.index(6)] << " " << words[rng.index(6)]
           << " __eou__ B: " << words[rng.index(6)] << " __eou__ A: " << words[rng.index(6)]
           << " __eou__ B: " << words[rng.index(6)] << " " << words[rng.index(6)]
           << " __eou__ A: " << words[rng.index(6)] << " __eou__\n";
  }
  io::save_file(tmp / "raw.txt", corpus.str());

  dret::PipelineConfig cfg;
  cfg.embed_dim = 6;
  cfg.utt_hidden = 8;
  cfg.ctx_hidden = 8;
  cfg.dec_hidden = 8;
  cfg.min_count = 1;
  cfg.min_turns = 5;
  cfg.epochs = 2;
  cfg.trees = 3;
  cfg.max_label_len = 8;
  cfg.candidates = 5;
  cfg.car_pool = 2;
  cfg.eval_options = 4;
  cfg.max_gen_len = 6;

  dret::pipeline::IngestResult ing = dret::pipeline::cmd_ingest(tmp / "raw.txt", tmp / "art", cfg);
  CHECK(ing.kept == 12);
  CHECK(ing.vocab_size >= 6 + 3);

  const std::string art = tmp / "art";
  dret::pipeline::TrainOutcome tr = dret::pipeline::cmd_train(
      art + "/corpus.txt", art + "/vocab.tsv", art + "/model.ckpt", art + "/loss.txt", cfg);
  CHECK(tr.epoch_loss.size() == 2);

  dret::pipeline::IndexOutcome ix = dret::pipeline::cmd_index(
      art + "/model.ckpt", art + "/corpus.txt", art + "/vocab.tsv", art + "/store.bin",
      art + "/forest.bin", cfg);
  CHECK(ix.records == 12 * 4);

  std::vector<dret::pipeline::QueryHit> hits = dret::pipeline::cmd_query(
      art + "/store.bin", art + "/forest.bin", art + "/model.ckpt", art + "/vocab.tsv",
      "A: alpha beta __eou__ B: gamma __eou__", cfg);
  CHECK_FALSE(hits.empty());

  std::vector<dret::eval::RecallReport> reports = dret::pipeline::cmd_eval(
      art + "/store.bin", art + "/forest.bin", art + "/model.ckpt", art + "/vocab.tsv",
      tmp / "raw.txt", {"AR", "generative"}, cfg, art + "/report.txt", art + "/recall_");
  REQUIRE(reports.size() == 2);
  for (const auto& r : reports) {
    for (std::size_t j = 1; j < r.recall.size(); ++j) CHECK(r.recall[j] >= r.recall[j - 1]);
  }
  CHECK(std::filesystem::exists(art + "/report.txt"));
  CHECK(std::filesystem::exists(art + "/recall_HRED-AR.kv"));

  dret::corpus::CorpusStats st = dret::pipeline::cmd_stats(tmp / "raw.txt", art + "/vocab.tsv", cfg);
  CHECK(st.dialogues == 12);
}

TEST_CASE("ingest fails loudly when the filter empties the corpus") {
  TempDir tmp;
  io::save_file(tmp / "raw.txt", "A: one __eou__ B: two __eou__\n");
  dret::PipelineConfig cfg;
  cfg.min_count = 1;
  cfg.min_turns = 5;
  CHECK_THROWS_WITH_AS(dret::pipeline::cmd_ingest(tmp / "raw.txt", tmp / "art", cfg),
                       "empty corpus after filtering", std::runtime_error);
}

TEST_CASE("ingest reruns are bitwise identical") {
  TempDir tmp;
  io::save_file(tmp / "raw.txt",
                "A: red green __eou__ B: blue __eou__ A: red __eou__ B: green __eou__ A: blue "
                "__eou__\n"
                "A: blue blue __eou__ B: red __eou__ A: green __eou__ B: red __eou__ A: red "
                "__eou__\n");
  dret::PipelineConfig cfg;
  cfg.min_count = 1;
  cfg.min_turns = 5;
  dret::pipeline::cmd_ingest(tmp / "raw.txt", tmp / "a1", cfg);
  dret::pipeline::cmd_ingest(tmp / "raw.txt", tmp / "a2", cfg);
  for (const char* name : {"corpus.txt", "vocab.tsv", "stats.txt"}) {
    CHECK(io::load_file(tmp / ("a1/" + std::string(name))) ==
          io::load_file(tmp / ("a2/" + std::string(name))));
  }
}

}  // TEST_SUITE
