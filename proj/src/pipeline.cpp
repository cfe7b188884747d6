#include "pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "serialize.hpp"

namespace dret::pipeline {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return in;
}

corpus::Vocabulary load_vocab(const std::string& path) {
  std::ifstream in = open_input(path);
  return io::read_vocabulary(in);
}

hred::HredParams load_checkpoint(const std::string& path) {
  std::ifstream in = open_input(path);
  return io::read_checkpoint(in);
}

struct IndexArtifacts {
  rank::CandidateStore store;
  lsh::LshForest forest;
};

IndexArtifacts load_index(const std::string& store_path, const std::string& forest_path) {
  std::ifstream sin = open_input(store_path);
  rank::CandidateStore store = io::read_store(sin);
  std::map<std::uint64_t, Vec> records;
  for (const auto& rec : store.records) records.emplace(rec.id, rec.context_embedding);
  std::ifstream fin = open_input(forest_path);
  lsh::LshForest forest = io::read_forest(fin, std::move(records));
  return {std::move(store), std::move(forest)};
}

Vec context_embedding_of(const hred::HredParams& p,
                         const std::vector<std::vector<int>>& utterance_ids) {
  std::vector<Vec> h;
  h.reserve(utterance_ids.size());
  for (const auto& ids : utterance_ids) h.push_back(hred::encode_utterance(p, ids));
  return hred::encode_context(p, h).back();
}

std::string trace_line(std::size_t epoch, double loss) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "epoch %zu loss %.6f\n", epoch, loss);
  return buf;
}

}  // namespace

std::vector<corpus::Dialogue> load_corpus_file(const std::string& path,
                                               const PipelineConfig& cfg, bool preprocess) {
  std::ifstream in = open_input(path);
  corpus::ParseOptions opt;
  opt.delimiter = cfg.delimiter;
  opt.split_punctuation = cfg.split_punctuation;
  corpus::ParseResult parsed = corpus::parse_corpus(in, opt);
  std::vector<corpus::Dialogue> ds = std::move(parsed.dialogues);
  if (preprocess) {
    if (cfg.anonymize) corpus::anonymize_dialogues(ds, corpus::AnonymizeRules::defaults());
    ds = corpus::filter_dialogues(std::move(ds), cfg.min_turns);
  }
  return ds;
}

IngestResult cmd_ingest(const std::string& input_path, const std::string& outdir,
                        const PipelineConfig& cfg) {
  cfg.validate();
  std::ifstream in = open_input(input_path);
  corpus::ParseOptions opt;
  opt.delimiter = cfg.delimiter;
  opt.split_punctuation = cfg.split_punctuation;
  corpus::ParseResult parsed = corpus::parse_corpus(in, opt);

  IngestResult result;
  result.parsed = parsed.dialogues.size();
  result.skipped = parsed.skipped_records;

  std::vector<corpus::Dialogue> ds = std::move(parsed.dialogues);
  if (cfg.anonymize) corpus::anonymize_dialogues(ds, corpus::AnonymizeRules::defaults());
  ds = corpus::filter_dialogues(std::move(ds), cfg.min_turns);
  if (ds.empty()) throw std::runtime_error("empty corpus after filtering");
  result.kept = ds.size();

  corpus::Vocabulary vocab = corpus::build_vocabulary(ds, cfg.min_count);
  result.vocab_size = vocab.size();
  corpus::encode_dialogues(ds, vocab);
  result.stats = corpus::compute_stats(ds, vocab);

  std::filesystem::create_directories(outdir);
  {
    std::ostringstream out;
    io::write_corpus(out, ds, cfg.delimiter);
    io::save_file(outdir + "/" + kCorpusFile, out.str());
  }
  {
    std::ostringstream out;
    io::write_vocabulary(out, vocab);
    io::save_file(outdir + "/" + kVocabFile, out.str());
  }
  io::save_file(outdir + "/" + kStatsFile, corpus::format_stats(result.stats));
  return result;
}

TrainOutcome cmd_train(const std::string& corpus_path, const std::string& vocab_path,
                       const std::string& checkpoint_path, const std::string& trace_path,
                       const PipelineConfig& cfg) {
  cfg.validate();
  corpus::Vocabulary vocab = load_vocab(vocab_path);
  std::vector<corpus::Dialogue> ds = load_corpus_file(corpus_path, cfg, /*preprocess=*/false);
  if (ds.empty()) throw std::runtime_error("cmd_train: empty corpus");
  corpus::encode_dialogues(ds, vocab);

  hred::HredDims dims{static_cast<std::size_t>(vocab.size()), cfg.embed_dim, cfg.utt_hidden,
                      cfg.ctx_hidden, cfg.dec_hidden};
  hred::HredParams params = hred::HredParams::init(dims, cfg.train_seed);

  hred::TrainConfig tcfg{cfg.learning_rate, cfg.epochs, cfg.grad_clip, cfg.train_seed};
  hred::TrainResult trained = hred::train(params, ds, tcfg);

  if (!trace_path.empty()) {
    std::ostringstream trace;
    for (std::size_t e = 0; e < trained.epoch_loss.size(); ++e) {
      trace << trace_line(e + 1, trained.epoch_loss[e]);
    }
    io::append_file(trace_path, trace.str());
  }

  std::ostringstream out;
  io::write_checkpoint(out, params);
  io::save_file(checkpoint_path, out.str());
  return {trained.epoch_loss};
}

IndexOutcome cmd_index(const std::string& checkpoint_path, const std::string& corpus_path,
                       const std::string& vocab_path, const std::string& store_path,
                       const std::string& forest_path, const PipelineConfig& cfg) {
  cfg.validate();
  hred::HredParams params = load_checkpoint(checkpoint_path);
  corpus::Vocabulary vocab = load_vocab(vocab_path);
  if (params.dims.vocab != static_cast<std::size_t>(vocab.size())) {
    throw std::runtime_error("checkpoint/vocabulary size mismatch");
  }
  std::vector<corpus::Dialogue> ds = load_corpus_file(corpus_path, cfg, /*preprocess=*/false);
  corpus::encode_dialogues(ds, vocab);

  rank::CandidateStore store = rank::build_store(params, ds);
  lsh::ForestConfig fcfg{cfg.trees, cfg.max_label_len, cfg.forest_seed};
  lsh::LshForest forest = rank::build_forest(store, fcfg);

  {
    std::ostringstream out;
    io::write_store(out, store);
    io::save_file(store_path, out.str());
  }
  {
    std::ostringstream out;
    io::write_forest(out, forest);
    io::save_file(forest_path, out.str());
  }
  return {store.records.size()};
}

std::vector<QueryHit> cmd_query(const std::string& store_path, const std::string& forest_path,
                                const std::string& checkpoint_path, const std::string& vocab_path,
                                const std::string& context_text, const PipelineConfig& cfg) {
  cfg.validate();
  hred::HredParams params = load_checkpoint(checkpoint_path);
  corpus::Vocabulary vocab = load_vocab(vocab_path);
  IndexArtifacts index = load_index(store_path, forest_path);

  corpus::ParseOptions opt;
  opt.delimiter = cfg.delimiter;
  opt.split_punctuation = cfg.split_punctuation;
  std::istringstream text(context_text);
  corpus::ParseResult parsed = corpus::parse_corpus(text, opt);
  if (parsed.dialogues.size() != 1) throw std::runtime_error("query: context parsed to no dialogue");
  corpus::Dialogue context = parsed.dialogues.front();
  if (cfg.anonymize) {
    corpus::AnonymizeRules rules = corpus::AnonymizeRules::defaults();
    for (auto& u : context.utterances) u.tokens = corpus::anonymize(u.tokens, rules);
  }
  context = corpus::encode_dialogue(std::move(context), vocab);

  std::vector<std::vector<int>> ids;
  for (const auto& u : context.utterances) ids.push_back(u.word_ids);
  Vec c_q = context_embedding_of(params, ids);

  rank::RetrieveConfig rcfg{rank::parse_method(cfg.method), cfg.candidates, cfg.car_pool};
  std::vector<rank::RankedCandidate> ranked = rank::retrieve_and_rank(c_q, index.store,
                                                                      index.forest, rcfg);
  std::vector<QueryHit> hits;
  hits.reserve(ranked.size());
  for (const auto& rc : ranked) {
    std::string text_out;
    for (const auto& tok : index.store.by_id(rc.id).response_text) {
      if (!text_out.empty()) text_out += " ";
      text_out += tok;
    }
    hits.push_back({rc.score, std::move(text_out)});
  }
  return hits;
}

std::vector<eval::RecallReport> cmd_eval(const std::string& store_path,
                                         const std::string& forest_path,
                                         const std::string& checkpoint_path,
                                         const std::string& vocab_path,
                                         const std::string& heldout_path,
                                         const std::vector<std::string>& modes,
                                         const PipelineConfig& cfg,
                                         const std::string& report_path,
                                         const std::string& kv_prefix,
                                         const std::string& speaker) {
  cfg.validate();
  hred::HredParams params = load_checkpoint(checkpoint_path);
  corpus::Vocabulary vocab = load_vocab(vocab_path);
  if (params.dims.vocab != static_cast<std::size_t>(vocab.size())) {
    throw std::runtime_error("checkpoint/vocabulary size mismatch");
  }
  IndexArtifacts index = load_index(store_path, forest_path);

  std::vector<corpus::Dialogue> heldout = load_corpus_file(heldout_path, cfg, /*preprocess=*/true);
  if (heldout.empty()) throw std::runtime_error("cmd_eval: empty held-out corpus");
  corpus::encode_dialogues(heldout, vocab);

  eval::SampleConfig scfg;
  scfg.n_options = cfg.eval_options;
  scfg.seed = cfg.eval_seed;
  std::vector<eval::EvalSample> samples = eval::make_samples(heldout, scfg);
  if (speaker == "A") samples = eval::filter_by_speaker(std::move(samples), corpus::Speaker::A);
  else if (speaker == "B") samples = eval::filter_by_speaker(std::move(samples), corpus::Speaker::B);
  else if (!speaker.empty()) throw std::invalid_argument("unknown speaker filter '" + speaker + "'");
  if (samples.empty()) throw std::runtime_error("cmd_eval: no evaluation samples");

  eval::Embedder embed = eval::hred_embedder(params);
  std::vector<eval::RecallReport> reports;
  for (const std::string& mode : modes) {
    eval::AnswerModel model;
    std::string name;
    if (mode == "generative") {
      hred::GenerateConfig gcfg{cfg.beams, cfg.max_gen_len};
      model = eval::generative_model(params, gcfg);
      name = "HRED";
    } else {
      rank::Method method = rank::parse_method(mode);
      rank::RetrieveConfig rcfg{method, cfg.candidates, cfg.car_pool};
      model = eval::retrieval_model(params, index.store, index.forest, rcfg);
      name = std::string("HRED-") + rank::method_name(method);
    }
    reports.push_back(eval::recall_at_k(samples, embed, model, name));
  }

  if (!report_path.empty()) io::save_file(report_path, eval::format_report_table(reports));
  if (!kv_prefix.empty()) {
    for (const auto& r : reports) {
      io::save_file(kv_prefix + r.model + ".kv", eval::format_report_kv(r));
    }
  }
  return reports;
}

corpus::CorpusStats cmd_stats(const std::string& input_path, const std::string& vocab_path,
                              const PipelineConfig& cfg) {
  cfg.validate();
  std::vector<corpus::Dialogue> ds = load_corpus_file(input_path, cfg, /*preprocess=*/true);
  if (ds.empty()) throw std::runtime_error("empty corpus after filtering");
  corpus::Vocabulary vocab =
      vocab_path.empty() ? corpus::build_vocabulary(ds, cfg.min_count) : load_vocab(vocab_path);
  corpus::encode_dialogues(ds, vocab);
  return corpus::compute_stats(ds, vocab);
}

}  // namespace dret::pipeline
