#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "corpus.hpp"
#include "eval.hpp"
#include "kernels.hpp"
#include "pipeline.hpp"
#include "serialize.hpp"

namespace {

const char* kConfigKeys[] = {
    "embed_dim",  "utt_hidden",    "ctx_hidden", "dec_hidden",   "min_count",
    "min_turns",  "delimiter",     "anonymize",  "split_punctuation",
    "learning_rate", "epochs",     "grad_clip",  "train_seed",   "trees",
    "max_label_len", "forest_seed", "method",    "candidates",   "car_pool",
    "eval_options",  "eval_seed",   "beams",     "max_gen_len",
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dret — retrieval-based dialogue responses over GRU embeddings"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "config file with 'key = value' lines");
  app.add_option("--kernels", [](const std::vector<std::string>& vals) {
    return dret::kern::set_active(vals.back());
  }, "kernel backend: scalar, avx2, neon, auto");

  std::vector<std::pair<std::string, std::string>> overrides;
  for (const char* key : kConfigKeys) {
    app.add_option_function<std::string>(
        std::string("--") + key,
        [key, &overrides](const std::string& v) { overrides.emplace_back(key, v); },
        "config override")
        ->group("Config");
  }

  auto* ingest = app.add_subcommand("ingest", "parse, filter and encode a raw corpus");
  std::string ingest_input, ingest_outdir;
  ingest->add_option("--input", ingest_input, "raw corpus file")->required();
  ingest->add_option("--outdir", ingest_outdir, "artifact directory")->required();
  ingest->fallthrough();

  auto* train = app.add_subcommand("train", "train the encoder-decoder");
  std::string train_corpus, train_vocab, train_ckpt, train_trace;
  train->add_option("--corpus", train_corpus, "ingested corpus.txt")->required();
  train->add_option("--vocab", train_vocab, "vocab.tsv")->required();
  train->add_option("--checkpoint", train_ckpt, "checkpoint output")->required();
  train->add_option("--loss-trace", train_trace, "append per-epoch loss lines here");
  train->fallthrough();

  auto* index = app.add_subcommand("index", "build the candidate store and forest");
  std::string index_ckpt, index_corpus, index_vocab, index_store, index_forest;
  index->add_option("--checkpoint", index_ckpt)->required();
  index->add_option("--corpus", index_corpus)->required();
  index->add_option("--vocab", index_vocab)->required();
  index->add_option("--store", index_store, "store output")->required();
  index->add_option("--forest", index_forest, "forest output")->required();
  index->fallthrough();

  auto* query = app.add_subcommand("query", "rank responses for a context");
  std::string query_store, query_forest, query_ckpt, query_vocab, query_context;
  query->add_option("--store", query_store)->required();
  query->add_option("--forest", query_forest)->required();
  query->add_option("--checkpoint", query_ckpt)->required();
  query->add_option("--vocab", query_vocab)->required();
  query->add_option("--context", query_context, "context text, utterances separated by the delimiter")
      ->required();
  query->fallthrough();

  auto* evalc = app.add_subcommand("eval", "Recall@k over a held-out corpus");
  std::string eval_store, eval_forest, eval_ckpt, eval_vocab, eval_heldout;
  std::vector<std::string> eval_modes;
  std::string eval_report, eval_kv_prefix, eval_speaker;
  evalc->add_option("--store", eval_store)->required();
  evalc->add_option("--forest", eval_forest)->required();
  evalc->add_option("--checkpoint", eval_ckpt)->required();
  evalc->add_option("--vocab", eval_vocab)->required();
  evalc->add_option("--heldout", eval_heldout, "held-out raw corpus")->required();
  evalc->add_option("--mode", eval_modes, "generative, CR, AR or CAR (repeatable)");
  evalc->add_option("--report", eval_report, "table report output");
  evalc->add_option("--kv-prefix", eval_kv_prefix, "key-value report prefix (one file per mode)");
  evalc->add_option("--speaker", eval_speaker, "restrict to responses by speaker A or B");
  evalc->fallthrough();

  auto* stats = app.add_subcommand("stats", "corpus statistics report");
  std::string stats_input, stats_vocab, stats_out;
  stats->add_option("--input", stats_input)->required();
  stats->add_option("--vocab", stats_vocab, "existing vocab.tsv for unknown rates");
  stats->add_option("--out", stats_out, "write the report here as well");
  stats->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    dret::PipelineConfig cfg;
    if (!config_path.empty()) cfg = dret::PipelineConfig::from_file(config_path);
    for (const auto& [key, value] : overrides) cfg.set(key, value);
    cfg.validate();

    if (*ingest) {
      dret::pipeline::IngestResult r = dret::pipeline::cmd_ingest(ingest_input, ingest_outdir, cfg);
      std::cout << "parsed " << r.parsed << " dialogues (" << r.skipped << " skipped), kept "
                << r.kept << " after filtering, vocabulary " << r.vocab_size << "\n";
      std::cout << dret::corpus::format_stats(r.stats);
    } else if (*train) {
      dret::pipeline::TrainOutcome r =
          dret::pipeline::cmd_train(train_corpus, train_vocab, train_ckpt, train_trace, cfg);
      for (std::size_t e = 0; e < r.epoch_loss.size(); ++e) {
        std::printf("epoch %zu loss %.6f\n", e + 1, r.epoch_loss[e]);
      }
    } else if (*index) {
      dret::pipeline::IndexOutcome r = dret::pipeline::cmd_index(index_ckpt, index_corpus,
                                                                 index_vocab, index_store,
                                                                 index_forest, cfg);
      std::cout << "indexed " << r.records << " candidate records\n";
    } else if (*query) {
      std::vector<dret::pipeline::QueryHit> hits = dret::pipeline::cmd_query(
          query_store, query_forest, query_ckpt, query_vocab, query_context, cfg);
      if (hits.empty()) {
        std::cout << "no candidates\n";
      }
      for (const auto& h : hits) {
        std::printf("%s %.6f\t%s\n", cfg.method.c_str(), h.score, h.response.c_str());
      }
    } else if (*evalc) {
      if (eval_modes.empty()) eval_modes = {"generative", "CR", "AR", "CAR"};
      std::vector<dret::eval::RecallReport> reports = dret::pipeline::cmd_eval(
          eval_store, eval_forest, eval_ckpt, eval_vocab, eval_heldout, eval_modes, cfg,
          eval_report, eval_kv_prefix, eval_speaker);
      std::cout << dret::eval::format_report_table(reports);
    } else if (*stats) {
      dret::corpus::CorpusStats s = dret::pipeline::cmd_stats(stats_input, stats_vocab, cfg);
      std::string report = dret::corpus::format_stats(s);
      if (!stats_out.empty()) dret::io::save_file(stats_out, report);
      std::cout << report;
    }
  } catch (const std::exception& e) {
    std::cerr << "dret: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
