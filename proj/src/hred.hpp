#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "corpus.hpp"
#include "vec.hpp"

namespace dret::hred {

// Gated recurrent unit:
//   z = sigmoid(W_z x + U_z h + b_z)
//   r = sigmoid(W_r x + U_r h + b_r)
//   hcand = tanh(W_h x + U_h (r o h) + b_h)
//   h' = z o h + (1 - z) o hcand
struct GruParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Vec w_z, w_r, w_h;  // hidden_dim x input_dim, row-major
  Vec u_z, u_r, u_h;  // hidden_dim x hidden_dim
  Vec b_z, b_r, b_h;  // hidden_dim

  static GruParams zeros(std::size_t input_dim, std::size_t hidden_dim);
};

struct HredDims {
  std::size_t vocab = 0;
  std::size_t embed = 0;
  std::size_t utt_hidden = 0;
  std::size_t ctx_hidden = 0;
  std::size_t dec_hidden = 0;
};

// Utterance encoder, context encoder, decoder, and the projections tying
// them together. Also serves as the gradient accumulator (same shapes).
struct HredParams {
  HredDims dims;
  Vec word_embeddings;  // vocab x embed, row-major
  GruParams utt;        // input embed, hidden utt_hidden
  GruParams ctx;        // input utt_hidden, hidden ctx_hidden
  GruParams dec;        // input embed, hidden dec_hidden
  Vec d0;               // dec_hidden x ctx_hidden
  Vec b0_init;          // dec_hidden
  Vec h0;               // embed x dec_hidden
  Vec e0;               // embed x embed
  Vec b0_out;           // embed

  static HredParams zeros(const HredDims& dims);
  // uniform init in [-range, range], word embeddings included
  static HredParams init(const HredDims& dims, std::uint64_t seed, double range = 0.1);

  void validate() const;  // throws on shape/finiteness violations
  std::span<const double> embedding(int word_id) const;
  // overwrite embedding rows from an external table (id -> vector)
  void set_embedding(int word_id, std::span<const double> values);
};

struct TensorRef {
  const char* name;
  Vec* data;
};
// Every parameter tensor in checkpoint order.
std::vector<TensorRef> tensors(HredParams& p);

Vec gru_step(const GruParams& p, const Vec& h_prev, const Vec& x);

// Folds the utterance GRU over word embeddings from a zero state; the
// final hidden state summarizes the utterance.
Vec encode_utterance(const HredParams& p, std::span<const int> word_ids);

// c_m = GRU_ctx(c_{m-1}, h_m) with c_0 = 0; returns c_1..c_M.
std::vector<Vec> encode_context(const HredParams& p, const std::vector<Vec>& utt_embeddings);

// tanh(D_0 c_prev + b_0), the decoder's initial hidden state.
Vec decoder_init(const HredParams& p, const Vec& c_prev);

// Predicted word embedding H_0 d + E_0 w_prev + b_0, dotted against every
// vocabulary embedding. w_prev is the zero vector for the first step.
Vec predict_word_logits(const HredParams& p, const Vec& d_prev, const Vec& w_prev);

// Max-shift stabilized; sums to 1 for arbitrary finite logits.
void softmax_inplace(Vec& logits);

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 1;
  double grad_clip = 1.0;
  std::uint64_t seed = 1;
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean NLL per predicted word
};

// Teacher-forced negative log-likelihood of one encoded dialogue, every
// utterance conditioned on the context so far (zero context for the
// first). Returns (total NLL, predicted word count); accumulates into
// *grad when non-null.
std::pair<double, std::size_t> dialogue_loss_grad(const HredParams& p,
                                                  const corpus::Dialogue& d,
                                                  HredParams* grad);

// Plain SGD over per-dialogue mean NLL with global gradient-norm
// clipping. Deterministic given the seed (dialogue order is a seeded
// shuffle per epoch). Aborts on non-finite loss.
TrainResult train(HredParams& p, const std::vector<corpus::Dialogue>& dialogues,
                  const TrainConfig& cfg);

struct GenerateConfig {
  std::size_t beams = 5;
  std::size_t max_len = 20;
};

// Beam search over the decoder distributions. Hypotheses end at <eou> or
// max_len; highest log-probability hypothesis wins, no length
// normalization, score ties broken by lower token id. The returned ids
// exclude the terminal <eou>; <pad> is never generated.
std::vector<int> generate(const HredParams& p, const std::vector<std::vector<int>>& context,
                          const GenerateConfig& cfg);

}  // namespace dret::hred
