#include "hred.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kernels.hpp"
#include "rng.hpp"

namespace dret::hred {

namespace {

Vec zeros(std::size_t n) { return Vec(n, 0.0); }

void sigmoid_inplace(Vec& v) {
  for (double& x : v) x = 1.0 / (1.0 + std::exp(-x));
}

void tanh_inplace(Vec& v) {
  for (double& x : v) x = std::tanh(x);
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Per-step activations needed by the backward pass.
struct GruCache {
  Vec x, h_prev, z, r, hcand, rh;
};

Vec gru_forward(const GruParams& p, const Vec& h_prev, const Vec& x, GruCache* cache) {
  const std::size_t hd = p.hidden_dim;
  const std::size_t in = p.input_dim;

  Vec z = p.b_z;
  kern::matvec_acc(p.w_z.data(), x.data(), z.data(), hd, in);
  kern::matvec_acc(p.u_z.data(), h_prev.data(), z.data(), hd, hd);
  sigmoid_inplace(z);

  Vec r = p.b_r;
  kern::matvec_acc(p.w_r.data(), x.data(), r.data(), hd, in);
  kern::matvec_acc(p.u_r.data(), h_prev.data(), r.data(), hd, hd);
  sigmoid_inplace(r);

  Vec rh(hd);
  for (std::size_t i = 0; i < hd; ++i) rh[i] = r[i] * h_prev[i];

  Vec hcand = p.b_h;
  kern::matvec_acc(p.w_h.data(), x.data(), hcand.data(), hd, in);
  kern::matvec_acc(p.u_h.data(), rh.data(), hcand.data(), hd, hd);
  tanh_inplace(hcand);

  Vec h(hd);
  for (std::size_t i = 0; i < hd; ++i) h[i] = z[i] * h_prev[i] + (1.0 - z[i]) * hcand[i];

  if (cache) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->hcand = std::move(hcand);
    cache->rh = std::move(rh);
  }
  return h;
}

// Accumulates parameter grads into g, state grad into dh_prev, input grad
// into dx (both raw accumulators, may alias embedding rows).
void gru_backward(const GruParams& p, const GruCache& c, const Vec& dh, GruParams& g,
                  double* dh_prev, double* dx) {
  const std::size_t hd = p.hidden_dim;
  const std::size_t in = p.input_dim;

  Vec dz(hd), dhc(hd);
  for (std::size_t i = 0; i < hd; ++i) {
    dz[i] = dh[i] * (c.h_prev[i] - c.hcand[i]);
    dhc[i] = dh[i] * (1.0 - c.z[i]);
    dh_prev[i] += dh[i] * c.z[i];
  }

  Vec dah(hd);
  for (std::size_t i = 0; i < hd; ++i) dah[i] = dhc[i] * (1.0 - c.hcand[i] * c.hcand[i]);

  kern::ger_acc(g.w_h.data(), dah.data(), c.x.data(), hd, in);
  kern::ger_acc(g.u_h.data(), dah.data(), c.rh.data(), hd, hd);
  kern::axpy(1.0, dah.data(), g.b_h.data(), hd);

  Vec drh(hd, 0.0);
  kern::matvec_t_acc(p.u_h.data(), dah.data(), drh.data(), hd, hd);

  Vec dr(hd);
  for (std::size_t i = 0; i < hd; ++i) {
    dr[i] = drh[i] * c.h_prev[i];
    dh_prev[i] += drh[i] * c.r[i];
  }

  Vec daz(hd), dar(hd);
  for (std::size_t i = 0; i < hd; ++i) {
    daz[i] = dz[i] * c.z[i] * (1.0 - c.z[i]);
    dar[i] = dr[i] * c.r[i] * (1.0 - c.r[i]);
  }

  kern::ger_acc(g.w_z.data(), daz.data(), c.x.data(), hd, in);
  kern::ger_acc(g.u_z.data(), daz.data(), c.h_prev.data(), hd, hd);
  kern::axpy(1.0, daz.data(), g.b_z.data(), hd);

  kern::ger_acc(g.w_r.data(), dar.data(), c.x.data(), hd, in);
  kern::ger_acc(g.u_r.data(), dar.data(), c.h_prev.data(), hd, hd);
  kern::axpy(1.0, dar.data(), g.b_r.data(), hd);

  kern::matvec_t_acc(p.u_z.data(), daz.data(), dh_prev, hd, hd);
  kern::matvec_t_acc(p.u_r.data(), dar.data(), dh_prev, hd, hd);

  kern::matvec_t_acc(p.w_z.data(), daz.data(), dx, hd, in);
  kern::matvec_t_acc(p.w_r.data(), dar.data(), dx, hd, in);
  kern::matvec_t_acc(p.w_h.data(), dah.data(), dx, hd, in);
}

// NLL of `target` under max-shifted softmax; fills probs when requested.
double word_nll(const Vec& logits, int target, Vec* probs) {
  double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  if (probs) {
    probs->resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
      (*probs)[i] = std::exp(logits[i] - mx);
      sum += (*probs)[i];
    }
    for (double& x : *probs) x /= sum;
  } else {
    for (double l : logits) sum += std::exp(l - mx);
  }
  return mx + std::log(sum) - logits[static_cast<std::size_t>(target)];
}

}  // namespace

GruParams GruParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  GruParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.w_z = p.w_r = p.w_h = Vec(hidden_dim * input_dim, 0.0);
  p.u_z = p.u_r = p.u_h = Vec(hidden_dim * hidden_dim, 0.0);
  p.b_z = p.b_r = p.b_h = Vec(hidden_dim, 0.0);
  return p;
}

HredParams HredParams::zeros(const HredDims& dims) {
  if (dims.vocab == 0 || dims.embed == 0 || dims.utt_hidden == 0 || dims.ctx_hidden == 0 ||
      dims.dec_hidden == 0) {
    throw std::invalid_argument("HredParams: all dims must be >= 1");
  }
  HredParams p;
  p.dims = dims;
  p.word_embeddings = Vec(dims.vocab * dims.embed, 0.0);
  p.utt = GruParams::zeros(dims.embed, dims.utt_hidden);
  p.ctx = GruParams::zeros(dims.utt_hidden, dims.ctx_hidden);
  p.dec = GruParams::zeros(dims.embed, dims.dec_hidden);
  p.d0 = Vec(dims.dec_hidden * dims.ctx_hidden, 0.0);
  p.b0_init = Vec(dims.dec_hidden, 0.0);
  p.h0 = Vec(dims.embed * dims.dec_hidden, 0.0);
  p.e0 = Vec(dims.embed * dims.embed, 0.0);
  p.b0_out = Vec(dims.embed, 0.0);
  return p;
}

HredParams HredParams::init(const HredDims& dims, std::uint64_t seed, double range) {
  HredParams p = zeros(dims);
  Rng rng(seed);
  for (TensorRef t : tensors(p)) {
    for (double& x : *t.data) x = rng.uniform(-range, range);
  }
  return p;
}

void HredParams::validate() const {
  auto expect = [](std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
      throw std::invalid_argument(std::string("HredParams: bad shape for ") + what);
    }
  };
  auto check_gru = [&](const GruParams& g, std::size_t in, std::size_t hd, const char* what) {
    expect(g.input_dim, in, what);
    expect(g.hidden_dim, hd, what);
    for (const Vec* m : {&g.w_z, &g.w_r, &g.w_h}) expect(m->size(), hd * in, what);
    for (const Vec* m : {&g.u_z, &g.u_r, &g.u_h}) expect(m->size(), hd * hd, what);
    for (const Vec* m : {&g.b_z, &g.b_r, &g.b_h}) expect(m->size(), hd, what);
  };
  expect(word_embeddings.size(), dims.vocab * dims.embed, "word_embeddings");
  check_gru(utt, dims.embed, dims.utt_hidden, "utt");
  check_gru(ctx, dims.utt_hidden, dims.ctx_hidden, "ctx");
  check_gru(dec, dims.embed, dims.dec_hidden, "dec");
  expect(d0.size(), dims.dec_hidden * dims.ctx_hidden, "d0");
  expect(b0_init.size(), dims.dec_hidden, "b0_init");
  expect(h0.size(), dims.embed * dims.dec_hidden, "h0");
  expect(e0.size(), dims.embed * dims.embed, "e0");
  expect(b0_out.size(), dims.embed, "b0_out");
  for (TensorRef t : tensors(const_cast<HredParams&>(*this))) {
    if (!all_finite(*t.data)) {
      throw std::invalid_argument(std::string("HredParams: non-finite values in ") + t.name);
    }
  }
}

std::span<const double> HredParams::embedding(int word_id) const {
  if (word_id < 0 || static_cast<std::size_t>(word_id) >= dims.vocab) {
    throw std::out_of_range("HredParams: word id " + std::to_string(word_id) +
                            " outside vocabulary of " + std::to_string(dims.vocab));
  }
  return {word_embeddings.data() + static_cast<std::size_t>(word_id) * dims.embed, dims.embed};
}

void HredParams::set_embedding(int word_id, std::span<const double> values) {
  if (values.size() != dims.embed) {
    throw std::invalid_argument("HredParams: embedding size mismatch");
  }
  std::span<const double> row = embedding(word_id);
  std::copy(values.begin(), values.end(), word_embeddings.begin() + (row.data() - word_embeddings.data()));
}

std::vector<TensorRef> tensors(HredParams& p) {
  return {
      {"word_embeddings", &p.word_embeddings},
      {"utt.w_z", &p.utt.w_z}, {"utt.w_r", &p.utt.w_r}, {"utt.w_h", &p.utt.w_h},
      {"utt.u_z", &p.utt.u_z}, {"utt.u_r", &p.utt.u_r}, {"utt.u_h", &p.utt.u_h},
      {"utt.b_z", &p.utt.b_z}, {"utt.b_r", &p.utt.b_r}, {"utt.b_h", &p.utt.b_h},
      {"ctx.w_z", &p.ctx.w_z}, {"ctx.w_r", &p.ctx.w_r}, {"ctx.w_h", &p.ctx.w_h},
      {"ctx.u_z", &p.ctx.u_z}, {"ctx.u_r", &p.ctx.u_r}, {"ctx.u_h", &p.ctx.u_h},
      {"ctx.b_z", &p.ctx.b_z}, {"ctx.b_r", &p.ctx.b_r}, {"ctx.b_h", &p.ctx.b_h},
      {"dec.w_z", &p.dec.w_z}, {"dec.w_r", &p.dec.w_r}, {"dec.w_h", &p.dec.w_h},
      {"dec.u_z", &p.dec.u_z}, {"dec.u_r", &p.dec.u_r}, {"dec.u_h", &p.dec.u_h},
      {"dec.b_z", &p.dec.b_z}, {"dec.b_r", &p.dec.b_r}, {"dec.b_h", &p.dec.b_h},
      {"d0", &p.d0},
      {"b0_init", &p.b0_init},
      {"h0", &p.h0},
      {"e0", &p.e0},
      {"b0_out", &p.b0_out},
  };
}

Vec gru_step(const GruParams& p, const Vec& h_prev, const Vec& x) {
  check(h_prev.size() == p.hidden_dim, "gru_step: hidden state dim mismatch");
  check(x.size() == p.input_dim, "gru_step: input dim mismatch");
  return gru_forward(p, h_prev, x, nullptr);
}

Vec encode_utterance(const HredParams& p, std::span<const int> word_ids) {
  check(!word_ids.empty(), "encode_utterance: empty word sequence");
  Vec h = zeros(p.dims.utt_hidden);
  Vec x(p.dims.embed);
  for (int id : word_ids) {
    std::span<const double> e = p.embedding(id);
    x.assign(e.begin(), e.end());
    h = gru_forward(p.utt, h, x, nullptr);
  }
  return h;
}

std::vector<Vec> encode_context(const HredParams& p, const std::vector<Vec>& utt_embeddings) {
  check(!utt_embeddings.empty(), "encode_context: empty utterance list");
  std::vector<Vec> out;
  out.reserve(utt_embeddings.size());
  Vec c = zeros(p.dims.ctx_hidden);
  for (const Vec& h : utt_embeddings) {
    check(h.size() == p.dims.utt_hidden, "encode_context: utterance embedding dim mismatch");
    c = gru_forward(p.ctx, c, h, nullptr);
    out.push_back(c);
  }
  return out;
}

Vec decoder_init(const HredParams& p, const Vec& c_prev) {
  check(c_prev.size() == p.dims.ctx_hidden, "decoder_init: context dim mismatch");
  Vec d = p.b0_init;
  kern::matvec_acc(p.d0.data(), c_prev.data(), d.data(), p.dims.dec_hidden, p.dims.ctx_hidden);
  tanh_inplace(d);
  return d;
}

Vec predict_word_logits(const HredParams& p, const Vec& d_prev, const Vec& w_prev) {
  check(d_prev.size() == p.dims.dec_hidden, "predict_word_logits: decoder state dim mismatch");
  check(w_prev.size() == p.dims.embed, "predict_word_logits: word embedding dim mismatch");
  Vec what = p.b0_out;
  kern::matvec_acc(p.h0.data(), d_prev.data(), what.data(), p.dims.embed, p.dims.dec_hidden);
  kern::matvec_acc(p.e0.data(), w_prev.data(), what.data(), p.dims.embed, p.dims.embed);
  Vec logits(p.dims.vocab, 0.0);
  kern::matvec_acc(p.word_embeddings.data(), what.data(), logits.data(), p.dims.vocab,
                   p.dims.embed);
  return logits;
}

void softmax_inplace(Vec& logits) {
  if (logits.empty()) return;
  double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& x : logits) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : logits) x /= sum;
}

std::pair<double, std::size_t> dialogue_loss_grad(const HredParams& p, const corpus::Dialogue& d,
                                                  HredParams* grad) {
  const std::size_t M = d.utterances.size();
  check(M > 0, "dialogue_loss_grad: empty dialogue");
  for (const auto& u : d.utterances) {
    check(!u.word_ids.empty(), "dialogue_loss_grad: dialogue not encoded");
  }
  const std::size_t E = p.dims.embed;
  const std::size_t C = p.dims.ctx_hidden;
  const std::size_t D = p.dims.dec_hidden;
  const std::size_t V = p.dims.vocab;
  const bool want_grad = grad != nullptr;

  auto emb_vec = [&](int id) {
    std::span<const double> e = p.embedding(id);
    return Vec(e.begin(), e.end());
  };
  auto grad_emb_row = [&](int id) {
    return grad->word_embeddings.data() + static_cast<std::size_t>(id) * E;
  };

  // utterance encoder forward
  std::vector<Vec> h(M);
  std::vector<std::vector<GruCache>> utt_caches(M);
  for (std::size_t m = 0; m < M; ++m) {
    const auto& ids = d.utterances[m].word_ids;
    if (want_grad) utt_caches[m].resize(ids.size());
    Vec state = zeros(p.dims.utt_hidden);
    for (std::size_t j = 0; j < ids.size(); ++j) {
      state = gru_forward(p.utt, state, emb_vec(ids[j]), want_grad ? &utt_caches[m][j] : nullptr);
    }
    h[m] = std::move(state);
  }

  // context encoder forward; c[k] is the context after k utterances
  std::vector<Vec> c(M + 1);
  std::vector<GruCache> ctx_caches(want_grad ? M + 1 : 0);
  c[0] = zeros(C);
  for (std::size_t k = 1; k <= M; ++k) {
    c[k] = gru_forward(p.ctx, c[k - 1], h[k - 1], want_grad ? &ctx_caches[k] : nullptr);
  }

  double loss = 0.0;
  std::size_t words = 0;
  std::vector<Vec> dc(want_grad ? M + 1 : 0);
  if (want_grad) {
    for (auto& v : dc) v = zeros(C);
  }

  // decoder: forward (and backward, when training) one utterance at a time
  const Vec zero_emb = zeros(E);
  for (std::size_t m = 0; m < M; ++m) {
    const auto& ids = d.utterances[m].word_ids;
    const std::size_t N = ids.size();

    std::vector<Vec> dstates(N);
    std::vector<GruCache> dec_caches(want_grad ? N : 0);
    std::vector<Vec> whats(want_grad ? N : 0);
    std::vector<Vec> probs(want_grad ? N : 0);

    dstates[0] = decoder_init(p, c[m]);
    for (std::size_t n = 0; n < N; ++n) {
      Vec what = p.b0_out;
      kern::matvec_acc(p.h0.data(), dstates[n].data(), what.data(), E, D);
      if (n > 0) {
        kern::matvec_acc(p.e0.data(), p.embedding(ids[n - 1]).data(), what.data(), E, E);
      }
      Vec logits(V, 0.0);
      kern::matvec_acc(p.word_embeddings.data(), what.data(), logits.data(), V, E);
      loss += word_nll(logits, ids[n], want_grad ? &probs[n] : nullptr);
      ++words;
      if (want_grad) whats[n] = std::move(what);
      if (n + 1 < N) {
        dstates[n + 1] =
            gru_forward(p.dec, dstates[n], emb_vec(ids[n]), want_grad ? &dec_caches[n + 1] : nullptr);
      }
    }

    if (!want_grad) continue;

    std::vector<Vec> dd(N);
    for (auto& v : dd) v = zeros(D);
    for (std::size_t n = N; n-- > 0;) {
      Vec& dlogits = probs[n];  // consumed: probs become the logit grads
      dlogits[static_cast<std::size_t>(ids[n])] -= 1.0;
      Vec dwhat = zeros(E);
      kern::matvec_t_acc(p.word_embeddings.data(), dlogits.data(), dwhat.data(), V, E);
      kern::ger_acc(grad->word_embeddings.data(), dlogits.data(), whats[n].data(), V, E);
      kern::ger_acc(grad->h0.data(), dwhat.data(), dstates[n].data(), E, D);
      kern::matvec_t_acc(p.h0.data(), dwhat.data(), dd[n].data(), E, D);
      if (n > 0) {
        kern::ger_acc(grad->e0.data(), dwhat.data(), p.embedding(ids[n - 1]).data(), E, E);
        kern::matvec_t_acc(p.e0.data(), dwhat.data(), grad_emb_row(ids[n - 1]), E, E);
      }
      kern::axpy(1.0, dwhat.data(), grad->b0_out.data(), E);

      if (n >= 1) {
        gru_backward(p.dec, dec_caches[n], dd[n], grad->dec, dd[n - 1].data(),
                     grad_emb_row(ids[n - 1]));
      }
    }
    // decoder init: tanh(D0 c[m] + b0_init)
    Vec da(D);
    for (std::size_t i = 0; i < D; ++i) da[i] = dd[0][i] * (1.0 - dstates[0][i] * dstates[0][i]);
    kern::ger_acc(grad->d0.data(), da.data(), c[m].data(), D, C);
    kern::axpy(1.0, da.data(), grad->b0_init.data(), D);
    kern::matvec_t_acc(p.d0.data(), da.data(), dc[m].data(), D, C);
  }

  if (want_grad) {
    // context chain, then utterance encoders
    std::vector<Vec> dh(M);
    for (auto& v : dh) v = zeros(p.dims.utt_hidden);
    for (std::size_t k = M; k >= 1; --k) {
      gru_backward(p.ctx, ctx_caches[k], dc[k], grad->ctx, dc[k - 1].data(), dh[k - 1].data());
    }
    Vec discard(p.dims.utt_hidden);
    for (std::size_t m = 0; m < M; ++m) {
      const auto& ids = d.utterances[m].word_ids;
      Vec dhu = std::move(dh[m]);
      for (std::size_t j = ids.size(); j-- > 0;) {
        Vec dprev = zeros(p.dims.utt_hidden);
        gru_backward(p.utt, utt_caches[m][j], dhu, grad->utt, dprev.data(), grad_emb_row(ids[j]));
        dhu = std::move(dprev);
      }
      (void)discard;
    }
  }

  return {loss, words};
}

TrainResult train(HredParams& p, const std::vector<corpus::Dialogue>& dialogues,
                  const TrainConfig& cfg) {
  p.validate();
  check(!dialogues.empty(), "train: empty corpus");
  check(cfg.learning_rate >= 0.0, "train: learning rate must be >= 0");

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(dialogues.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  HredParams grad = HredParams::zeros(p.dims);
  auto param_tensors = tensors(p);
  auto grad_tensors = tensors(grad);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_nll = 0.0;
    std::size_t epoch_words = 0;
    for (std::size_t idx : order) {
      for (TensorRef t : grad_tensors) std::fill(t.data->begin(), t.data->end(), 0.0);
      auto [nll, words] = dialogue_loss_grad(p, dialogues[idx], &grad);
      if (!std::isfinite(nll)) {
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch + 1));
      }
      epoch_nll += nll;
      epoch_words += words;
      if (cfg.learning_rate == 0.0 || words == 0) continue;

      double inv_words = 1.0 / static_cast<double>(words);
      double sq_norm = 0.0;
      for (TensorRef t : grad_tensors) {
        kern::scale(t.data->data(), inv_words, t.data->size());
        sq_norm += kern::dot(t.data->data(), t.data->data(), t.data->size());
      }
      double gnorm = std::sqrt(sq_norm);
      if (cfg.grad_clip > 0.0 && gnorm > cfg.grad_clip) {
        double s = cfg.grad_clip / gnorm;
        for (TensorRef t : grad_tensors) kern::scale(t.data->data(), s, t.data->size());
      }
      for (std::size_t t = 0; t < param_tensors.size(); ++t) {
        kern::axpy(-cfg.learning_rate, grad_tensors[t].data->data(),
                   param_tensors[t].data->data(), param_tensors[t].data->size());
      }
    }
    result.epoch_loss.push_back(epoch_words > 0 ? epoch_nll / static_cast<double>(epoch_words)
                                                : 0.0);
  }
  return result;
}

std::vector<int> generate(const HredParams& p, const std::vector<std::vector<int>>& context,
                          const GenerateConfig& cfg) {
  check(cfg.beams >= 1, "generate: beams must be >= 1");
  check(cfg.max_len >= 1, "generate: max_len must be >= 1");

  Vec c = zeros(p.dims.ctx_hidden);
  if (!context.empty()) {
    std::vector<Vec> h;
    h.reserve(context.size());
    for (const auto& ids : context) h.push_back(encode_utterance(p, ids));
    c = encode_context(p, h).back();
  }

  struct Hyp {
    std::vector<int> seq;
    double lp = 0.0;
    Vec d;
    int last = -1;  // -1: zero embedding for the first step
  };

  const Vec zero_emb = zeros(p.dims.embed);
  std::vector<Hyp> live;
  live.push_back({{}, 0.0, decoder_init(p, c), -1});

  struct Done {
    double lp;
    std::vector<int> seq;
  };
  std::vector<Done> completed;

  struct Cand {
    double lp;
    int token;
    std::size_t hyp;
  };

  for (std::size_t step = 0; step < cfg.max_len && !live.empty(); ++step) {
    std::vector<Cand> cands;
    cands.reserve(live.size() * p.dims.vocab);
    std::vector<Vec> logps(live.size());
    Vec w_prev(p.dims.embed);
    for (std::size_t i = 0; i < live.size(); ++i) {
      if (live[i].last < 0) {
        w_prev.assign(zero_emb.begin(), zero_emb.end());
      } else {
        std::span<const double> e = p.embedding(live[i].last);
        w_prev.assign(e.begin(), e.end());
      }
      Vec logits = predict_word_logits(p, live[i].d, w_prev);
      double mx = *std::max_element(logits.begin(), logits.end());
      double sum = 0.0;
      for (double l : logits) sum += std::exp(l - mx);
      double lse = mx + std::log(sum);
      for (double& l : logits) l -= lse;
      logps[i] = std::move(logits);
      for (std::size_t v = 0; v < p.dims.vocab; ++v) {
        if (static_cast<int>(v) == corpus::Vocabulary::kPad) continue;
        cands.push_back({live[i].lp + logps[i][v], static_cast<int>(v), i});
      }
    }
    std::size_t keep = std::min<std::size_t>(cfg.beams, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(),
                      [](const Cand& a, const Cand& b) {
                        if (a.lp != b.lp) return a.lp > b.lp;
                        if (a.token != b.token) return a.token < b.token;
                        return a.hyp < b.hyp;
                      });

    std::vector<Hyp> next;
    next.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
      const Cand& cd = cands[i];
      const Hyp& src = live[cd.hyp];
      if (cd.token == corpus::Vocabulary::kEou) {
        completed.push_back({cd.lp, src.seq});
        continue;
      }
      Hyp h;
      h.seq = src.seq;
      h.seq.push_back(cd.token);
      h.lp = cd.lp;
      std::span<const double> e = p.embedding(cd.token);
      h.d = gru_forward(p.dec, src.d, Vec(e.begin(), e.end()), nullptr);
      h.last = cd.token;
      next.push_back(std::move(h));
    }
    live = std::move(next);
  }
  for (Hyp& h : live) completed.push_back({h.lp, std::move(h.seq)});  // max_len reached

  const Done* best = nullptr;
  for (const Done& done : completed) {
    if (!best || done.lp > best->lp || (done.lp == best->lp && done.seq < best->seq)) {
      best = &done;
    }
  }
  return best ? best->seq : std::vector<int>{};
}

}  // namespace dret::hred
