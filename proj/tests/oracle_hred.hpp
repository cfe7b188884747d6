#pragma once

// Loop-based scalar reference for the encoder/decoder math. Kept
// deliberately independent of the library's kernel path: plain nested
// loops over the parameter fields, nothing shared with src/ beyond the
// parameter struct itself.

#include <cmath>
#include <cstddef>
#include <vector>

#include "hred.hpp"

namespace oracle {

using dret::Vec;

inline double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct GruParts {
  Vec z, r, hcand, h;
};

inline GruParts gru_parts(const dret::hred::GruParams& p, const Vec& h_prev, const Vec& x) {
  const std::size_t H = p.hidden_dim;
  const std::size_t I = p.input_dim;
  GruParts out;
  out.z.resize(H);
  out.r.resize(H);
  out.hcand.resize(H);
  out.h.resize(H);
  for (std::size_t i = 0; i < H; ++i) {
    double az = p.b_z[i];
    double ar = p.b_r[i];
    for (std::size_t j = 0; j < I; ++j) {
      az += p.w_z[i * I + j] * x[j];
      ar += p.w_r[i * I + j] * x[j];
    }
    for (std::size_t j = 0; j < H; ++j) {
      az += p.u_z[i * H + j] * h_prev[j];
      ar += p.u_r[i * H + j] * h_prev[j];
    }
    out.z[i] = sig(az);
    out.r[i] = sig(ar);
  }
  for (std::size_t i = 0; i < H; ++i) {
    double ah = p.b_h[i];
    for (std::size_t j = 0; j < I; ++j) ah += p.w_h[i * I + j] * x[j];
    for (std::size_t j = 0; j < H; ++j) ah += p.u_h[i * H + j] * (out.r[j] * h_prev[j]);
    out.hcand[i] = std::tanh(ah);
    out.h[i] = out.z[i] * h_prev[i] + (1.0 - out.z[i]) * out.hcand[i];
  }
  return out;
}

inline Vec gru_step(const dret::hred::GruParams& p, const Vec& h_prev, const Vec& x) {
  return gru_parts(p, h_prev, x).h;
}

inline Vec embedding(const dret::hred::HredParams& p, int id) {
  const std::size_t E = p.dims.embed;
  Vec e(E);
  for (std::size_t j = 0; j < E; ++j) {
    e[j] = p.word_embeddings[static_cast<std::size_t>(id) * E + j];
  }
  return e;
}

inline Vec encode_utterance(const dret::hred::HredParams& p, const std::vector<int>& ids) {
  Vec h(p.dims.utt_hidden, 0.0);
  for (int id : ids) h = oracle::gru_step(p.utt, h, embedding(p, id));
  return h;
}

inline std::vector<Vec> encode_context(const dret::hred::HredParams& p,
                                       const std::vector<Vec>& hs) {
  std::vector<Vec> out;
  Vec c(p.dims.ctx_hidden, 0.0);
  for (const Vec& h : hs) {
    c = oracle::gru_step(p.ctx, c, h);
    out.push_back(c);
  }
  return out;
}

inline Vec decoder_init(const dret::hred::HredParams& p, const Vec& c_prev) {
  const std::size_t D = p.dims.dec_hidden;
  const std::size_t C = p.dims.ctx_hidden;
  Vec d(D);
  for (std::size_t i = 0; i < D; ++i) {
    double a = p.b0_init[i];
    for (std::size_t j = 0; j < C; ++j) a += p.d0[i * C + j] * c_prev[j];
    d[i] = std::tanh(a);
  }
  return d;
}

inline Vec predict_word_logits(const dret::hred::HredParams& p, const Vec& d_prev,
                               const Vec& w_prev) {
  const std::size_t E = p.dims.embed;
  const std::size_t D = p.dims.dec_hidden;
  Vec what(E);
  for (std::size_t i = 0; i < E; ++i) {
    double a = p.b0_out[i];
    for (std::size_t j = 0; j < D; ++j) a += p.h0[i * D + j] * d_prev[j];
    for (std::size_t j = 0; j < E; ++j) a += p.e0[i * E + j] * w_prev[j];
    what[i] = a;
  }
  Vec logits(p.dims.vocab);
  for (std::size_t v = 0; v < p.dims.vocab; ++v) {
    double a = 0.0;
    for (std::size_t j = 0; j < E; ++j) a += p.word_embeddings[v * E + j] * what[j];
    logits[v] = a;
  }
  return logits;
}

inline Vec softmax(const Vec& logits) {
  Vec out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i]);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

}  // namespace oracle
