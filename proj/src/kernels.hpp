#pragma once

#include <cstddef>
#include <string_view>

namespace dret::kern {

// Dense double-precision kernels behind the vector math. Buffers never
// alias; matrices are row-major. The scalar backend accumulates strictly
// left to right and is the reference semantics for every other variant.
struct Backend {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scale)(double* x, double alpha, std::size_t n);
  // y += W * x, W is rows x cols
  void (*matvec_acc)(const double* w, const double* x, double* y,
                     std::size_t rows, std::size_t cols);
  // x += W^T * y
  void (*matvec_t_acc)(const double* w, const double* y, double* x,
                       std::size_t rows, std::size_t cols);
  // A += u * v^T
  void (*ger_acc)(double* a, const double* u, const double* v,
                  std::size_t rows, std::size_t cols);
};

const Backend& scalar_backend();
// Vector variants; nullptr when the build target or host CPU lacks them.
const Backend* avx2_backend();
const Backend* neon_backend();

// Active backend, resolved once on first use. DRET_KERNELS=scalar|avx2|neon
// forces a choice; otherwise the best supported variant wins.
const Backend& active();
// Switch backends ("scalar", "avx2", "neon", "auto"). Returns false and
// leaves the selection unchanged if the requested variant is unavailable.
bool set_active(std::string_view name);

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void scale(double* x, double alpha, std::size_t n) {
  active().scale(x, alpha, n);
}
inline void matvec_acc(const double* w, const double* x, double* y,
                       std::size_t rows, std::size_t cols) {
  active().matvec_acc(w, x, y, rows, cols);
}
inline void matvec_t_acc(const double* w, const double* y, double* x,
                         std::size_t rows, std::size_t cols) {
  active().matvec_t_acc(w, y, x, rows, cols);
}
inline void ger_acc(double* a, const double* u, const double* v,
                    std::size_t rows, std::size_t cols) {
  active().ger_acc(a, u, v, rows, cols);
}

}  // namespace dret::kern
