#include "kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace dret::kern {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double* x, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void matvec_acc_scalar(const double* w, const double* x, double* y,
                       std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot_scalar(w + r * cols, x, cols);
}

void matvec_t_acc_scalar(const double* w, const double* y, double* x,
                         std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(y[r], w + r * cols, x, cols);
}

void ger_acc_scalar(double* a, const double* u, const double* v,
                    std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(u[r], v, a + r * cols, cols);
}

const Backend kScalar{"scalar",      dot_scalar,          axpy_scalar,
                      scale_scalar,  matvec_acc_scalar,   matvec_t_acc_scalar,
                      ger_acc_scalar};

std::atomic<const Backend*> g_active{nullptr};

const Backend* pick(std::string_view name) {
  if (name == "scalar") return &kScalar;
  if (name == "avx2") return avx2_backend();
  if (name == "neon") return neon_backend();
  if (name == "auto" || name.empty()) {
    if (const Backend* b = avx2_backend()) return b;
    if (const Backend* b = neon_backend()) return b;
    return &kScalar;
  }
  return nullptr;
}

const Backend* resolve_initial() {
  const char* env = std::getenv("DRET_KERNELS");
  if (const Backend* b = pick(env ? env : "auto")) return b;
  return &kScalar;  // unknown env value falls back to the reference
}

}  // namespace

const Backend& scalar_backend() { return kScalar; }

const Backend& active() {
  const Backend* b = g_active.load(std::memory_order_acquire);
  if (!b) {
    b = resolve_initial();
    g_active.store(b, std::memory_order_release);
  }
  return *b;
}

bool set_active(std::string_view name) {
  const Backend* b = pick(name);
  if (!b) return false;
  g_active.store(b, std::memory_order_release);
  return true;
}

}  // namespace dret::kern
