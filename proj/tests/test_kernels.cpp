#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "kernels.hpp"
#include "rng.hpp"

using dret::Rng;
namespace kern = dret::kern;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

void check_close(double a, double b, double tol = 1e-12) {
  CHECK(std::abs(a - b) <= tol * (1.0 + std::abs(a) + std::abs(b)));
}

void check_close_vec(const std::vector<double>& a, const std::vector<double>& b,
                     double tol = 1e-12) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) check_close(a[i], b[i], tol);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar dot matches hand sums") {
  const auto& b = kern::scalar_backend();
  double a1[] = {1.0, 0.0, 2.0};
  double b1[] = {3.0, 1.0, 1.0};
  CHECK(b.dot(a1, b1, 3) == 5.0);
  CHECK(b.dot(a1, a1, 3) == 5.0);
  CHECK(b.dot(a1, b1, 0) == 0.0);
}

TEST_CASE("scalar matvec and ger match explicit loops") {
  const auto& b = kern::scalar_backend();
  // W = [[1,2],[3,4],[5,6]], x = [1,-1]
  double w[] = {1, 2, 3, 4, 5, 6};
  double x[] = {1, -1};
  double y[] = {10, 20, 30};
  b.matvec_acc(w, x, y, 3, 2);
  CHECK(y[0] == 10 - 1);
  CHECK(y[1] == 20 - 1);
  CHECK(y[2] == 30 - 1);

  double dy[] = {1, 0, 2};
  double dx[] = {0, 0};
  b.matvec_t_acc(w, dy, dx, 3, 2);
  CHECK(dx[0] == 1 * 1 + 0 * 3 + 2 * 5);
  CHECK(dx[1] == 1 * 2 + 0 * 4 + 2 * 6);

  double a[] = {0, 0, 0, 0};
  double u[] = {2, -1};
  double v[] = {3, 5};
  b.ger_acc(a, u, v, 2, 2);
  CHECK(a[0] == 6);
  CHECK(a[1] == 10);
  CHECK(a[2] == -3);
  CHECK(a[3] == -5);
}

TEST_CASE("vector backends agree with the scalar reference") {
  std::vector<const kern::Backend*> variants;
  if (const auto* b = kern::avx2_backend()) variants.push_back(b);
  if (const auto* b = kern::neon_backend()) variants.push_back(b);
  if (variants.empty()) return;  // nothing to compare on this host

  const auto& ref = kern::scalar_backend();
  Rng rng(99);
  for (const auto* backend : variants) {
    CAPTURE(backend->name);
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 64, 100, 257}) {
      auto a = random_vec(rng, n);
      auto b = random_vec(rng, n);
      check_close(backend->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n));

      auto y1 = random_vec(rng, n);
      auto y2 = y1;
      backend->axpy(0.37, a.data(), y1.data(), n);
      ref.axpy(0.37, a.data(), y2.data(), n);
      check_close_vec(y1, y2);

      auto s1 = a;
      auto s2 = a;
      backend->scale(s1.data(), -1.25, n);
      ref.scale(s2.data(), -1.25, n);
      check_close_vec(s1, s2);
    }
    using Shape = std::pair<std::size_t, std::size_t>;
    for (auto [rows, cols] :
         {Shape{3, 5}, Shape{8, 8}, Shape{1, 17}, Shape{13, 4}, Shape{32, 33}}) {
      auto w = random_vec(rng, rows * cols);
      auto x = random_vec(rng, cols);
      auto yv = random_vec(rng, rows);
      auto y1 = yv;
      auto y2 = yv;
      backend->matvec_acc(w.data(), x.data(), y1.data(), rows, cols);
      ref.matvec_acc(w.data(), x.data(), y2.data(), rows, cols);
      check_close_vec(y1, y2);

      auto dx1 = random_vec(rng, cols);
      auto dx2 = dx1;
      backend->matvec_t_acc(w.data(), yv.data(), dx1.data(), rows, cols);
      ref.matvec_t_acc(w.data(), yv.data(), dx2.data(), rows, cols);
      check_close_vec(dx1, dx2);

      auto a1 = random_vec(rng, rows * cols);
      auto a2 = a1;
      backend->ger_acc(a1.data(), yv.data(), x.data(), rows, cols);
      ref.ger_acc(a2.data(), yv.data(), x.data(), rows, cols);
      check_close_vec(a1, a2);
    }
  }
}

TEST_CASE("each backend is bit-deterministic") {
  std::vector<const kern::Backend*> variants{&kern::scalar_backend()};
  if (const auto* b = kern::avx2_backend()) variants.push_back(b);
  if (const auto* b = kern::neon_backend()) variants.push_back(b);

  Rng rng(7);
  auto a = random_vec(rng, 123);
  auto b = random_vec(rng, 123);
  for (const auto* backend : variants) {
    double d1 = backend->dot(a.data(), b.data(), a.size());
    double d2 = backend->dot(a.data(), b.data(), a.size());
    CHECK(d1 == d2);
  }
}

TEST_CASE("set_active switches and rejects unknown names") {
  CHECK(kern::set_active("scalar"));
  CHECK(std::string(kern::active().name) == "scalar");
  CHECK_FALSE(kern::set_active("gpu"));
  CHECK(std::string(kern::active().name) == "scalar");
  CHECK(kern::set_active("auto"));
}

}  // TEST_SUITE
