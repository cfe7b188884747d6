#include "vec.hpp"

#include <cmath>
#include <stdexcept>

#include "kernels.hpp"

namespace dret {

bool all_finite(const Vec& a) {
  for (double x : a) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void require_valid(const Vec& a, const std::string& what) {
  if (a.empty()) throw std::invalid_argument(what + ": vector must have dim >= 1");
  if (!all_finite(a)) throw std::invalid_argument(what + ": vector has non-finite values");
}

double dot(const Vec& a, const Vec& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("dot: vector must have dim >= 1");
  if (a.size() != b.size()) {
    throw std::invalid_argument("dot: dimension mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
  return kern::dot(a.data(), b.data(), a.size());
}

double norm(const Vec& a) { return std::sqrt(kern::dot(a.data(), a.data(), a.size())); }

double cosine(const Vec& a, const Vec& b) {
  double num = dot(a, b);
  double na = norm(a);
  double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw std::domain_error("cosine: zero-norm vector");
  return num / (na * nb);
}

Vec concat(const Vec& a, const Vec& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("concat: vector must have dim >= 1");
  Vec out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

double f32_round(double x) { return static_cast<double>(static_cast<float>(x)); }

Vec f32_round(Vec v) {
  for (double& x : v) x = f32_round(x);
  return v;
}

}  // namespace dret
