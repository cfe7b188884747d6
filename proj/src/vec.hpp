#pragma once

#include <string>
#include <vector>

namespace dret {

// Dense embedding vector. Kept in double precision internally; binary file
// formats store 32-bit floats and widen on load. A valid vector is nonempty
// and all-finite.
using Vec = std::vector<double>;

bool all_finite(const Vec& a);
// Throws std::invalid_argument naming `what` if a is empty or non-finite.
void require_valid(const Vec& a, const std::string& what);

// Sum_i a_i * b_i. Throws std::invalid_argument on dimension mismatch or
// empty input.
double dot(const Vec& a, const Vec& b);

double norm(const Vec& a);

// dot(a,b) / (|a| |b|). Zero-norm inputs are rejected with
// std::domain_error; mapping them to 0 would corrupt rankings silently.
double cosine(const Vec& a, const Vec& b);

// a's values followed by b's. Empty inputs are rejected.
Vec concat(const Vec& a, const Vec& b);

// Round through 32-bit float precision, the on-disk representation.
double f32_round(double x);
Vec f32_round(Vec v);

}  // namespace dret
