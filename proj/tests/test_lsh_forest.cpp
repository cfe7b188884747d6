#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lsh_forest.hpp"
#include "rng.hpp"
#include "serialize.hpp"
#include "vec.hpp"

using dret::Rng;
using dret::Vec;
using dret::lsh::ForestConfig;
using dret::lsh::HashFunction;
using dret::lsh::LshForest;

namespace {

Vec random_gaussian(Rng& rng, std::size_t dim) {
  Vec v(dim);
  for (double& x : v) x = rng.normal();
  return v;
}

// exact ranking oracle: cosine descending, lower id on ties
std::vector<std::uint64_t> brute_force(const std::vector<std::pair<std::uint64_t, Vec>>& recs,
                                       const Vec& q, std::size_t m) {
  std::vector<std::pair<double, std::uint64_t>> scored;
  for (const auto& [id, v] : recs) scored.emplace_back(dret::cosine(v, q), id);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (scored.size() > m) scored.resize(m);
  std::vector<std::uint64_t> out;
  for (const auto& [s, id] : scored) out.push_back(id);
  return out;
}

std::string forest_bytes(const LshForest& f) {
  std::ostringstream out;
  dret::io::write_forest(out, f);
  return out.str();
}

// independent path check: recompute every record's bits and follow them
void check_trie_paths(const LshForest& f) {
  for (const auto& tree : f.trees()) {
    for (const auto& [id, v] : f.records()) {
      const LshForest::Node* node = &tree.root;
      std::size_t depth = 0;
      while (!node->is_leaf()) {
        int bit = tree.levels[depth].bit(v);
        REQUIRE(node->child[bit] != nullptr);
        node = node->child[bit].get();
        ++depth;
      }
      CHECK(depth <= f.config().max_label_len);
      CHECK(std::count(node->records.begin(), node->records.end(), id) == 1);
    }
  }
}

}  // namespace

TEST_SUITE("lsh_forest") {

TEST_CASE("hash bit is the projection sign") {
  HashFunction h{{1.0, 0.0}};
  CHECK(h.bit({2.0, 0.0}) == 1);
  CHECK(h.bit({-1.0, 0.0}) == 0);

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    HashFunction hf{random_gaussian(rng, 6)};
    Vec p = random_gaussian(rng, 6);
    Vec p3(6);
    for (std::size_t i = 0; i < 6; ++i) p3[i] = 3.0 * p[i];
    CHECK(hf.bit(p) == hf.bit(p3));  // scale invariance of the sign
  }
}

TEST_CASE("insert into an empty forest puts the record at the root") {
  LshForest f(4, {3, 8, 5});
  f.insert(0, {1.0, 0.5, -0.5, 0.25});
  CHECK(f.size() == 1);
  for (const auto& tree : f.trees()) {
    CHECK(tree.root.is_leaf());
    CHECK(tree.root.records == std::vector<std::uint64_t>{0});
  }
}

TEST_CASE("opposite vectors split at the first bit") {
  LshForest f(4, {3, 8, 5});
  Vec v = {0.8, -0.3, 0.5, 0.1};
  Vec neg(4);
  for (std::size_t i = 0; i < 4; ++i) neg[i] = -v[i];
  f.insert(1, v);
  f.insert(2, neg);
  for (const auto& tree : f.trees()) {
    CHECK_FALSE(tree.root.is_leaf());
    REQUIRE(tree.root.child[0] != nullptr);
    REQUIRE(tree.root.child[1] != nullptr);
    CHECK(tree.root.child[0]->is_leaf());
    CHECK(tree.root.child[1]->is_leaf());
  }
  check_trie_paths(f);
}

TEST_CASE("identical vectors share a leaf at the depth cap") {
  const std::size_t cap = 6;
  LshForest f(4, {2, cap, 7});
  Vec v = {0.8, -0.3, 0.5, 0.1};
  f.insert(10, v);
  f.insert(20, v);
  for (const auto& tree : f.trees()) {
    const LshForest::Node* node = &tree.root;
    std::size_t depth = 0;
    while (!node->is_leaf()) {
      const LshForest::Node* next = node->child[0] ? node->child[0].get() : node->child[1].get();
      REQUIRE(next != nullptr);
      node = next;
      ++depth;
    }
    CHECK(depth == cap);
    CHECK(node->records.size() == 2);
  }
}

TEST_CASE("duplicate ids and empty queries are rejected") {
  LshForest f(2, {2, 8, 9});
  CHECK_THROWS_AS(f.query({1.0, 0.0}, 1), std::domain_error);  // empty forest
  f.insert(5, {1.0, 0.0});
  CHECK_THROWS_AS(f.insert(5, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(f.insert(6, {0.0, 0.0}), std::invalid_argument);  // zero norm
  CHECK_THROWS_AS(f.remove(42), std::invalid_argument);
}

TEST_CASE("insert then remove restores the previous structure byte for byte") {
  Rng rng(17);
  LshForest f(8, {4, 16, 23});
  for (std::uint64_t id = 0; id < 20; ++id) f.insert(id, random_gaussian(rng, 8));
  std::string before = forest_bytes(f);

  Vec extra = random_gaussian(rng, 8);
  f.insert(99, extra);
  CHECK(forest_bytes(f) != before);
  f.remove(99);
  CHECK(forest_bytes(f) == before);
  check_trie_paths(f);
}

TEST_CASE("removing the only record empties the forest") {
  LshForest f(2, {2, 8, 9});
  f.insert(1, {1.0, 0.5});
  f.remove(1);
  CHECK(f.size() == 0);
  for (const auto& tree : f.trees()) {
    CHECK(tree.root.is_leaf());
    CHECK(tree.root.records.empty());
  }
}

TEST_CASE("removing one of two identical records keeps the other") {
  LshForest f(3, {2, 6, 11});
  Vec v = {0.5, -1.0, 0.25};
  f.insert(1, v);
  f.insert(2, v);
  f.remove(1);
  CHECK(f.size() == 1);
  std::vector<std::uint64_t> got = f.query(v, 1);
  CHECK(got == std::vector<std::uint64_t>{2});
  // the survivor is pulled back up to the root
  for (const auto& tree : f.trees()) {
    CHECK(tree.root.is_leaf());
    CHECK(tree.root.records == std::vector<std::uint64_t>{2});
  }
}

TEST_CASE("trie paths stay consistent under churn") {
  Rng rng(29);
  LshForest f(4, {3, 10, 31});
  std::vector<std::uint64_t> live;
  for (std::uint64_t id = 0; id < 60; ++id) {
    f.insert(id, random_gaussian(rng, 4));
    live.push_back(id);
  }
  check_trie_paths(f);
  // remove every third record
  for (std::size_t i = 0; i < live.size(); i += 3) f.remove(live[i]);
  check_trie_paths(f);
}

TEST_CASE("single record is returned for any query") {
  LshForest f(3, {5, 8, 13});
  f.insert(7, {0.3, 0.4, -0.2});
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    Vec q = random_gaussian(rng, 3);
    CHECK(f.query(q, 3) == std::vector<std::uint64_t>{7});
  }
}

TEST_CASE("querying a stored vector returns it first") {
  Rng rng(37);
  LshForest f(8, {5, 16, 41});
  std::vector<Vec> vs;
  for (std::uint64_t id = 0; id < 30; ++id) {
    vs.push_back(random_gaussian(rng, 8));
    f.insert(id, vs.back());
  }
  for (std::uint64_t id = 0; id < 30; id += 7) {
    std::vector<std::uint64_t> got = f.query(vs[id], 1);
    REQUIRE(got.size() == 1);
    CHECK(got[0] == id);
  }
}

TEST_CASE("full-budget queries reproduce the exact cosine ranking") {
  Rng rng(43);
  for (std::size_t count : {1, 2, 3, 5, 8, 13, 16}) {
    LshForest f(6, {4, 12, count});
    std::vector<std::pair<std::uint64_t, Vec>> recs;
    for (std::uint64_t id = 0; id < count; ++id) {
      Vec v = random_gaussian(rng, 6);
      recs.emplace_back(id, v);
      f.insert(id, v);
    }
    for (int trial = 0; trial < 5; ++trial) {
      Vec q = random_gaussian(rng, 6);
      CHECK(f.query(q, count + 3) == brute_force(recs, q, count + 3));
    }
  }
}

TEST_CASE("hyperplane collisions follow the angle law") {
  // P[bit_a == bit_b] = 1 - theta/pi for sign random projections
  Rng rng(47);
  const std::size_t dim = 8;
  for (int pair = 0; pair < 3; ++pair) {
    Vec a = random_gaussian(rng, dim);
    Vec b = random_gaussian(rng, dim);
    double theta = std::acos(std::clamp(dret::cosine(a, b), -1.0, 1.0));
    std::size_t same = 0;
    const std::size_t n = 10000;
    for (std::size_t i = 0; i < n; ++i) {
      HashFunction h{random_gaussian(rng, dim)};
      if (h.bit(a) == h.bit(b)) ++same;
    }
    double empirical = static_cast<double>(same) / static_cast<double>(n);
    CHECK(std::abs(empirical - (1.0 - theta / 3.14159265358979323846)) <= 0.05);
  }
}

TEST_CASE("identical seeds build identical forests") {
  Rng ra(53);
  Rng rb(53);
  ForestConfig cfg{4, 12, 77};
  LshForest f1(8, cfg);
  LshForest f2(8, cfg);
  for (std::uint64_t id = 0; id < 40; ++id) {
    Vec v = random_gaussian(ra, 8);
    Vec w = random_gaussian(rb, 8);
    f1.insert(id, v);
    f2.insert(id, w);
  }
  CHECK(forest_bytes(f1) == forest_bytes(f2));
}

TEST_CASE("nearest-neighbor recall improves with more trees") {
  // scaled-down version of the acceptance benchmark
  Rng rng(59);
  const std::size_t dim = 16;
  const std::size_t count = 300;
  std::vector<std::pair<std::uint64_t, Vec>> recs;
  for (std::uint64_t id = 0; id < count; ++id) recs.emplace_back(id, random_gaussian(rng, dim));

  auto recall_with_trees = [&](std::size_t trees) {
    LshForest f(dim, {trees, 32, 61});
    for (const auto& [id, v] : recs) f.insert(id, v);
    Rng qrng(67);
    std::size_t hits = 0;
    const std::size_t queries = 40;
    for (std::size_t qi = 0; qi < queries; ++qi) {
      Vec q = random_gaussian(qrng, dim);
      std::uint64_t nn = brute_force(recs, q, 1)[0];
      std::vector<std::uint64_t> got = f.query(q, 10);
      if (std::find(got.begin(), got.end(), nn) != got.end()) ++hits;
    }
    return hits;
  };

  std::size_t hits10 = recall_with_trees(10);
  std::size_t hits1 = recall_with_trees(1);
  CHECK(hits10 >= hits1);
  CHECK(hits10 >= 30);  // 75% on the small benchmark
}

}  // TEST_SUITE
