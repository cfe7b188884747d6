#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "vec.hpp"

namespace dret::lsh {

// Sign of a random-hyperplane projection, the standard hash family for
// the cosine metric: collision probability for points at angle theta is
// 1 - theta/pi.
struct HashFunction {
  Vec hyperplane;
  int bit(const Vec& p) const;  // 1 if dot(hyperplane, p) >= 0, else 0
};

struct ForestConfig {
  std::size_t trees = 10;          // l
  std::size_t max_label_len = 32;  // k_m, the tree depth cap
  std::uint64_t seed = 1;
};

// l binary prefix trees over variable-length hash-bit labels. A record's
// label in a tree is h_1(p), h_2(p), ... — one hash function per level —
// and its leaf sits at the depth where the label diverges from every
// other record's, capped at k_m (near-identical points share a cap
// leaf). Queries run in two phases: per-tree descent along the query's
// bits, then synchronous bottom-up accumulation from the deepest reached
// level until enough distinct records are collected; collected records
// are re-ranked by exact cosine.
class LshForest {
 public:
  struct Node {
    std::unique_ptr<Node> child[2];
    std::vector<std::uint64_t> records;  // nonempty only in leaves
    std::size_t subtree_records = 0;
    bool is_leaf() const { return !child[0] && !child[1]; }
  };

  struct Tree {
    std::vector<HashFunction> levels;  // max_label_len functions
    Node root;
  };

  // Samples trees * max_label_len hyperplanes from the seeded generator.
  LshForest(std::size_t dim, const ForestConfig& cfg);
  // Deserialization: adopts fully built trees; recounts and verifies
  // every record's trie path.
  LshForest(std::size_t dim, const ForestConfig& cfg, std::vector<Tree> trees,
            std::map<std::uint64_t, Vec> records);

  LshForest(LshForest&&) = default;
  LshForest& operator=(LshForest&&) = default;

  // Rejects duplicate ids and zero-norm vectors.
  void insert(std::uint64_t id, Vec p);
  // Removes id from every tree, pruning and re-collapsing the tries so
  // the structure matches a fresh build without the record.
  void remove(std::uint64_t id);
  // Top-m record ids by descending cosine to q, ties broken by lower id.
  // Returns fewer than m only when the forest holds fewer records.
  std::vector<std::uint64_t> query(const Vec& q, std::size_t m) const;

  std::size_t size() const { return records_.size(); }
  std::size_t dim() const { return dim_; }
  const ForestConfig& config() const { return cfg_; }
  const std::map<std::uint64_t, Vec>& records() const { return records_; }
  const std::vector<Tree>& trees() const { return trees_; }

 private:
  void insert_into_tree(Tree& t, std::uint64_t id, const Vec& v);
  void remove_rec(Tree& t, Node* node, std::size_t depth, std::uint64_t id, const Vec& v);
  void verify_tree(const Tree& t) const;

  std::size_t dim_ = 0;
  ForestConfig cfg_;
  std::vector<Tree> trees_;
  std::map<std::uint64_t, Vec> records_;
};

}  // namespace dret::lsh
