#include "lsh_forest.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

#include "kernels.hpp"
#include "rng.hpp"

namespace dret::lsh {

namespace {

void collect_subtree(const LshForest::Node* node, std::set<std::uint64_t>& out) {
  if (node->is_leaf()) {
    out.insert(node->records.begin(), node->records.end());
    return;
  }
  if (node->child[0]) collect_subtree(node->child[0].get(), out);
  if (node->child[1]) collect_subtree(node->child[1].get(), out);
}

std::uint64_t find_single(const LshForest::Node* node) {
  while (!node->is_leaf()) {
    node = node->child[0] ? node->child[0].get() : node->child[1].get();
  }
  return node->records.front();
}

std::unique_ptr<LshForest::Node> make_leaf(std::uint64_t id) {
  auto n = std::make_unique<LshForest::Node>();
  n->records.push_back(id);
  n->subtree_records = 1;
  return n;
}

std::size_t recount(LshForest::Node* node) {
  std::size_t total = node->records.size();
  for (auto& ch : node->child) {
    if (ch) total += recount(ch.get());
  }
  node->subtree_records = total;
  return total;
}

}  // namespace

int HashFunction::bit(const Vec& p) const {
  return kern::dot(hyperplane.data(), p.data(), p.size()) >= 0.0 ? 1 : 0;
}

LshForest::LshForest(std::size_t dim, const ForestConfig& cfg) : dim_(dim), cfg_(cfg) {
  if (dim_ == 0) throw std::invalid_argument("LshForest: dim must be >= 1");
  if (cfg_.trees == 0) throw std::invalid_argument("LshForest: trees must be >= 1");
  if (cfg_.max_label_len == 0) throw std::invalid_argument("LshForest: max_label_len must be >= 1");

  Rng rng(cfg_.seed);
  trees_.resize(cfg_.trees);
  for (auto& tree : trees_) {
    tree.levels.resize(cfg_.max_label_len);
    for (auto& fn : tree.levels) {
      do {
        fn.hyperplane.resize(dim_);
        for (double& x : fn.hyperplane) x = rng.normal();
      } while (norm(fn.hyperplane) == 0.0);
    }
  }
}

LshForest::LshForest(std::size_t dim, const ForestConfig& cfg, std::vector<Tree> trees,
                     std::map<std::uint64_t, Vec> records)
    : dim_(dim), cfg_(cfg), trees_(std::move(trees)), records_(std::move(records)) {
  if (trees_.size() != cfg_.trees) throw std::invalid_argument("LshForest: tree count mismatch");
  for (auto& tree : trees_) {
    if (tree.levels.size() != cfg_.max_label_len) {
      throw std::invalid_argument("LshForest: hash function count mismatch");
    }
    recount(&tree.root);
    if (tree.root.subtree_records != records_.size()) {
      throw std::invalid_argument("LshForest: trie record count mismatch");
    }
    verify_tree(tree);
  }
}

void LshForest::verify_tree(const Tree& t) const {
  // every record must sit on the path its hash bits dictate
  for (const auto& [id, v] : records_) {
    const Node* node = &t.root;
    std::size_t depth = 0;
    while (!node->is_leaf()) {
      const Node* next = node->child[t.levels[depth].bit(v)].get();
      if (!next) throw std::invalid_argument("LshForest: record path broken in trie");
      node = next;
      ++depth;
    }
    if (std::find(node->records.begin(), node->records.end(), id) == node->records.end()) {
      throw std::invalid_argument("LshForest: record " + std::to_string(id) +
                                  " not at its label leaf");
    }
  }
}

void LshForest::insert(std::uint64_t id, Vec p) {
  require_valid(p, "LshForest::insert");
  if (p.size() != dim_) throw std::invalid_argument("LshForest::insert: dim mismatch");
  if (norm(p) == 0.0) throw std::invalid_argument("LshForest::insert: zero-norm vector");
  if (records_.count(id)) {
    throw std::invalid_argument("LshForest::insert: duplicate id " + std::to_string(id));
  }
  auto [it, ok] = records_.emplace(id, std::move(p));
  (void)ok;
  for (auto& tree : trees_) insert_into_tree(tree, id, it->second);
}

void LshForest::insert_into_tree(Tree& t, std::uint64_t id, const Vec& v) {
  Node* node = &t.root;
  std::size_t depth = 0;
  ++node->subtree_records;
  while (true) {
    if (node->is_leaf()) {
      if (node->records.empty() || depth == cfg_.max_label_len) {
        node->records.push_back(id);
        return;
      }
      // a leaf below the cap holds exactly one record; push both down
      // until their labels diverge or the cap is hit
      std::uint64_t other = node->records.front();
      node->records.clear();
      const Vec& ov = records_.at(other);
      while (true) {
        int pb = t.levels[depth].bit(v);
        int ob = t.levels[depth].bit(ov);
        if (pb != ob) {
          node->child[pb] = make_leaf(id);
          node->child[ob] = make_leaf(other);
          return;
        }
        auto mid = std::make_unique<Node>();
        mid->subtree_records = 2;
        Node* next = mid.get();
        node->child[pb] = std::move(mid);
        node = next;
        ++depth;
        if (depth == cfg_.max_label_len) {
          node->records = {other, id};
          return;
        }
      }
    }
    int b = t.levels[depth].bit(v);
    if (!node->child[b]) {
      node->child[b] = make_leaf(id);
      return;
    }
    node = node->child[b].get();
    ++node->subtree_records;
    ++depth;
  }
}

void LshForest::remove(std::uint64_t id) {
  auto it = records_.find(id);
  if (it == records_.end()) {
    throw std::invalid_argument("LshForest::remove: unknown id " + std::to_string(id));
  }
  for (auto& tree : trees_) remove_rec(tree, &tree.root, 0, id, it->second);
  records_.erase(it);
}

void LshForest::remove_rec(Tree& t, Node* node, std::size_t depth, std::uint64_t id,
                           const Vec& v) {
  --node->subtree_records;
  if (node->is_leaf()) {
    auto pos = std::find(node->records.begin(), node->records.end(), id);
    if (pos == node->records.end()) {
      throw std::logic_error("LshForest::remove: record missing from its leaf");
    }
    node->records.erase(pos);
    return;
  }
  int b = t.levels[depth].bit(v);
  Node* ch = node->child[b].get();
  if (!ch) throw std::logic_error("LshForest::remove: broken trie path");
  remove_rec(t, ch, depth + 1, id, v);
  if (ch->subtree_records == 0) node->child[b].reset();
  if (node->subtree_records == 1) {
    // a lone record never sits below an internal chain; pull it up here
    std::uint64_t only = find_single(node);
    node->child[0].reset();
    node->child[1].reset();
    node->records = {only};
  }
}

std::vector<std::uint64_t> LshForest::query(const Vec& q, std::size_t m) const {
  if (m == 0) throw std::invalid_argument("LshForest::query: m must be >= 1");
  if (records_.empty()) throw std::domain_error("LshForest::query: empty forest");
  require_valid(q, "LshForest::query");
  if (q.size() != dim_) throw std::invalid_argument("LshForest::query: dim mismatch");

  // phase 1: per-tree descent along q's bits
  std::vector<std::vector<const Node*>> paths(trees_.size());
  std::size_t deepest = 0;
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    const Node* node = &trees_[t].root;
    std::size_t depth = 0;
    paths[t].push_back(node);
    while (!node->is_leaf()) {
      const Node* next = node->child[trees_[t].levels[depth].bit(q)].get();
      if (!next) break;
      node = next;
      ++depth;
      paths[t].push_back(node);
    }
    deepest = std::max(deepest, depth);
  }

  // phase 2: synchronous bottom-up accumulation across trees
  std::set<std::uint64_t> collected;
  for (std::size_t level = deepest;; --level) {
    for (const auto& path : paths) {
      collect_subtree(path[std::min(level, path.size() - 1)], collected);
    }
    if (collected.size() >= m || level == 0) break;
  }

  // exact cosine re-ranking of the accumulated set
  std::vector<std::pair<double, std::uint64_t>> scored;
  scored.reserve(collected.size());
  for (std::uint64_t id : collected) {
    scored.emplace_back(cosine(records_.at(id), q), id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (scored.size() > m) scored.resize(m);

  std::vector<std::uint64_t> out;
  out.reserve(scored.size());
  for (const auto& [score, id] : scored) out.push_back(id);
  return out;
}

}  // namespace dret::lsh
