#include <doctest.h>

#include <queue>
#include <random>

#include "clausefuzz/dist/distance.hpp"

using namespace cf::dist;

// Independent BFS over an adjacency list; -1 when unreachable.
static int bfs_oracle(const std::vector<std::vector<int>>& adj, int from, int to) {
  std::vector<int> d(adj.size(), -1);
  std::queue<int> q;
  d[size_t(from)] = 0;
  q.push(from);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    if (u == to) return d[size_t(u)];
    for (int v : adj[size_t(u)])
      if (d[size_t(v)] < 0) {
        d[size_t(v)] = d[size_t(u)] + 1;
        q.push(v);
      }
  }
  return -1;
}

TEST_CASE("block distance matches a BFS oracle on random digraphs") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + int(rng() % 199);
    double p = 2.0 / n;
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    CallGraph cg;
    for (int i = 0; i < n; ++i) {
      cg.add_function(i, "f" + std::to_string(i));
      cg.add_block(i, 1000 + i);
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && std::uniform_real_distribution<>(0, 1)(rng) < p) {
          adj[size_t(i)].push_back(j);
          cg.add_edge(i, j);
        }
    for (int probe = 0; probe < 20; ++probe) {
      int a = int(rng() % uint64_t(n)), b = int(rng() % uint64_t(n));
      Block ba{a, 1000 + a}, bb{b, 1000 + b};
      Distance got = block_distance(ba, bb, cg);
      if (a == b) continue;  // same function: undefined by definition, not BFS
      int want = bfs_oracle(adj, a, b);
      if (want < 0)
        CHECK_FALSE(got.has_value());
      else {
        REQUIRE(got.has_value());
        CHECK(*got == double(want));
      }
    }
  }
}

static CallGraph line_graph(int n) {
  CallGraph cg;
  for (int i = 0; i < n; ++i) cg.add_function(i, "f" + std::to_string(i));
  for (int i = 0; i < n; ++i)
    cg.add_block(i, 10 * i, i + 1 < n ? i + 1 : -1);
  for (int i = 0; i + 1 < n; ++i) cg.add_edge(i, i + 1);
  return cg;
}

TEST_CASE("worked values: harmonic mean of {2,4} and energy at 2") {
  // f0 -> f1 -> ... -> f5; distances from f0 to f2 and f4 are 2 and 4.
  CallGraph cg = line_graph(6);
  BlockSet tbb{Block{2, 20}, Block{4, 40}};
  Distance d = dist_to_target_set(Block{0, 0}, tbb, cg);
  REQUIRE(d.has_value());
  CHECK(*d == doctest::Approx(4.0 / 3.0));
  CHECK(energy(Distance{2.0}) == doctest::Approx(0.5));
}

TEST_CASE("same function, different block is undefined") {
  CallGraph cg;
  cg.add_function(1, "f");
  cg.add_block(1, 10);
  cg.add_block(1, 11);
  CHECK_FALSE(block_distance(Block{1, 10}, Block{1, 11}, cg).has_value());
  CHECK(block_distance(Block{1, 10}, Block{1, 10}, cg) == Distance{0.0});
}

TEST_CASE("harmonic aggregation: zero short-circuits, undefined excluded") {
  CallGraph cg = line_graph(4);
  // block in f2 targeting {f2's own block, f3}: exact hit wins
  BlockSet tbb{Block{2, 20}, Block{3, 30}};
  CHECK(dist_to_target_set(Block{2, 20}, tbb, cg) == Distance{0.0});
  // unreachable-only target set is undefined
  BlockSet back{Block{0, 0}};
  CHECK_FALSE(dist_to_target_set(Block{3, 30}, back, cg).has_value());
  // mixed: unreachable term is simply excluded
  BlockSet mixed{Block{0, 0}, Block{3, 30}};
  Distance d = dist_to_target_set(Block{1, 10}, mixed, cg);
  REQUIRE(d.has_value());
  CHECK(*d == doctest::Approx(2.0));
}

TEST_CASE("chain distance sums defined terms and skips undefined ones") {
  CallGraph cg = line_graph(5);
  BlockSet tbb{Block{4, 40}};
  BlockSet sbb{Block{0, 0}, Block{1, 10}, Block{4, 41}};  // last: undefined
  cg.add_block(4, 41);
  Distance d = chain_distance(sbb, tbb, cg);
  REQUIRE(d.has_value());
  CHECK(*d == doctest::Approx(4.0 + 3.0));
}

TEST_CASE("energy caps at the extremes") {
  EnergyPolicy p;
  CHECK(energy(Distance{0.0}, p) == p.e_max);
  CHECK(energy(std::nullopt, p) == p.e_min);
  CHECK(energy(Distance{8.0}, p) == doctest::Approx(0.125));
}

TEST_CASE("target_blocks picks declared call sites of consecutive pairs") {
  CallGraph cg = line_graph(4);
  BlockSet tbb = target_blocks({0, 1, 2, 3}, cg);
  CHECK(tbb == BlockSet{Block{0, 0}, Block{1, 10}, Block{2, 20}});
}

TEST_CASE("select_target prefers similarity, then distance, then id") {
  CallGraph cg = line_graph(6);
  Target near{"b-near", {1, 2}, target_blocks({1, 2}, cg)};
  Target far{"a-far", {4, 5}, target_blocks({4, 5}, cg)};
  // seed chain overlaps both targets equally; nearer chain wins
  std::vector<FunctionId> chain{0};
  BlockSet sbb{Block{0, 0}};
  TargetChoice c = select_target(chain, sbb, {far, near}, cg);
  CHECK(c.pattern_id == "b-near");
  // equal similarity and distance: lexicographically smaller id wins
  Target twin{"a-twin", {1, 2}, target_blocks({1, 2}, cg)};
  c = select_target(chain, sbb, {near, twin}, cg);
  CHECK(c.pattern_id == "a-twin");
  // higher similarity beats shorter distance
  std::vector<FunctionId> chain2{0, 4, 5};
  BlockSet sbb2{Block{0, 0}};
  c = select_target(chain2, sbb2, {far, near}, cg);
  CHECK(c.pattern_id == "a-far");
  CHECK(c.similarity == 2);
}
