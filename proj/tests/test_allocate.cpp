#include <doctest.h>

#include <chrono>

#include "linenet/allocate.hpp"
#include "linenet/delay.hpp"
#include "linenet/errors.hpp"
#include "linenet/rbie.hpp"

using namespace linenet;

namespace {

// Every vector with positive entries and sum <= budget, in lexicographic order.
void enumerate(int relays, int budget, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == relays) {
    out.push_back(cur);
    return;
  }
  const int left = relays - static_cast<int>(cur.size()) - 1;
  for (int v = 1; v <= budget - left; ++v) {
    cur.push_back(v);
    enumerate(relays, budget - v, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> all_vectors(int relays, int budget) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  enumerate(relays, budget, cur, out);
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TEST_CASE("composition count") {
  for (int r = 1; r <= 4; ++r)
    for (int b = r; b <= 14; ++b) CHECK(alloc::composition_count(r, b) == all_vectors(r, b).size());
  CHECK(alloc::composition_count(3, 30) == 4060);
  CHECK(alloc::composition_count(2, 1) == 0);
}

TEST_CASE("exhaustive search finds the re-enumerated maximum") {
  const std::vector<std::vector<double>> cases{{0.3, 0.5, 0.5, 0.2}, {0.1, 0.6, 0.2}, {0.4, 0.4, 0.3, 0.5, 0.2}};
  for (const auto& eps : cases) {
    const int relays = static_cast<int>(eps.size()) - 1;
    const int budget = 3 * relays + 3;
    double best = -1.0;
    for (const auto& m : all_vectors(relays, budget))
      best = std::max(best, rbie::capacity(rbie::solve(NetworkSpec(eps, m))));
    alloc::Options o;
    o.budget = budget;
    o.method = alloc::Method::Exhaustive;
    o.rescore = false;
    const auto res = alloc::allocate(eps, o);
    CHECK(res.best.throughput == doctest::Approx(best).epsilon(1e-12));
    CHECK(res.evaluated == static_cast<long>(all_vectors(relays, budget).size()));
    int sum = 0;
    for (int v : res.best.buffers) {
      CHECK(v >= 1);
      sum += v;
    }
    CHECK(sum <= budget);
    for (std::size_t k = 1; k < res.top.size(); ++k) CHECK(res.top[k - 1].throughput >= res.top[k].throughput);
  }
}

TEST_CASE("minimum delay respects the throughput floor") {
  const std::vector<double> eps{0.3, 0.5, 0.5, 0.2};
  alloc::Options o;
  o.budget = 15;
  o.objective = alloc::Objective::MinDelay;
  o.floor = 0.45;
  o.method = alloc::Method::Exhaustive;
  o.rescore = false;
  const auto res = alloc::allocate(eps, o);
  CHECK(res.best.throughput >= 0.45);
  double best = 1e300;
  for (const auto& m : all_vectors(3, 15)) {
    const NetworkSpec spec(eps, m);
    const auto sol = rbie::solve(spec);
    if (rbie::capacity(sol) >= 0.45) best = std::min(best, delay::mean_delay_little(sol, spec).mean);
  }
  CHECK(res.best.delay == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("infeasible budget") {
  alloc::Options o;
  o.budget = 2;
  CHECK_THROWS_AS(alloc::allocate({0.3, 0.5, 0.5, 0.2}, o), ValidationError);
  CHECK_THROWS_AS(alloc::parse_objective("fastest"), ValidationError);
}

TEST_CASE("re-scoring attaches distribution-based and exact estimates") {
  alloc::Options o;
  o.budget = 9;
  o.top_k = 3;
  const auto res = alloc::allocate({0.3, 0.5, 0.5, 0.2}, o);
  REQUIRE(res.top.size() == 3);
  for (const auto& c : res.top) {
    REQUIRE(c.dbie);
    REQUIRE(c.exact);
    CHECK(std::abs(*c.dbie - *c.exact) <= 0.01 * *c.exact);
  }
}

TEST_CASE("four-hop allocations with budget 30") {
  const std::vector<double> eps{0.3, 0.5, 0.5, 0.2};
  alloc::Options o;
  o.budget = 30;
  o.rescore = false;
  auto t0 = std::chrono::steady_clock::now();
  const auto thr = alloc::allocate(eps, o);
  CHECK(seconds_since(t0) < 60.0);
  CHECK(thr.best.buffers == std::vector<int>{5, 21, 4});
  CHECK(std::abs(thr.best.throughput - 0.4871) <= 1e-4);

  o.objective = alloc::Objective::MinDelay;
  o.floor = 0.485;
  t0 = std::chrono::steady_clock::now();
  const auto del = alloc::allocate(eps, o);
  CHECK(seconds_since(t0) < 60.0);
  CHECK(del.best.buffers == std::vector<int>{4, 20, 6});
  CHECK(std::abs(del.best.delay - 28.46) <= 0.1);
}

TEST_CASE("four-hop allocation with budget 60") {
  alloc::Options o;
  o.budget = 60;
  o.rescore = false;
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = alloc::allocate({0.51, 0.50, 0.49, 0.48}, o);
  CHECK(seconds_since(t0) < 60.0);
  CHECK(res.best.buffers == std::vector<int>{27, 20, 13});
}

TEST_CASE("parallel evaluation gives the serial result") {
  alloc::Options a, b;
  a.budget = b.budget = 14;
  a.threads = 1;
  b.threads = 4;
  const auto s = alloc::allocate({0.3, 0.5, 0.5, 0.2}, a), p = alloc::allocate({0.3, 0.5, 0.5, 0.2}, b);
  REQUIRE(s.top.size() == p.top.size());
  for (std::size_t k = 0; k < s.top.size(); ++k) {
    CHECK(s.top[k].buffers == p.top[k].buffers);
    CHECK(s.top[k].throughput == p.top[k].throughput);
    CHECK(s.top[k].dbie == p.top[k].dbie);
    CHECK(s.top[k].exact == p.top[k].exact);
  }
}
