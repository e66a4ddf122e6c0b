#include <doctest.h>

#include <sstream>

#include "linenet/emc.hpp"
#include "linenet/errors.hpp"
#include "oracles.hpp"

using namespace linenet;

namespace {

const NetworkSpec kFourHop({0.5, 0.4999, 0.4998, 0.4}, {5, 5, 5});

std::vector<int> as_int(const ChannelRealization& x) { return {x.begin(), x.end()}; }

}  // namespace

TEST_CASE("step: empty relays pass nothing downstream") {
  const NetworkSpec spec({0.5, 0.5, 0.5}, {2, 2});
  CHECK(emc::auxiliary_y({0, 0}, {1, 1, 1}, spec) == std::vector<int>{1, 0, 0});
  CHECK(emc::step({0, 0}, {0, 1, 1}, spec) == OccupancyState{0, 0});
}

TEST_CASE("step: a departure frees the slot for a same-epoch arrival") {
  const NetworkSpec spec({0.5, 0.5}, {2});
  CHECK(emc::auxiliary_y({2}, {1, 1}, spec) == std::vector<int>{1, 1});
  CHECK(emc::auxiliary_y({2}, {1, 0}, spec) == std::vector<int>{0, 0});
  CHECK(emc::step({2}, {1, 0}, spec) == OccupancyState{2});
  const NetworkSpec three({0.5, 0.5, 0.5}, {2, 2});
  CHECK(emc::step({1, 1}, {1, 1, 1}, three) == OccupancyState{1, 1});
}

TEST_CASE("step agrees with the fixed-point transfer rule on every state and realization") {
  CounterRng rng(3);
  for (int t = 0; t < 30; ++t) {
    const auto spec = oracle::random_spec(rng, 2, 5, 1, 3);
    const int h = spec.hops();
    for (const auto& s : oracle::all_states(spec)) {
      for (int bits = 0; bits < (1 << h); ++bits) {
        ChannelRealization x(h);
        for (int i = 0; i < h; ++i) x[i] = (bits >> i) & 1;
        const auto y = emc::auxiliary_y(s, x, spec);
        REQUIRE(y == oracle::emc_transfers(s, as_int(x), spec));
        const auto next = emc::step(s, x, spec);
        for (int j = 0; j < spec.relays(); ++j) {
          REQUIRE(next[j] >= 0);
          REQUIRE(next[j] <= spec.buffers[j]);
          REQUIRE(std::abs(next[j] - s[j]) <= 1);
        }
      }
    }
  }
}

TEST_CASE("two-hop chain is the expected birth-death chain") {
  const NetworkSpec spec({0.5, 0.5}, {2});
  const auto P = emc::build(spec);
  CHECK(P.dimension == 3);
  CHECK(P.at(0, 1) == doctest::Approx(0.5));
  CHECK(P.at(1, 2) == doctest::Approx(0.25));
  CHECK(P.at(1, 0) == doctest::Approx(0.25));
  CHECK(P.at(2, 1) == doctest::Approx(0.25));
  CHECK(P.at(0, 2) == 0.0);
  const auto st = stationary(P);
  CHECK(st.pi[0] == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(st.pi[1] == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(st.pi[2] == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(emc::capacity_exact(spec) == doctest::Approx(0.4).epsilon(1e-10));
}

TEST_CASE("three-hop transition weights from the empty state") {
  const double e1 = 0.3, e2 = 0.5, e3 = 0.7;
  const NetworkSpec spec({e1, e2, e3}, {2, 2});
  const auto P = emc::build(spec);
  CHECK(P.at(state_index({0, 0}, spec), state_index({1, 0}, spec)) == doctest::Approx(1 - e1));
  CHECK(P.at(state_index({0, 0}, spec), state_index({0, 0}, spec)) == doctest::Approx(e1));
  CHECK(P.at(state_index({1, 0}, spec), state_index({0, 1}, spec)) == doctest::Approx(e1 * (1 - e2)));
  CHECK(P.at(state_index({1, 1}, spec), state_index({1, 0}, spec)) == doctest::Approx(e1 * e2 * (1 - e3)));
}

TEST_CASE("sparse chain matches an independently assembled dense chain") {
  CounterRng rng(17);
  for (int t = 0; t < 25; ++t) {
    const auto spec = oracle::random_spec(rng, 2, 4, 1, 3);
    const auto P = emc::build(spec);
    P.check_stochastic();
    const auto dense = oracle::emc_dense(spec);
    for (std::size_t a = 0; a < dense.states.size(); ++a) {
      const auto ia = state_index(dense.states[a], spec);
      REQUIRE(P.row_nonzeros(ia) <= std::min<std::size_t>(static_cast<std::size_t>(std::pow(3, spec.relays())), P.dimension));
      for (std::size_t b = 0; b < dense.states.size(); ++b)
        REQUIRE(P.at(ia, state_index(dense.states[b], spec)) == doctest::Approx(dense.P(a, b)).epsilon(1e-14));
    }
    CHECK(emc::capacity_exact(spec) == doctest::Approx(dense.capacity).epsilon(1e-9));
  }
}

TEST_CASE("two-hop capacity equals the birth-death closed form") {
  CounterRng rng(23);
  for (int t = 0; t < 20; ++t) {
    const double e1 = 0.05 + 0.9 * rng.uniform(), e2 = 0.05 + 0.9 * rng.uniform();
    const int m = 1 + static_cast<int>(rng.below(8));
    CHECK(emc::capacity_exact(NetworkSpec({e1, e2}, {m})) == doctest::Approx(oracle::two_hop_capacity(e1, e2, m)).epsilon(1e-9));
  }
}

TEST_CASE("four-hop reference network") {
  const auto sol = emc::solve(kFourHop);
  CHECK(sol.stationary.pi.size() == 216);
  CHECK(std::abs(sol.capacity - 0.43501) < 1e-3);
  // Frozen from the dense direct solve of the same chain.
  CHECK(sol.capacity == doctest::Approx(0.4351269373).epsilon(1e-9));
  CHECK(sol.capacity == doctest::Approx(oracle::emc_dense(kFourHop).capacity).epsilon(1e-10));
}

TEST_CASE("large buffers approach the min-cut from below") {
  const double c = emc::capacity_exact(NetworkSpec({0.5, 0.5, 0.5}, {25, 25}));
  CHECK(c < 0.5);
  CHECK(c > 0.48);
  CHECK(c > emc::capacity_exact(NetworkSpec({0.5, 0.5, 0.5}, {10, 10})));
}

TEST_CASE("interior link flows equal the capacity") {
  CHECK(emc::capacity_flow_crosscheck(NetworkSpec({0.5, 0.5}, {3})).empty());
  const NetworkSpec three({0.5, 0.5, 0.5}, {2, 2});
  const auto f3 = emc::capacity_flow_crosscheck(three);
  REQUIRE(f3.size() == 1);
  CHECK(f3[0] == doctest::Approx(emc::capacity_exact(three)).epsilon(1e-10));
  const auto f4 = emc::capacity_flow_crosscheck(kFourHop);
  const double c = emc::capacity_exact(kFourHop);
  REQUIRE(f4.size() == 2);
  for (double f : f4) CHECK(std::abs(f - c) < 1e-8);
}

TEST_CASE("state cap is enforced") {
  CHECK_THROWS_AS(emc::build(NetworkSpec({0.5, 0.5, 0.5, 0.5}, {9, 9, 9}), 999), CapacityExceededError);
  CHECK_NOTHROW(emc::build(NetworkSpec({0.5, 0.5, 0.5, 0.5}, {9, 9, 9}), 1000));
}

TEST_CASE("stationary solver methods agree and report their residual") {
  const auto P = emc::build(kFourHop);
  StationaryOptions power;
  power.method = StationaryOptions::Method::Power;
  StationaryOptions direct;
  direct.method = StationaryOptions::Method::Direct;
  const auto a = stationary(P, power), b = stationary(P, direct);
  CHECK(a.method == "power");
  CHECK(b.method == "direct");
  CHECK(a.residual <= 1e-12);
  CHECK(b.residual <= 1e-12);
  for (std::size_t k = 0; k < a.pi.size(); ++k) CHECK(a.pi[k] == doctest::Approx(b.pi[k]).epsilon(1e-9));
  StationaryOptions starved = power;
  starved.max_iter = 3;
  CHECK_THROWS_AS(stationary(P, starved), ConvergenceError);
}

TEST_CASE("transition dump is 0-based triplets") {
  std::ostringstream os;
  emc::build(NetworkSpec({0.5, 0.5}, {2})).write_csv(os);
  const std::string s = os.str();
  CHECK(s.rfind("row,col,prob\n", 0) == 0);
  CHECK(s.find("0,1,0.5") != std::string::npos);
}

TEST_CASE("block structure of the exact chain") {
  const auto r = emc::verify_lemma1(NetworkSpec({0.3, 0.5, 0.7}, {2, 2}));
  CHECK(r.interior_equal);
  CHECK(r.down_upper_triangular);
  CHECK(r.up_lower_triangular);
  CHECK(r.up_singular);
  CHECK(r.stay_nonsingular);
  CHECK(r.down_min_det >= r.down_det_floor);
  CHECK(r.down_det_floor > 0.0);

  // Two hops: each down block is the scalar (1 - eps_2) eps_1.
  const auto two = emc::verify_lemma1(NetworkSpec({0.3, 0.6}, {4}));
  CHECK(two.block_size == 1);
  CHECK(two.levels == 5);
  CHECK(two.down_min_det == doctest::Approx(0.4 * 0.3));

  CounterRng rng(99);
  for (int t = 0; t < 50; ++t) {
    const auto spec = oracle::random_spec(rng, 2, 4, 1, 4);
    INFO(spec.describe());
    CHECK_NOTHROW(emc::verify_lemma1(spec));
  }
}

TEST_CASE("H-matrix recursion reproduces the stationary blocks") {
  CounterRng rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto spec = oracle::random_spec(rng, 2, 4, 1, 3, 0.1, 0.8);
    INFO(spec.describe());
    const auto hb = emc::h_matrix_bound(spec);
    CHECK(hb.relation_residual < 1e-8);
    CHECK(hb.exact == doctest::Approx(emc::capacity_exact(spec)).epsilon(1e-9));
    CHECK(std::isfinite(hb.bound));
  }
}
