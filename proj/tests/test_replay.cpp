#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "sac/replay.hpp"
#include "support/oracles.hpp"

using namespace sac;

namespace {
Transition make_transition(double tag) {
  Transition t;
  t.state = {tag, tag + 0.5};
  t.action = {std::tanh(tag)};
  t.reward = -tag;
  t.next_state = {tag + 1.0, tag + 1.5};
  t.terminal = static_cast<long long>(tag) % 7 == 0;
  return t;
}
}  // namespace

TEST_CASE("push evicts FIFO once full") {
  ReplayBuffer buf(2);
  buf.push(make_transition(1));
  buf.push(make_transition(2));
  buf.push(make_transition(3));
  auto contents = buf.contents_fifo();
  REQUIRE(contents.size() == 2);
  CHECK(contents[0]->state[0] == 2.0);
  CHECK(contents[1]->state[0] == 3.0);
}

TEST_CASE("size grows to capacity and stops") {
  ReplayBuffer buf(1000);
  for (int i = 0; i < 10000; ++i) {
    buf.push(make_transition(i));
    CHECK(buf.size() == std::min<std::size_t>(i + 1, 1000));
  }
  CHECK(buf.size() == 1000);
}

TEST_CASE("contents after k > capacity pushes are exactly the last k") {
  const std::size_t capacity = 37;
  ReplayBuffer buf(capacity);
  const int total = 211;
  for (int i = 0; i < total; ++i) buf.push(make_transition(i));
  auto contents = buf.contents_fifo();
  REQUIRE(contents.size() == capacity);
  for (std::size_t i = 0; i < capacity; ++i)
    CHECK(contents[i]->state[0] ==
          static_cast<double>(total - capacity + i));
}

TEST_CASE("sampling from a single item returns copies of it") {
  ReplayBuffer buf(4);
  buf.push(make_transition(9));
  Rng rng(3);
  auto batch = buf.sample(5, rng);
  REQUIRE(batch.size() == 5);
  for (const Transition* t : batch) CHECK(t->state[0] == 9.0);
}

TEST_CASE("sampling from empty buffer throws") {
  ReplayBuffer buf(4);
  Rng rng(3);
  CHECK_THROWS_AS(buf.sample(1, rng), std::runtime_error);
}

TEST_CASE("fixed seed reproduces the batch") {
  ReplayBuffer buf(128);
  for (int i = 0; i < 128; ++i) buf.push(make_transition(i));
  Rng a(17), b(17);
  auto batch_a = buf.sample(32, a);
  auto batch_b = buf.sample(32, b);
  for (std::size_t i = 0; i < batch_a.size(); ++i)
    CHECK(batch_a[i] == batch_b[i]);
}

TEST_CASE("sampling is uniform: chi-square on 1e6 draws over 10 items") {
  ReplayBuffer buf(10);
  for (int i = 0; i < 10; ++i) buf.push(make_transition(i));
  Rng rng(2718);
  std::vector<std::size_t> counts(10, 0);
  const std::size_t draws = 1000000;
  for (std::size_t i = 0; i < draws / 100; ++i) {
    auto batch = buf.sample(100, rng);
    for (const Transition* t : batch)
      ++counts[static_cast<std::size_t>(t->state[0])];
  }
  // Per-item frequency within 4 sigma of uniform.
  const double expected = static_cast<double>(draws) / 10.0;
  const double sigma = std::sqrt(draws * 0.1 * 0.9);
  for (std::size_t i = 0; i < 10; ++i)
    CHECK(std::abs(static_cast<double>(counts[i]) - expected) <=
          4.0 * sigma);
  // Chi-square goodness of fit, 9 dof, p > 0.001 <=> stat < 27.877.
  CHECK(oracles::chi_square_uniform_stat(counts) < 27.877);
}

TEST_CASE("snapshot round-trips and preserves sampling behavior") {
  ReplayBuffer buf(16);
  for (int i = 0; i < 23; ++i) buf.push(make_transition(i));  // wrapped ring
  const auto path =
      std::filesystem::temp_directory_path() / "sac_test_replay.bin";
  buf.save(path);
  ReplayBuffer back = ReplayBuffer::load(path);
  CHECK(back.capacity() == buf.capacity());
  REQUIRE(back.size() == buf.size());

  auto a = buf.contents_fifo();
  auto b = back.contents_fifo();
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i]->state == b[i]->state);
    CHECK(a[i]->action == b[i]->action);
    CHECK(a[i]->reward == b[i]->reward);
    CHECK(a[i]->next_state == b[i]->next_state);
    CHECK(a[i]->terminal == b[i]->terminal);
  }

  // Same RNG stream must pick the same records from both buffers.
  Rng r1(5), r2(5);
  auto s1 = buf.sample(64, r1);
  auto s2 = back.sample(64, r2);
  for (std::size_t i = 0; i < s1.size(); ++i)
    CHECK(s1[i]->state == s2[i]->state);
  std::filesystem::remove(path);

  // Continued pushes keep FIFO order after reload.
  back.push(make_transition(100));
  auto after = back.contents_fifo();
  CHECK(after.front()->state[0] == 8.0);  // oldest advanced by one
  CHECK(after.back()->state[0] == 100.0);
}

TEST_CASE("zero capacity is rejected") {
  CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
}
