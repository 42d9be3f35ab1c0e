#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sac/rng.hpp"

namespace sac {

/// One (s, a, r, s', done) record. Actions are stored in the canonical
/// (-1, 1) range; the environment mapping happens outside the buffer.
struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
};

/// Bounded FIFO ring with uniform with-replacement sampling.
/// Single writer, single reader; callers must not interleave push and
/// sample from different threads.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return size_ == 0; }

  /// n independent uniform draws with replacement. Throws when empty.
  std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

  /// Entries oldest first (test/inspection helper).
  std::vector<const Transition*> contents_fifo() const;

  /// Snapshot format (little-endian): magic "SACRPBF1", version u64,
  /// capacity u64, size u64, then `size` records oldest first, each:
  /// state block, action block, reward f64, next_state block,
  /// terminal u64 (0/1). Blocks are u64 length + doubles.
  void save(const std::filesystem::path& path) const;
  void save(std::ostream& out) const;
  static ReplayBuffer load(const std::filesystem::path& path);
  static ReplayBuffer load(std::istream& in);

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;  // next write position
  std::vector<Transition> storage_;
};

}  // namespace sac
