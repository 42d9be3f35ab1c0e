#include "sac/replay.hpp"

#include <fstream>
#include <stdexcept>

#include "sac/binio.hpp"

namespace sac {

namespace {
constexpr char kMagic[9] = "SACRPBF1";
constexpr std::uint64_t kVersion = 1;
}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0)
    throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
  storage_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
  if (size_ < capacity_) {
    storage_.push_back(std::move(t));
    ++size_;
  } else {
    storage_[cursor_] = std::move(t);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n,
                                                    Rng& rng) const {
  if (empty()) throw std::runtime_error("ReplayBuffer: sample from empty");
  // Indices are FIFO-relative so a buffer reloaded from a snapshot (which
  // stores entries oldest first) samples identically to the original.
  const std::size_t oldest = size_ < capacity_ ? 0 : cursor_;
  std::vector<const Transition*> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(&storage_[(oldest + rng.uniform_index(size_)) % capacity_]);
  return out;
}

std::vector<const Transition*> ReplayBuffer::contents_fifo() const {
  std::vector<const Transition*> out;
  out.reserve(size_);
  const std::size_t oldest = size_ < capacity_ ? 0 : cursor_;
  for (std::size_t i = 0; i < size_; ++i)
    out.push_back(&storage_[(oldest + i) % capacity_]);
  return out;
}

void ReplayBuffer::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("ReplayBuffer::save: cannot open " +
                             path.string());
  save(out);
  if (!out) throw std::runtime_error("ReplayBuffer::save: write failed");
}

void ReplayBuffer::save(std::ostream& out) const {
  binio::write_magic(out, kMagic);
  binio::write_u64(out, kVersion);
  binio::write_u64(out, capacity_);
  binio::write_u64(out, size_);
  for (const Transition* t : contents_fifo()) {
    binio::write_f64_block(out, t->state);
    binio::write_f64_block(out, t->action);
    binio::write_f64(out, t->reward);
    binio::write_f64_block(out, t->next_state);
    binio::write_u64(out, t->terminal ? 1 : 0);
  }
}

ReplayBuffer ReplayBuffer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("ReplayBuffer::load: cannot open " +
                             path.string());
  return load(in);
}

ReplayBuffer ReplayBuffer::load(std::istream& in) {
  binio::expect_magic(in, kMagic, "ReplayBuffer::load");
  if (binio::read_u64(in) != kVersion)
    throw std::runtime_error("ReplayBuffer::load: unsupported version");
  const std::uint64_t capacity = binio::read_u64(in);
  const std::uint64_t size = binio::read_u64(in);
  ReplayBuffer buf(capacity);
  for (std::uint64_t i = 0; i < size; ++i) {
    Transition t;
    t.state = binio::read_f64_block(in);
    t.action = binio::read_f64_block(in);
    t.reward = binio::read_f64(in);
    t.next_state = binio::read_f64_block(in);
    t.terminal = binio::read_u64(in) != 0;
    buf.push(std::move(t));
  }
  return buf;
}

}  // namespace sac
