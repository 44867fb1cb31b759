#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace planrec {

using FluentId = std::uint32_t;
using ActionId = std::uint32_t;

// Dense bitset over a fixed fluent universe.
class FluentSet {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  FluentSet() = default;
  explicit FluentSet(std::size_t universe)
      : universe_(universe), words_((universe + kWordBits - 1) / kWordBits, 0) {}

  FluentSet(std::size_t universe, std::span<const FluentId> members) : FluentSet(universe) {
    for (FluentId f : members) set(f);
  }

  std::size_t universe() const noexcept { return universe_; }

  bool test(FluentId f) const noexcept {
    return (words_[f / kWordBits] >> (f % kWordBits)) & 1U;
  }
  void set(FluentId f) noexcept { words_[f / kWordBits] |= Word{1} << (f % kWordBits); }
  void reset(FluentId f) noexcept { words_[f / kWordBits] &= ~(Word{1} << (f % kWordBits)); }

  bool contains_all(std::span<const FluentId> ids) const noexcept {
    for (FluentId f : ids)
      if (!test(f)) return false;
    return true;
  }
  bool contains_none(std::span<const FluentId> ids) const noexcept {
    for (FluentId f : ids)
      if (test(f)) return false;
    return true;
  }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (Word w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  // Ids of members in increasing order.
  std::vector<FluentId> members() const {
    std::vector<FluentId> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      Word bits = words_[w];
      while (bits != 0) {
        const int bit = std::countr_zero(bits);
        out.push_back(static_cast<FluentId>(w * kWordBits + static_cast<std::size_t>(bit)));
        bits &= bits - 1;
      }
    }
    return out;
  }

  // Grows the universe; new fluents are false.
  void resize(std::size_t universe) {
    universe_ = universe;
    words_.resize((universe + kWordBits - 1) / kWordBits, 0);
  }

  std::span<const Word> words() const noexcept { return words_; }

  std::size_t hash() const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (Word w : words_) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }

  friend bool operator==(const FluentSet&, const FluentSet&) = default;

 private:
  std::size_t universe_ = 0;
  std::vector<Word> words_;
};

}  // namespace planrec

template <>
struct std::hash<planrec::FluentSet> {
  std::size_t operator()(const planrec::FluentSet& s) const noexcept { return s.hash(); }
};
