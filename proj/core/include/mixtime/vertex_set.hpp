#ifndef MIXTIME_VERTEX_SET_HPP
#define MIXTIME_VERTEX_SET_HPP

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace mixtime {

// Subset of the states {0,...,n-1} of a fixed chain, stored as a bitset.
// Canonical serialized form is the sorted index list.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(int universe_size)
      : n_(universe_size), bits_((universe_size + 63) / 64, 0) {}

  static VertexSet full(int universe_size);
  static VertexSet of(int universe_size, std::initializer_list<int> members);
  static VertexSet from_indices(int universe_size, const std::vector<int>& members);

  int universe_size() const { return n_; }
  int count() const;
  bool empty() const;
  bool is_full() const { return count() == n_; }

  bool contains(int v) const {
    return (bits_[static_cast<size_t>(v) >> 6] >> (v & 63)) & 1u;
  }
  void insert(int v) { bits_[static_cast<size_t>(v) >> 6] |= (uint64_t{1} << (v & 63)); }
  void erase(int v) { bits_[static_cast<size_t>(v) >> 6] &= ~(uint64_t{1} << (v & 63)); }

  VertexSet complement() const;
  bool is_subset_of(const VertexSet& other) const;
  bool intersects(const VertexSet& other) const;

  VertexSet operator|(const VertexSet& o) const;
  VertexSet operator&(const VertexSet& o) const;
  VertexSet operator-(const VertexSet& o) const;  // set difference
  VertexSet& operator|=(const VertexSet& o);
  VertexSet& operator&=(const VertexSet& o);

  bool operator==(const VertexSet& o) const { return n_ == o.n_ && bits_ == o.bits_; }
  bool operator!=(const VertexSet& o) const { return !(*this == o); }
  // Lexicographic on the sorted index list; used for deterministic tie-breaks.
  bool operator<(const VertexSet& o) const;

  std::vector<int> indices() const;
  int first() const;  // lowest member, -1 if empty

  template <typename F>
  void for_each(F&& f) const {
    for (size_t w = 0; w < bits_.size(); ++w) {
      uint64_t word = bits_[w];
      while (word) {
        int b = __builtin_ctzll(word);
        f(static_cast<int>(w * 64 + b));
        word &= word - 1;
      }
    }
  }

  std::string to_string() const;

 private:
  int n_ = 0;
  std::vector<uint64_t> bits_;
};

}  // namespace mixtime

#endif
