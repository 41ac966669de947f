#include "mixtime/vertex_set.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace mixtime {

VertexSet VertexSet::full(int universe_size) {
  VertexSet s(universe_size);
  for (int i = 0; i < universe_size; ++i) s.insert(i);
  return s;
}

VertexSet VertexSet::of(int universe_size, std::initializer_list<int> members) {
  VertexSet s(universe_size);
  for (int v : members) {
    if (v < 0 || v >= universe_size) throw std::out_of_range("VertexSet: index out of range");
    s.insert(v);
  }
  return s;
}

VertexSet VertexSet::from_indices(int universe_size, const std::vector<int>& members) {
  VertexSet s(universe_size);
  for (int v : members) {
    if (v < 0 || v >= universe_size) throw std::out_of_range("VertexSet: index out of range");
    s.insert(v);
  }
  return s;
}

int VertexSet::count() const {
  int c = 0;
  for (uint64_t w : bits_) c += std::popcount(w);
  return c;
}

bool VertexSet::empty() const {
  for (uint64_t w : bits_)
    if (w) return false;
  return true;
}

VertexSet VertexSet::complement() const {
  VertexSet s(n_);
  for (size_t i = 0; i < bits_.size(); ++i) s.bits_[i] = ~bits_[i];
  int tail = n_ & 63;
  if (tail != 0 && !bits_.empty()) s.bits_.back() &= (uint64_t{1} << tail) - 1;
  return s;
}

bool VertexSet::is_subset_of(const VertexSet& other) const {
  for (size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] & ~other.bits_[i]) return false;
  return true;
}

bool VertexSet::intersects(const VertexSet& other) const {
  for (size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] & other.bits_[i]) return true;
  return false;
}

VertexSet VertexSet::operator|(const VertexSet& o) const {
  VertexSet s(n_);
  for (size_t i = 0; i < bits_.size(); ++i) s.bits_[i] = bits_[i] | o.bits_[i];
  return s;
}

VertexSet VertexSet::operator&(const VertexSet& o) const {
  VertexSet s(n_);
  for (size_t i = 0; i < bits_.size(); ++i) s.bits_[i] = bits_[i] & o.bits_[i];
  return s;
}

VertexSet VertexSet::operator-(const VertexSet& o) const {
  VertexSet s(n_);
  for (size_t i = 0; i < bits_.size(); ++i) s.bits_[i] = bits_[i] & ~o.bits_[i];
  return s;
}

VertexSet& VertexSet::operator|=(const VertexSet& o) {
  for (size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
  return *this;
}

VertexSet& VertexSet::operator&=(const VertexSet& o) {
  for (size_t i = 0; i < bits_.size(); ++i) bits_[i] &= o.bits_[i];
  return *this;
}

bool VertexSet::operator<(const VertexSet& o) const {
  return indices() < o.indices();
}

std::vector<int> VertexSet::indices() const {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(count()));
  for_each([&](int v) { out.push_back(v); });
  return out;
}

int VertexSet::first() const {
  for (size_t w = 0; w < bits_.size(); ++w)
    if (bits_[w]) return static_cast<int>(w * 64 + __builtin_ctzll(bits_[w]));
  return -1;
}

std::string VertexSet::to_string() const {
  std::ostringstream os;
  os << '{';
  bool firstv = true;
  for_each([&](int v) {
    if (!firstv) os << ',';
    os << v;
    firstv = false;
  });
  os << '}';
  return os.str();
}

}  // namespace mixtime
