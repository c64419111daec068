#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <vector>

namespace rio {

// Small ordered set backed by a sorted vector. Value semantics, cheap to hash
// and compare; used for axiom-index sets and literal sets.
template <class T>
class SortedSet {
 public:
  using value_type = T;
  using const_iterator = typename std::vector<T>::const_iterator;

  SortedSet() = default;
  SortedSet(std::initializer_list<T> items) : items_(items) { normalize(); }
  explicit SortedSet(std::vector<T> items) : items_(std::move(items)) { normalize(); }

  const_iterator begin() const { return items_.begin(); }
  const_iterator end() const { return items_.end(); }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const T& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<T>& items() const { return items_; }

  bool contains(const T& item) const { return std::binary_search(items_.begin(), items_.end(), item); }

  void insert(const T& item) {
    auto it = std::lower_bound(items_.begin(), items_.end(), item);
    if (it == items_.end() || *it != item) items_.insert(it, item);
  }

  void erase(const T& item) {
    auto it = std::lower_bound(items_.begin(), items_.end(), item);
    if (it != items_.end() && *it == item) items_.erase(it);
  }

  bool is_subset_of(const SortedSet& other) const {
    return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
  }

  bool intersects(const SortedSet& other) const {
    auto a = items_.begin();
    auto b = other.items_.begin();
    while (a != items_.end() && b != other.items_.end()) {
      if (*a < *b) {
        ++a;
      } else if (*b < *a) {
        ++b;
      } else {
        return true;
      }
    }
    return false;
  }

  friend SortedSet operator|(const SortedSet& a, const SortedSet& b) {
    SortedSet out;
    out.items_.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.items_));
    return out;
  }

  friend SortedSet operator&(const SortedSet& a, const SortedSet& b) {
    SortedSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.items_));
    return out;
  }

  friend SortedSet operator-(const SortedSet& a, const SortedSet& b) {
    SortedSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.items_));
    return out;
  }

  friend bool operator==(const SortedSet&, const SortedSet&) = default;
  friend auto operator<=>(const SortedSet& a, const SortedSet& b) { return a.items_ <=> b.items_; }

  std::size_t hash() const {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (const T& item : items_) {
      h ^= std::hash<T>{}(item) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

 private:
  void normalize() {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
  }

  std::vector<T> items_;
};

}  // namespace rio

template <class T>
struct std::hash<rio::SortedSet<T>> {
  std::size_t operator()(const rio::SortedSet<T>& s) const { return s.hash(); }
};
