#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "neurogame/errors.hpp"

namespace neurogame {

// Engine-wide token limit; coalitions are single 64-bit masks.
inline constexpr int kMaxTokens = 64;

// A subset of the token indices {0, ..., n-1}. Bit i set means token i is a
// member.
class Coalition {
 public:
  explicit Coalition(int n) : n_(n) { check_count(n); }
  Coalition(int n, std::uint64_t mask) : mask_(mask), n_(n) {
    check_count(n);
    if (n < 64 && (mask >> n) != 0) {
      throw InputError("coalition mask has members outside 0.." + std::to_string(n - 1));
    }
  }

  static Coalition of(int n, std::initializer_list<int> members) {
    Coalition c(n);
    for (int i : members) c = c.with(i);
    return c;
  }
  static Coalition full(int n) { return Coalition(n, full_mask(n)); }

  static std::uint64_t full_mask(int n) {
    return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  }

  int token_count() const { return n_; }
  std::uint64_t mask() const { return mask_; }
  int size() const { return std::popcount(mask_); }
  bool empty() const { return mask_ == 0; }

  bool contains(int i) const {
    check_index(i);
    return (mask_ >> i) & 1u;
  }
  Coalition with(int i) const {
    check_index(i);
    return Coalition(n_, mask_ | (std::uint64_t{1} << i), Unchecked{});
  }
  Coalition without(int i) const {
    check_index(i);
    return Coalition(n_, mask_ & ~(std::uint64_t{1} << i), Unchecked{});
  }
  Coalition complement() const { return Coalition(n_, ~mask_ & full_mask(n_), Unchecked{}); }

  // Calls f(i) for every member in ascending index order.
  template <class F>
  void for_each(F&& f) const {
    for (std::uint64_t m = mask_; m != 0; m &= m - 1) f(std::countr_zero(m));
  }

  std::vector<int> members() const {
    std::vector<int> out;
    out.reserve(size());
    for_each([&](int i) { out.push_back(i); });
    return out;
  }

  friend bool operator==(const Coalition&, const Coalition&) = default;

 private:
  struct Unchecked {};
  Coalition(int n, std::uint64_t mask, Unchecked) : mask_(mask), n_(n) {}

  static void check_count(int n) {
    if (n < 0 || n > kMaxTokens) {
      throw InputError("token count " + std::to_string(n) + " outside 0.." +
                       std::to_string(kMaxTokens));
    }
  }
  void check_index(int i) const {
    if (i < 0 || i >= n_) {
      throw InputError("token index " + std::to_string(i) + " out of range for n = " +
                       std::to_string(n_));
    }
  }

  std::uint64_t mask_ = 0;
  int n_ = 0;
};

// Enumerates every subset of `universe` (including the empty set and the
// universe itself) in increasing mask order, calling f(submask).
template <class F>
void for_each_subset(std::uint64_t universe, F&& f) {
  std::uint64_t sub = 0;
  while (true) {
    f(sub);
    if (sub == universe) break;
    sub = (sub - universe) & universe;
  }
}

}  // namespace neurogame
