#pragma once

#include <compare>
#include <string>

namespace homophily {

/// Unordered pair of node groups, 1-based, always stored with i <= j.
class GroupPair {
 public:
  GroupPair(int a, int b);

  int i() const noexcept { return i_; }
  int j() const noexcept { return j_; }
  bool is_within() const noexcept { return i_ == j_; }

  std::string to_string() const;

  auto operator<=>(const GroupPair&) const = default;

 private:
  int i_;
  int j_;
};

/// Bijection between canonical group pairs and flat indices 0..G-1, G = K(K+1)/2.
///
/// Within pairs (1,1), ..., (K,K) occupy indices 0..K-1; cross pairs follow in
/// lexicographic order (1,2), (1,3), ..., (K-1,K). For K = 2 this gives the
/// ordering (1,1), (2,2), (1,2).
class PairIndex {
 public:
  explicit PairIndex(int groups);

  int groups() const noexcept { return groups_; }
  int size() const noexcept { return groups_ * (groups_ + 1) / 2; }

  int flat(const GroupPair& pair) const;
  GroupPair pair(int flat_index) const;
  bool is_within(int flat_index) const noexcept { return flat_index < groups_; }

 private:
  int groups_;
};

/// Number of group pairs for K groups.
constexpr int pair_count(int groups) noexcept { return groups * (groups + 1) / 2; }

/// Inverse of pair_count; throws if `pairs` is not triangular.
int groups_for_pair_count(int pairs);

}  // namespace homophily
