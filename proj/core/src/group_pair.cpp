#include "homophily/group_pair.hpp"

#include <stdexcept>
#include <utility>

namespace homophily {

GroupPair::GroupPair(int a, int b) : i_(a), j_(b) {
  if (a < 1 || b < 1) {
    throw std::invalid_argument("group indices are 1-based and must be positive");
  }
  if (i_ > j_) std::swap(i_, j_);
}

std::string GroupPair::to_string() const {
  return "(" + std::to_string(i_) + "," + std::to_string(j_) + ")";
}

PairIndex::PairIndex(int groups) : groups_(groups) {
  if (groups < 1) throw std::invalid_argument("group count must be at least 1");
}

int PairIndex::flat(const GroupPair& pair) const {
  if (pair.j() > groups_) {
    throw std::out_of_range("group pair " + pair.to_string() + " exceeds K=" +
                            std::to_string(groups_));
  }
  if (pair.is_within()) return pair.i() - 1;
  // Cross pairs with first index below i() precede this one.
  int offset = 0;
  for (int a = 1; a < pair.i(); ++a) offset += groups_ - a;
  return groups_ + offset + (pair.j() - pair.i() - 1);
}

GroupPair PairIndex::pair(int flat_index) const {
  if (flat_index < 0 || flat_index >= size()) {
    throw std::out_of_range("flat pair index " + std::to_string(flat_index) +
                            " out of range for K=" + std::to_string(groups_));
  }
  if (flat_index < groups_) return {flat_index + 1, flat_index + 1};
  int rest = flat_index - groups_;
  for (int a = 1; a < groups_; ++a) {
    const int row = groups_ - a;
    if (rest < row) return {a, a + 1 + rest};
    rest -= row;
  }
  throw std::logic_error("unreachable pair index decode");
}

int groups_for_pair_count(int pairs) {
  for (int k = 1; pair_count(k) <= pairs; ++k) {
    if (pair_count(k) == pairs) return k;
  }
  throw std::invalid_argument(std::to_string(pairs) +
                              " is not a valid group-pair count K(K+1)/2");
}

}  // namespace homophily
