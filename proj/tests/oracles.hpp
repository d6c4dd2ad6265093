#pragma once

// Brute-force reference implementations used only by the tests. They work
// on plain vectors and share no code with the library.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

namespace oracle {

using Images = std::vector<int>;  // zero-based storage of one-based images

inline Images identity(int n) {
  Images a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = i + 1;
  return a;
}

inline int inversions(const Images& a) {
  int c = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (a[i] > a[j]) ++c;
  return c;
}

// s_{n-1}, (s_{n-2}, s_{n-1}), ..., (s_1, ..., s_{n-1}).
inline std::vector<int> staircase(int n) {
  std::vector<int> w;
  for (int b = n - 1; b >= 1; --b)
    for (int k = b; k <= n - 1; ++k) w.push_back(k);
  return w;
}

inline Images swap_positions(Images a, int k) {
  std::swap(a[static_cast<std::size_t>(k - 1)], a[static_cast<std::size_t>(k)]);
  return a;
}

// Exact law by depth-first enumeration of every keep / flip branch.
inline std::map<Images, double> enumerate_law(int n, double p, double q) {
  const auto word = staircase(n);
  std::map<Images, double> law;
  std::function<void(std::size_t, const Images&, double)> go = [&](std::size_t t, const Images& a, double w) {
    if (w == 0.0) return;
    if (t == word.size()) {
      law[a] += w;
      return;
    }
    const int k = word[t];
    go(t + 1, a, w * (1.0 - p));
    const Images b = swap_positions(a, k);
    if (a[static_cast<std::size_t>(k - 1)] < a[static_cast<std::size_t>(k)]) {
      go(t + 1, b, w * p);
    } else {
      go(t + 1, b, w * p * q);
      go(t + 1, a, w * p * (1.0 - q));
    }
  };
  go(0, identity(n), 1.0);
  return law;
}

// Demazure products (absorbing reducing steps) of every subword.
inline std::set<Images> demazure_reachable(int n) {
  const auto word = staircase(n);
  std::set<Images> out;
  for (std::uint32_t mask = 0; mask < (1u << word.size()); ++mask) {
    Images a = identity(n);
    for (std::size_t t = 0; t < word.size(); ++t) {
      if (!(mask >> t & 1u)) continue;
      const int k = word[t];
      if (a[static_cast<std::size_t>(k - 1)] < a[static_cast<std::size_t>(k)]) a = swap_positions(a, k);
    }
    out.insert(a);
  }
  return out;
}

// Ordinary group products of kept letters, as functions composed in word
// order: (a o s_k)(i) = a(s_k(i)).
inline std::map<Images, double> group_pushforward(int n, double p) {
  const auto word = staircase(n);
  std::map<Images, double> law;
  for (std::uint32_t mask = 0; mask < (1u << word.size()); ++mask) {
    Images a = identity(n);
    double w = 1.0;
    for (std::size_t t = 0; t < word.size(); ++t) {
      if (mask >> t & 1u) {
        w *= p;
        const int k = word[t];
        Images s = identity(n);
        std::swap(s[static_cast<std::size_t>(k - 1)], s[static_cast<std::size_t>(k)]);
        Images c(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[static_cast<std::size_t>(s[i] - 1)];
        a = c;
      } else {
        w *= 1.0 - p;
      }
    }
    law[a] += w;
  }
  return law;
}

inline std::vector<Images> all_permutations(int n) {
  std::vector<Images> out;
  Images a = identity(n);
  do out.push_back(a);
  while (std::next_permutation(a.begin(), a.end()));
  return out;
}

}  // namespace oracle
