#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qdem/coins.hpp"
#include "qdem/perm.hpp"

namespace qdem {

// Convention: a letter k acts on a permutation in one-line notation by
// swapping the entries at positions k and k+1 (sigma -> sigma o s_k), and it
// is a length-increasing step iff sigma(k) < sigma(k+1). Letters are applied
// in word order. Under this convention the word sampler, the exact Hecke
// recursion and the top-row reading of the colored vertex model all describe
// the same random permutation.

struct Word {
  int n = 0;
  std::vector<int> letters;
};

// s_{n-1} (s_{n-2} s_{n-1}) ... (s_1 ... s_{n-1}); length n(n-1)/2.
Word staircase_word(int n);

// One q-Demazure step with an explicit uniform `coin` for the reducing case.
Permutation q_demazure_step(int k, const Permutation& sigma, double q, double coin);

// Word-level sampler on a caller-owned one-based image buffer (index 0
// unused). Letter t draws keep = coins(t, keep); when kept and reducing it
// draws coins(t, qflip).
template <class Coins>
void sample_sigma_into(std::vector<int>& images, int n, double p, double q, const Coins& coins) {
  images.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) images[static_cast<std::size_t>(i)] = i;
  std::uint64_t t = 0;
  for (int block = n - 1; block >= 1; --block) {
    for (int k = block; k <= n - 1; ++k, ++t) {
      if (!(coins.uniform(t, CoinTag::keep) < p)) continue;
      int& a = images[static_cast<std::size_t>(k)];
      int& b = images[static_cast<std::size_t>(k) + 1];
      if (a < b || coins.uniform(t, CoinTag::qflip) < q) std::swap(a, b);
    }
  }
}

template <class Coins>
Permutation sample_sigma_with(int n, double p, double q, const Coins& coins) {
  std::vector<int> images;
  sample_sigma_into(images, n, p, q, coins);
  return Permutation(std::vector<int>(images.begin() + 1, images.end()));
}

Permutation sample_sigma(int n, double p, double q, std::uint64_t seed);

inline constexpr int kDefaultExactCap = 7;

class HeckeVector {
 public:
  HeckeVector() = default;
  explicit HeckeVector(int n);

  int n() const { return n_; }
  const std::map<Permutation, double>& entries() const { return entries_; }
  double probability(const Permutation& sigma) const;
  double total_mass() const;

  void add(const Permutation& sigma, double mass);

  // One letter of the q-Demazure product with keep probability p.
  HeckeVector apply_letter(int k, double p, double q) const;

 private:
  int n_ = 0;
  std::map<Permutation, double> entries_;
};

// Exact law of sample_sigma, by pushing the point mass at the identity
// through one R_k(p) update per letter. Throws std::domain_error above cap.
HeckeVector hecke_exact_distribution(int n, double p, double q, int cap = kDefaultExactCap);

double expected_inversions(const HeckeVector& dist);

double total_variation(const HeckeVector& a, const HeckeVector& b);

// [{"perm": "...", "prob": ...}, ...] by descending probability, ties broken
// lexicographically by images.
nlohmann::json to_json(const HeckeVector& dist);

}  // namespace qdem
