#include "qdem/hecke.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qdem {

Word staircase_word(int n) {
  if (n < 2) throw std::invalid_argument("staircase word needs n >= 2");
  Word w;
  w.n = n;
  w.letters.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int block = n - 1; block >= 1; --block)
    for (int k = block; k <= n - 1; ++k) w.letters.push_back(k);
  return w;
}

Permutation q_demazure_step(int k, const Permutation& sigma, double q, double coin) {
  if (k < 1 || k > sigma.size() - 1) throw std::out_of_range("letter out of range");
  if (sigma(k) < sigma(k + 1)) return right_multiply_simple(sigma, k);
  return coin < q ? right_multiply_simple(sigma, k) : sigma;
}

Permutation sample_sigma(int n, double p, double q, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  return sample_sigma_with(n, p, q, CoinStream(seed));
}

HeckeVector::HeckeVector(int n) : n_(n) {}

double HeckeVector::probability(const Permutation& sigma) const {
  auto it = entries_.find(sigma);
  return it == entries_.end() ? 0.0 : it->second;
}

double HeckeVector::total_mass() const {
  double total = 0.0;
  for (const auto& [sigma, m] : entries_) total += m;
  return total;
}

void HeckeVector::add(const Permutation& sigma, double mass) {
  if (mass == 0.0) return;
  entries_[sigma] += mass;
}

HeckeVector HeckeVector::apply_letter(int k, double p, double q) const {
  HeckeVector out(n_);
  for (const auto& [sigma, m] : entries_) {
    const Permutation moved = right_multiply_simple(sigma, k);
    if (sigma(k) < sigma(k + 1)) {
      out.add(sigma, (1.0 - p) * m);
      out.add(moved, p * m);
    } else {
      out.add(sigma, (1.0 - p) * m + p * (1.0 - q) * m);
      out.add(moved, p * q * m);
    }
  }
  return out;
}

HeckeVector hecke_exact_distribution(int n, double p, double q, int cap) {
  if (n < 2) throw std::domain_error("exact distribution needs n >= 2");
  if (n > cap)
    throw std::domain_error("n = " + std::to_string(n) + " exceeds the exact-computation cap " +
                            std::to_string(cap));
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
    throw std::domain_error("p and q must lie in [0,1]");
  HeckeVector dist(n);
  dist.add(Permutation::identity(n), 1.0);
  for (int k : staircase_word(n).letters) {
    dist = dist.apply_letter(k, p, q);
    if (std::abs(dist.total_mass() - 1.0) > 1e-12)
      throw std::logic_error("Hecke update lost normalization");
  }
  return dist;
}

double expected_inversions(const HeckeVector& dist) {
  double e = 0.0;
  for (const auto& [sigma, m] : dist.entries()) e += m * static_cast<double>(length(sigma));
  return e;
}

double total_variation(const HeckeVector& a, const HeckeVector& b) {
  double sum = 0.0;
  for (const auto& [sigma, m] : a.entries()) sum += std::abs(m - b.probability(sigma));
  for (const auto& [sigma, m] : b.entries())
    if (!a.entries().contains(sigma)) sum += m;
  return 0.5 * sum;
}

nlohmann::json to_json(const HeckeVector& dist) {
  std::vector<std::pair<Permutation, double>> rows(dist.entries().begin(), dist.entries().end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [sigma, m] : rows) out.push_back({{"perm", to_string(sigma)}, {"prob", m}});
  return out;
}

}  // namespace qdem
