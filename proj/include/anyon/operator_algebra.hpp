#pragma once

// Anyonic operators on small lattices: Jordan–Wigner dressed annihilators,
// the distorted exchange algebra, and exchange-current operators.
//
// Fock basis convention. A basis state is an occupation tuple
// (n_0, ..., n_{N-1}) with 0 <= n_k <= cutoff. Its index is
//
//     index = Σ_k n_k (cutoff+1)^(N-1-k)
//
// so site 0 is the most significant digit and occupations count upward
// inside each digit. For two hardcore sites: |00>=0, |01>=1, |10>=2, |11>=3
// (written n_0 n_1). Particle-number sectors are listed in increasing index,
// so the two-site single-excitation block is ordered (site 1, site 0); with
// this ordering the block of the link (0,1) current is -sinθ σx + cosθ σy.

#include <cstddef>
#include <span>
#include <vector>

#include "anyon/correlation.hpp"
#include "anyon/linalg.hpp"

namespace anyon {

inline constexpr std::size_t kDefaultMaxDim = 4096;

class HilbertSpace {
 public:
  HilbertSpace(int n_sites, int cutoff = 1, std::size_t max_dim = kDefaultMaxDim);

  int n_sites() const { return n_sites_; }
  int cutoff() const { return cutoff_; }
  bool hardcore() const { return cutoff_ == 1; }
  std::size_t dim() const { return dim_; }

  int occupation(std::size_t index, int site) const;
  std::size_t index_of(std::span<const int> occupations) const;
  int total_occupation(std::size_t index) const;

  /// Basis indices with exactly `n_particles` particles, increasing.
  std::vector<std::size_t> sector(int n_particles) const;

 private:
  int n_sites_;
  int cutoff_;
  std::size_t dim_;
  std::vector<std::size_t> stride_;
};

/// Exchange angle θ, reduced to [0, 2π).
class StatisticalAngle {
 public:
  explicit StatisticalAngle(double theta);
  double value() const { return theta_; }
  operator double() const { return theta_; }

 private:
  double theta_;
};

/// Tunnelling path between sites i and j. `phase_offset` (δ) tells parallel
/// paths on the same bond apart.
struct Link {
  int i = 0;
  int j = 1;
  double amplitude = 1.0;
  double phase_offset = 0.0;
};

/// Truncated bosonic annihilator b_site.
Operator boson_annihilator(const HilbertSpace& space, int site);

/// n_site
Operator number_operator(const HilbertSpace& space, int site);

/// a_j = b_j exp(iθ Σ_{k<j} n_k), one per site.
std::vector<Operator> build_jw_anyon_ops(const HilbertSpace& space, StatisticalAngle theta);

/// max over i<j of ‖a_i a_j − e^{iθ} a_j a_i‖ and ‖a_i a_j† − e^{−iθ} a_j† a_i‖
/// in operator norm.
double verify_distorted_algebra(const std::vector<Operator>& ops, StatisticalAngle theta);

/// T = a_i† a_j e^{i(θ+δ)}
Operator hopping_operator(const std::vector<Operator>& ops, const Link& link,
                          StatisticalAngle theta);

/// K = i(T − T†), Hermitian.
Operator exchange_current(const std::vector<Operator>& ops, const Link& link,
                          StatisticalAngle theta);

/// K_θ = −sinθ σx + cosθ σy on the two-mode single-excitation manifold.
Operator two_mode_K(StatisticalAngle theta);

/// Block of `op` on the listed basis indices.
Operator restrict_to(const Operator& op, const std::vector<std::size_t>& indices);

struct CollectiveCurrent {
  Operator op;               ///< Σ_a U_aν K^(a)
  double rate = 0.0;         ///< 2J² λ_ν
  double eigenvalue = 0.0;   ///< λ_ν(D)
  Vector coefficients;       ///< U_{·ν}
};

/// Collective exchange currents from the eigenvectors of D, ascending in λ.
/// For complex Hermitian D the returned operators are not Hermitian.
std::vector<CollectiveCurrent> collective_currents(const std::vector<Operator>& Ks,
                                                   const CorrelationMatrix& D, double J = 1.0);

}  // namespace anyon
