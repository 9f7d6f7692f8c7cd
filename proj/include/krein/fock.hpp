#pragma once

#include <map>
#include <vector>

#include "krein/singular_perturbation.hpp"

namespace krein {

/// Bosonic Fock space over finitely many modes, truncated at total particle
/// number max_total. Basis: graded by total number, then lexicographic with
/// the first mode most occupied first. The vacuum is index 0.
class FockSpace {
 public:
  FockSpace(std::vector<double> mode_freqs, int max_total);

  const std::vector<double>& mode_freqs() const { return freqs_; }
  int modes() const { return static_cast<int>(freqs_.size()); }
  int max_total() const { return max_total_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis_.size()); }
  const std::vector<std::vector<int>>& basis() const { return basis_; }
  /// Index of an occupation tuple, or −1 when it lies outside the truncation.
  Eigen::Index index_of(const std::vector<int>& occ) const;
  int total(Eigen::Index k) const;

  /// a(v)|n⟩ = Σ_j conj(v_j) √n_j |n − e_j⟩
  Mat annihilation(const Vec& v) const;
  /// Adjoint of the truncated a(v); kills the top sector.
  Mat creation(const Vec& v) const;
  /// dΓ(ω) diagonal: Σ_j n_j ω_j
  RVec d_gamma_diag() const;
  Mat d_gamma() const;

 private:
  std::vector<double> freqs_;
  int max_total_;
  std::vector<std::vector<int>> basis_;
  std::map<std::vector<int>, Eigen::Index> index_;
};

/// Convenience constructor matching the generator vocabulary.
FockSpace fock_build(const std::vector<double>& mode_freqs, int max_total);

/// Indices of basis states with total particle number ≤ bound.
std::vector<Eigen::Index> sector_indices(const FockSpace& fock, int bound);

struct VanHoveModel {
  OperatorModel model;  // dΓ(ω)
  Perturbation pert;    // a(v)
  double exact_energy;  // −Σ |v_j|² / ω_j
};

/// H = dΓ(ω), A = a(v). `s_exponent` only labels the perturbation.
VanHoveModel van_hove_model(const FockSpace& fock, const Vec& v, double s_exponent = 0.5);

/// Lowest eigenvalue of dΓ(ω) + a(v) + a†(v) on the truncated space.
double truncated_ground_energy(const VanHoveModel& vh);

}  // namespace krein
