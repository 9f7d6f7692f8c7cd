#include "krein/fock.hpp"

#include <cmath>
#include <functional>

namespace krein {

namespace {

// All tuples of length `modes` with entries summing to `total`, first mode descending.
void enumerate_sector(int modes, int total, std::vector<std::vector<int>>& out) {
  std::vector<int> occ(modes, 0);
  std::function<void(int, int)> rec = [&](int j, int left) {
    if (j == modes - 1) {
      occ[j] = left;
      out.push_back(occ);
      return;
    }
    for (int k = left; k >= 0; --k) {
      occ[j] = k;
      rec(j + 1, left - k);
    }
  };
  rec(0, total);
}

}  // namespace

FockSpace::FockSpace(std::vector<double> mode_freqs, int max_total)
    : freqs_(std::move(mode_freqs)), max_total_(max_total) {
  if (freqs_.empty()) throw DomainError("FockSpace: at least one mode is required");
  for (double w : freqs_) {
    if (!(w > 0.0)) throw DomainError("FockSpace: mode frequencies must be positive");
  }
  if (max_total_ < 1) throw DomainError("FockSpace: max_total must be at least 1");
  for (int n = 0; n <= max_total_; ++n) enumerate_sector(modes(), n, basis_);
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    index_.emplace(basis_[k], static_cast<Eigen::Index>(k));
  }
}

Eigen::Index FockSpace::index_of(const std::vector<int>& occ) const {
  auto it = index_.find(occ);
  return it == index_.end() ? -1 : it->second;
}

int FockSpace::total(Eigen::Index k) const {
  const auto& occ = basis_[static_cast<std::size_t>(k)];
  int t = 0;
  for (int n : occ) t += n;
  return t;
}

Mat FockSpace::annihilation(const Vec& v) const {
  if (v.size() != modes()) throw DomainError("annihilation: test vector length must equal mode count");
  const auto n = dim();
  Mat a = Mat::Zero(n, n);
  std::vector<int> lowered;
  for (Eigen::Index col = 0; col < n; ++col) {
    const auto& occ = basis_[static_cast<std::size_t>(col)];
    for (int j = 0; j < modes(); ++j) {
      if (occ[j] == 0) continue;
      lowered = occ;
      --lowered[j];
      const Eigen::Index row = index_of(lowered);
      a(row, col) += std::conj(v(j)) * std::sqrt(static_cast<double>(occ[j]));
    }
  }
  return a;
}

Mat FockSpace::creation(const Vec& v) const { return annihilation(v).adjoint(); }

RVec FockSpace::d_gamma_diag() const {
  RVec d(dim());
  for (Eigen::Index k = 0; k < dim(); ++k) {
    const auto& occ = basis_[static_cast<std::size_t>(k)];
    double e = 0.0;
    for (int j = 0; j < modes(); ++j) e += occ[j] * freqs_[static_cast<std::size_t>(j)];
    d(k) = e;
  }
  return d;
}

Mat FockSpace::d_gamma() const { return d_gamma_diag().cast<cplx>().asDiagonal(); }

FockSpace fock_build(const std::vector<double>& mode_freqs, int max_total) {
  return FockSpace(mode_freqs, max_total);
}

std::vector<Eigen::Index> sector_indices(const FockSpace& fock, int bound) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index k = 0; k < fock.dim(); ++k) {
    if (fock.total(k) <= bound) out.push_back(k);
  }
  return out;
}

VanHoveModel van_hove_model(const FockSpace& fock, const Vec& v, double s_exponent) {
  if (v.size() != fock.modes()) throw DomainError("van_hove_model: v must have one entry per mode");
  OperatorModel model = OperatorModel::diagonal(fock.d_gamma_diag());
  Perturbation pert = Perturbation::make(fock.annihilation(v), s_exponent, model);
  double exact = 0.0;
  for (int j = 0; j < fock.modes(); ++j) {
    exact -= std::norm(v(j)) / fock.mode_freqs()[static_cast<std::size_t>(j)];
  }
  return {std::move(model), std::move(pert), exact};
}

double truncated_ground_energy(const VanHoveModel& vh) {
  const Mat h = vh.model.matrix() + vh.pert.a + vh.pert.a.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace krein
