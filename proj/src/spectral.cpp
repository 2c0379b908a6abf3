#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "anyon/errors.hpp"
#include "anyon/lindblad.hpp"

namespace anyon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double x) { return std::isfinite(x) ? x : kInf; }

// Single-linkage clusters of eigenvalues closer than tol.
std::vector<int> cluster_labels(const Vector& ev, double tol) {
  const auto n = ev.size();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(ev(i) - ev(j)) <= tol) parent[find(int(j))] = find(int(i));
  std::vector<int> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out[i] = find(int(i));
  return out;
}

}  // namespace

double normality_defect(const Liouvillian& L) {
  const Matrix& m = L.matrix;
  const double n2 = m.squaredNorm();
  if (n2 == 0.0) return 0.0;
  return (m * m.adjoint() - m.adjoint() * m).norm() / n2;
}

SpectralReport spectral_report(const Liouvillian& L) {
  const Matrix& m = L.matrix;
  if (m.rows() != m.cols() || m.rows() == 0) throw ShapeError("spectral_report: empty or non-square Liouvillian");
  if (!m.allFinite()) throw NumericError("spectral_report: Liouvillian has non-finite entries");

  Eigen::ComplexEigenSolver<Matrix> es(m, true);
  if (es.info() != Eigen::Success) throw NumericError("spectral_report: eigensolver did not converge");

  SpectralReport r;
  r.eigenvalues = es.eigenvalues();
  r.right_eigenvectors = es.eigenvectors();
  for (Eigen::Index k = 0; k < r.right_eigenvectors.cols(); ++k) r.right_eigenvectors.col(k).normalize();
  r.norm = operator_norm(m);
  r.normality_defect = normality_defect(L);

  const auto n = m.rows();
  const Matrix W = Eigen::FullPivLU<Matrix>(r.right_eigenvectors).inverse();
  const double radius = r.eigenvalues.cwiseAbs().maxCoeff();
  const auto labels = cluster_labels(r.eigenvalues, kClusterTol * std::max(1.0, radius));

  r.condition_numbers = RealVector::Ones(n);
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (done[i]) continue;
    std::vector<Eigen::Index> members;
    for (Eigen::Index j = i; j < n; ++j)
      if (labels[j] == labels[i]) members.push_back(j);
    double kappa;
    if (members.size() == 1) {
      kappa = r.right_eigenvectors.col(i).norm() * W.row(i).norm();
    } else {
      Matrix vc(n, Eigen::Index(members.size()));
      Matrix wc(Eigen::Index(members.size()), n);
      for (std::size_t c = 0; c < members.size(); ++c) {
        vc.col(Eigen::Index(c)) = r.right_eigenvectors.col(members[c]);
        wc.row(Eigen::Index(c)) = W.row(members[c]);
      }
      kappa = W.allFinite() ? operator_norm(vc * wc) : kInf;
    }
    kappa = std::max(1.0, finite_or_inf(kappa));
    for (auto j : members) {
      r.condition_numbers(j) = kappa;
      done[j] = true;
    }
  }

  r.min_pair_gap = kInf;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      r.min_pair_gap = std::min(r.min_pair_gap, std::abs(r.eigenvalues(i) - r.eigenvalues(j)));
  if (n == 1) r.min_pair_gap = 0.0;
  return r;
}

EpScanPoint evaluate_ep_point(const Liouvillian& L, double parameter, const EpOptions& options) {
  const SpectralReport r = spectral_report(L);
  EpScanPoint p;
  p.parameter = parameter;
  p.max_kappa = r.condition_numbers.maxCoeff();
  p.min_gap = r.min_pair_gap;
  p.normality_defect = r.normality_defect;
  p.norm = r.norm;
  p.pair_gap = kInf;
  p.pair_kappa = 1.0;
  const double gap_tol = options.gap_rel_tol * r.norm;
  const auto n = r.eigenvalues.size();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double gap = std::abs(r.eigenvalues(i) - r.eigenvalues(j));
      if (gap >= gap_tol) continue;
      const double k = std::min(r.condition_numbers(i), r.condition_numbers(j));
      if (k > p.pair_kappa || (k == p.pair_kappa && gap < p.pair_gap)) {
        p.pair_kappa = k;
        p.pair_gap = gap;
      }
    }
  p.candidate = p.pair_kappa > options.kappa_tol;
  return p;
}

namespace {

void validate_sweep(const std::vector<double>& sweep, const EpOptions& o) {
  if (sweep.empty()) throw ParameterError("EP sweep needs at least one parameter value");
  for (double v : sweep)
    if (!std::isfinite(v)) throw ParameterError("EP sweep values must be finite");
  if (!(o.gap_rel_tol > 0) || !(o.kappa_tol >= 1) || o.refine_rounds < 0)
    throw ParameterError("invalid EP detection options");
}

bool better(const EpScanPoint& a, const EpScanPoint& b) {
  if (a.candidate != b.candidate) return a.candidate;
  return a.pair_kappa > b.pair_kappa;
}

// Each run of flagged grid points yields one candidate. The best point of the
// run is refined by bisection: each round probes both half-way points and
// keeps the best of the three, halving the bracket.
EpScan collect_candidates(const LiouvillianFamily& model, const std::vector<double>& sweep,
                          std::vector<EpScanPoint> points, const EpOptions& o) {
  EpScan scan;
  scan.points = std::move(points);
  const std::size_t n = sweep.size();
  std::size_t i = 0;
  while (i < n) {
    if (!scan.points[i].candidate) {
      ++i;
      continue;
    }
    std::size_t end = i;
    std::size_t best = i;
    while (end < n && scan.points[end].candidate) {
      if (better(scan.points[end], scan.points[best])) best = end;
      ++end;
    }
    EpScanPoint champion = scan.points[best];
    if (n > 1) {
      const double lo = sweep[best > 0 ? best - 1 : best];
      const double hi = sweep[best + 1 < n ? best + 1 : best];
      double half = 0.5 * (hi - lo);
      double centre = champion.parameter;
      for (int round = 0; round < o.refine_rounds && half != 0.0; ++round) {
        half *= 0.5;
        for (double probe : {centre - half, centre + half}) {
          if (probe < std::min(lo, hi) || probe > std::max(lo, hi)) continue;
          const EpScanPoint p = evaluate_ep_point(model(probe), probe, o);
          if (better(p, champion)) champion = p;
        }
        centre = champion.parameter;
      }
    }
    scan.candidates.push_back({champion.parameter, champion.pair_kappa, champion.pair_gap, best});
    i = end;
  }
  return scan;
}

}  // namespace

EpScan detect_ep_serial(const LiouvillianFamily& model, const std::vector<double>& sweep, const EpOptions& options) {
  validate_sweep(sweep, options);
  std::vector<EpScanPoint> points(sweep.size());
  for (std::size_t k = 0; k < sweep.size(); ++k) points[k] = evaluate_ep_point(model(sweep[k]), sweep[k], options);
  return collect_candidates(model, sweep, std::move(points), options);
}

EpScan detect_ep(const LiouvillianFamily& model, const std::vector<double>& sweep, const EpOptions& options) {
  validate_sweep(sweep, options);
  std::vector<EpScanPoint> points(sweep.size());
  const long n = static_cast<long>(sweep.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    try {
      points[k] = evaluate_ep_point(model(sweep[k]), sweep[k], options);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return collect_candidates(model, sweep, std::move(points), options);
}

}  // namespace anyon
