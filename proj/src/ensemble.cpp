#include "anyon/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <omp.h>

#include "anyon/errors.hpp"

namespace anyon {

namespace {

struct Leaf {
  std::vector<Matrix> sum;     // Σ ρ
  std::vector<Matrix> sum_sq;  // Σ (Re²) + i Σ (Im²)
  std::vector<std::pair<std::uint64_t, long>> failures;  // (stream id, step)
  std::string first_message;

  void add(const Leaf& o) {
    for (std::size_t r = 0; r < sum.size(); ++r) {
      sum[r] += o.sum[r];
      sum_sq[r] += o.sum_sq[r];
    }
    failures.insert(failures.end(), o.failures.begin(), o.failures.end());
    if (first_message.empty()) first_message = o.first_message;
  }
};

Leaf run_leaf(const StochasticModel& model, std::size_t leaf, std::size_t n_traj, std::uint64_t seed,
              std::size_t n_rec) {
  const auto d = model.dim();
  Leaf out;
  out.sum.assign(n_rec, Matrix::Zero(d, d));
  out.sum_sq.assign(n_rec, Matrix::Zero(d, d));
  std::vector<Matrix> traj(n_rec, Matrix::Zero(d, d));
  const std::size_t begin = leaf * kLeafSize;
  const std::size_t end = std::min(n_traj, begin + kLeafSize);
  for (std::size_t id = begin; id < end; ++id) {
    try {
      model.run(seed, id, [&](std::size_t r, double, const Matrix& rho) { traj[r] = rho; });
    } catch (const TrajectoryError& e) {
      out.failures.emplace_back(e.stream_id(), e.step());
      if (out.first_message.empty()) out.first_message = e.what();
      continue;
    }
    for (std::size_t r = 0; r < n_rec; ++r) {
      out.sum[r] += traj[r];
      out.sum_sq[r].real() += traj[r].real().cwiseAbs2();
      out.sum_sq[r].imag() += traj[r].imag().cwiseAbs2();
    }
  }
  return out;
}

EnsembleResult finish(const StochasticModel& model, std::vector<Leaf> leaves, std::size_t n_traj) {
  // fixed pairwise tree over leaf order
  for (std::size_t width = 1; width < leaves.size(); width *= 2)
    for (std::size_t i = 0; i + width < leaves.size(); i += 2 * width) leaves[i].add(leaves[i + width]);
  Leaf& total = leaves.front();

  if (!total.failures.empty()) {
    std::sort(total.failures.begin(), total.failures.end());
    std::ostringstream os;
    os << total.failures.size() << " of " << n_traj << " trajectories failed; stream ids:";
    for (std::size_t k = 0; k < total.failures.size(); ++k) {
      if (k == 20) {
        os << " ...";
        break;
      }
      os << ' ' << total.failures[k].first;
    }
    os << " (first: " << total.first_message << ")";
    throw TrajectoryError(os.str(), total.failures.front().second, total.failures.front().first);
  }

  EnsembleResult res;
  res.n_traj = n_traj;
  res.times = model.config().grid.record_times();
  const double n = double(n_traj);
  for (std::size_t r = 0; r < total.sum.size(); ++r) {
    Matrix mean = total.sum[r] / n;
    Matrix se(mean.rows(), mean.cols());
    for (Eigen::Index i = 0; i < mean.rows(); ++i)
      for (Eigen::Index j = 0; j < mean.cols(); ++j) {
        const auto var = [&](double sq, double m) {
          return n > 1 ? std::max(0.0, (sq / n - m * m) * n / (n - 1)) : 0.0;
        };
        const double vr = var(total.sum_sq[r](i, j).real(), mean(i, j).real());
        const double vi = var(total.sum_sq[r](i, j).imag(), mean(i, j).imag());
        se(i, j) = cplx(std::sqrt(vr / n), std::sqrt(vi / n));
      }
    res.mean_states.push_back(std::move(mean));
    res.standard_errors.push_back(std::move(se));
  }
  return res;
}

void check_count(std::size_t n_traj) {
  if (n_traj == 0) throw ParameterError("ensemble needs at least one trajectory");
}

}  // namespace

EnsembleResult ensemble_average_serial(const StochasticModel& model, std::size_t n_traj, std::uint64_t master_seed) {
  check_count(n_traj);
  const std::size_t n_rec = model.config().grid.record_steps().size();
  const std::size_t n_leaves = (n_traj + kLeafSize - 1) / kLeafSize;
  std::vector<Leaf> leaves;
  leaves.reserve(n_leaves);
  for (std::size_t l = 0; l < n_leaves; ++l) leaves.push_back(run_leaf(model, l, n_traj, master_seed, n_rec));
  return finish(model, std::move(leaves), n_traj);
}

EnsembleResult ensemble_average(const StochasticModel& model, std::size_t n_traj, std::uint64_t master_seed,
                                int workers) {
  check_count(n_traj);
  if (workers < 0) throw ParameterError("workers must be >= 0");
  const std::size_t n_rec = model.config().grid.record_steps().size();
  const long n_leaves = static_cast<long>((n_traj + kLeafSize - 1) / kLeafSize);
  std::vector<Leaf> leaves(static_cast<std::size_t>(n_leaves));
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long l = 0; l < n_leaves; ++l) {
    try {
      leaves[l] = run_leaf(model, std::size_t(l), n_traj, master_seed, n_rec);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return finish(model, std::move(leaves), n_traj);
}

}  // namespace anyon
