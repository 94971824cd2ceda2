#include "pvbs/spectra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>

#include "pvbs/errors.hpp"

namespace pvbs {

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::dense: return "dense";
    case SolveMethod::diagonal: return "diagonal";
    case SolveMethod::krylov: return "krylov";
    case SolveMethod::bounded: return "bounded";
  }
  return "unknown";
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using StopRule = std::function<bool(const std::vector<double>&)>;

// Lowest eigenpairs one at a time by deflated single-vector runs, until
// `stop` holds for the sorted values. With `verify`, one further deflated run
// checks that nothing lower was missed; a lower hit is inserted and the check
// repeats. The checking run's value is kept, so the result then holds one
// more value than `stop` asked for.
EigenSolve krylov_lowest(const LinearMap& map, std::size_t n, const StopRule& stop, KrylovOptions ko,
                         bool verify) {
  EigenSolve out;
  out.method = SolveMethod::krylov;
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd basis(dim, 0);
  std::vector<double> values, residuals;
  const std::uint64_t base_seed = ko.seed;
  std::uint64_t run = 0;

  auto run_one = [&] {
    ko.seed = splitmix(base_seed + run++);
    KrylovResult r = lanczos_lowest(map, n, 1, basis, ko);
    out.matvecs += r.matvecs;
    if (!r.converged) out.converged = false;
    Eigen::VectorXd x = r.vectors.col(0);
    for (int pass = 0; pass < 2 && basis.cols() > 0; ++pass) x -= basis * (basis.transpose() * x);
    x.normalize();
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = x;
    values.push_back(r.values(0));
    residuals.push_back(r.residuals(0));
  };

  auto sorted_values = [&] {
    std::vector<double> s = values;
    std::sort(s.begin(), s.end());
    return s;
  };

  // Repeated misses mean the runs cannot be trusted; give up rather than loop.
  constexpr int max_misses = 8;
  for (int misses = 0;; ++misses) {
    while (!stop(sorted_values()) && static_cast<std::size_t>(basis.cols()) < n) run_one();
    if (static_cast<std::size_t>(basis.cols()) >= n || !verify) break;
    const double top = *std::max_element(values.begin(), values.end());
    run_one();
    if (values.back() >= top - 1e-8 * std::max(1.0, std::abs(top))) break;
    if (misses == max_misses) {
      out.converged = false;
      break;
    }
  }

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  out.vectors.resize(dim, static_cast<Eigen::Index>(order.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.values.push_back(values[order[i]]);
    out.residuals.push_back(residuals[order[i]]);
    out.vectors.col(static_cast<Eigen::Index>(i)) = basis.col(static_cast<Eigen::Index>(order[i]));
  }
  return out;
}

LinearMap as_map(const SectorOperator& op, double sign = 1.0) {
  return [&op, sign](std::span<const double> in, std::span<double> out) {
    op.apply(in, out);
    if (sign != 1.0)
      for (double& y : out) y *= sign;
  };
}

EigenSolve dense_solve(const SectorOperator& op, bool vectors) {
  EigenSolve out;
  out.method = SolveMethod::dense;
  const Eigen::MatrixXd m = op.assemble_dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  out.residuals.assign(out.values.size(), 0.0);
  if (vectors) out.vectors = es.eigenvectors();
  return out;
}

// The `limit` smallest diagonal entries, ties broken by basis index.
EigenSolve diagonal_solve(const SectorOperator& op, std::size_t limit, bool vectors) {
  EigenSolve out;
  out.method = SolveMethod::diagonal;
  const auto& d = op.diagonal();
  limit = std::min(limit, d.size());
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) { return d[a] < d[b] || (d[a] == d[b] && a < b); };
  const auto mid = order.begin() + static_cast<std::ptrdiff_t>(limit);
  std::nth_element(order.begin(), mid, order.end(), less);
  std::sort(order.begin(), mid, less);
  order.resize(limit);
  for (std::size_t i : order) out.values.push_back(d[i]);
  out.residuals.assign(out.values.size(), 0.0);
  if (vectors) {
    out.vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(limit));
    for (std::size_t i = 0; i < limit; ++i)
      out.vectors(static_cast<Eigen::Index>(order[i]), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return out;
}

void truncate(EigenSolve& s, std::size_t k) {
  if (s.values.size() <= k) return;
  s.values.resize(k);
  s.residuals.resize(k);
  if (s.vectors.cols() > static_cast<Eigen::Index>(k)) s.vectors.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(k));
}

}  // namespace

std::uint64_t sector_seed(std::uint64_t seed, const std::vector<int>& occupation) {
  std::uint64_t h = splitmix(seed);
  for (int v : occupation) h = splitmix(h ^ static_cast<std::uint64_t>(v));
  return h;
}

EigenSolve lowest_eigenpairs(const SectorOperator& op, int k, const SolverOptions& opts) {
  if (k < 1 || static_cast<std::size_t>(k) > op.size()) throw UsageError("eigenvalue count must be in [1, sector size]");
  const auto want = static_cast<std::size_t>(k);
  EigenSolve s;
  if (op.is_diagonal()) {
    s = diagonal_solve(op, want, true);
  } else if (op.size() <= opts.dense_solve_max) {
    s = dense_solve(op, true);
  } else {
    s = krylov_lowest(as_map(op), op.size(), [want](const std::vector<double>& v) { return v.size() >= want; },
                      opts.krylov, opts.verify);
  }
  truncate(s, want);
  return s;
}

std::vector<double> lowest_eigenvalues(const SectorOperator& op, int k, std::uint64_t seed, const SolverOptions& opts) {
  SolverOptions o = opts;
  o.krylov.seed = seed;
  EigenSolve s = lowest_eigenpairs(op, k, o);
  if (!s.converged) {
    const double worst = s.residuals.empty() ? 0.0 : *std::max_element(s.residuals.begin(), s.residuals.end());
    throw ConvergenceError("Krylov iteration did not converge within the matvec budget", worst);
  }
  return s.values;
}

double spectral_radius(const SectorOperator& op, const SolverOptions& opts) {
  if (op.is_diagonal()) {
    double r = 0.0;
    for (double d : op.diagonal()) r = std::max(r, std::abs(d));
    return r;
  }
  if (op.size() <= opts.dense_solve_max) {
    const EigenSolve s = dense_solve(op, false);
    return std::max(std::abs(s.values.front()), std::abs(s.values.back()));
  }
  auto one = [](const std::vector<double>& v) { return !v.empty(); };
  const EigenSolve lo = krylov_lowest(as_map(op), op.size(), one, opts.krylov, opts.verify);
  const EigenSolve hi = krylov_lowest(as_map(op, -1.0), op.size(), one, opts.krylov, opts.verify);
  if (!lo.converged || !hi.converged) {
    const double worst = std::max(lo.residuals.front(), hi.residuals.front());
    throw ConvergenceError("Krylov iteration did not converge within the matvec budget", worst);
  }
  return std::max(std::abs(lo.values.front()), std::abs(hi.values.front()));
}

double default_zero_tol(std::size_t num_edges) { return 1e-9 * (1.0 + static_cast<double>(num_edges)); }

namespace {

Representation representation_for(std::size_t size, const SolverOptions& solver) {
  // CSR costs roughly 12 bytes per nonzero; beyond a few million rows the
  // matrix-free gather is the safer default.
  if (size > solver.dense_solve_max && size <= (std::size_t{1} << 22)) return Representation::sparse;
  return Representation::matrix_free;
}

SectorSpectrum solve_sector(const SectorOperator& op, const Sector& sector, int species, double zero_tol,
                            const ReportOptions& options) {
  SectorSpectrum out;
  out.occupation = sector.occupation;
  out.size = op.size();

  const std::size_t min_report = (std::size_t{1} << species) + 2;
  auto positive_seen = [zero_tol](const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [zero_tol](double x) { return x > zero_tol; });
  };

  EigenSolve s;
  if (op.is_diagonal()) {
    const auto& d = op.diagonal();
    const auto zeros = static_cast<std::size_t>(std::count_if(d.begin(), d.end(), [zero_tol](double x) { return x < zero_tol; }));
    s = diagonal_solve(op, std::max(min_report, zeros + 1), false);
  } else if (op.size() <= options.solver.dense_solve_max) {
    s = dense_solve(op, options.keep_kernel_vectors);
  } else {
    KrylovOptions ko = options.solver.krylov;
    ko.seed = sector_seed(options.seed, sector.occupation);
    s = krylov_lowest(as_map(op), op.size(), positive_seen, ko, options.solver.verify);
  }
  out.method = s.method;
  out.converged = s.converged;
  for (double r : s.residuals) out.residual = std::max(out.residual, r);

  std::size_t keep = s.values.size();
  if (s.method != SolveMethod::krylov) {
    const auto first_pos = std::find_if(s.values.begin(), s.values.end(), [zero_tol](double x) { return x > zero_tol; });
    const auto through = static_cast<std::size_t>(first_pos - s.values.begin()) + 1;
    keep = std::min(s.values.size(), std::max(min_report, through));
  }
  out.lowest.assign(s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(keep));
  out.kernel_dim = static_cast<std::size_t>(std::count_if(s.values.begin(), s.values.end(), [zero_tol](double x) { return x < zero_tol; }));

  if (options.keep_kernel_vectors && out.kernel_dim > 0) {
    const auto kd = static_cast<Eigen::Index>(out.kernel_dim);
    if (s.method == SolveMethod::diagonal) {
      const auto& d = op.diagonal();
      out.kernel_vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.size()), kd);
      Eigen::Index col = 0;
      for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] < zero_tol) out.kernel_vectors(static_cast<Eigen::Index>(i), col++) = 1.0;
    } else {
      out.kernel_vectors = s.vectors.leftCols(kd);
    }
  }
  return out;
}

double first_positive(const SectorSpectrum& s, double zero_tol) {
  for (double v : s.lowest)
    if (v > zero_tol) return v;
  return std::numeric_limits<double>::infinity();
}

// Runs job(i) for every i in `order` on `workers` threads; the first
// exception stops the pool and is rethrown.
void run_pool(const std::vector<std::size_t>& order, unsigned workers, const std::function<void(std::size_t)>& job) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= order.size()) return;
      try {
        job(order[slot]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(order.size());
      }
    }
  };
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, order.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

SpectralReport spectral_report(const Region& region, const AnisotropyModel& model, const ReportOptions& options) {
  if (region.dim() != model.dim()) throw UsageError("model and region dimensions differ");
  const int species = model.species();
  const std::vector<Sector> sectors = all_sectors(region.num_sites(), species);
  std::vector<std::size_t> sizes(sectors.size());
  for (std::size_t i = 0; i < sectors.size(); ++i) {
    sizes[i] = static_cast<std::size_t>(sector_dimension(region.num_sites(), sectors[i]));
    if (sizes[i] > options.limits.max_dimension)
      throw CapacityError("sector dimension " + std::to_string(sizes[i]) + " exceeds limit " +
                          std::to_string(options.limits.max_dimension));
  }

  SpectralReport rep;
  rep.num_sites = region.num_sites();
  rep.num_edges = region.num_edges();
  rep.zero_tol = options.zero_tol.value_or(default_zero_tol(region.num_edges()));
  rep.sectors.resize(sectors.size());
  const unsigned workers = options.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.workers;

  // Phase 1: cheap sectors (diagonal or dense) are solved outright; the rest
  // get their Gershgorin bound.
  std::vector<char> iterative(sectors.size(), 0);
  std::vector<double> bound(sectors.size(), -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> all(sectors.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::stable_sort(all.begin(), all.end(), [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });
  run_pool(all, workers, [&](std::size_t i) {
    const SectorOperator op = make_hamiltonian(region, model, sectors[i], Representation::matrix_free, options.limits);
    if (op.is_diagonal() || op.size() <= options.solver.dense_solve_max) {
      rep.sectors[i] = solve_sector(op, sectors[i], species, rep.zero_tol, options);
    } else {
      iterative[i] = 1;
      bound[i] = op.gershgorin_lower_bound();
    }
  });

  // Phase 2: iterative sectors by ascending bound. A sector is skipped once
  // its bound reaches the best gap seen so far.
  std::atomic<double> best{std::numeric_limits<double>::infinity()};
  auto lower_best = [&](double v) {
    double cur = best.load();
    while (v < cur && !best.compare_exchange_weak(cur, v)) {
    }
  };
  for (std::size_t i = 0; i < sectors.size(); ++i)
    if (!iterative[i]) lower_best(first_positive(rep.sectors[i], rep.zero_tol));

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < sectors.size(); ++i)
    if (iterative[i]) pending.push_back(i);
  std::stable_sort(pending.begin(), pending.end(), [&](std::size_t a, std::size_t b) { return bound[a] < bound[b]; });
  std::vector<char> solved(sectors.size(), 0);
  run_pool(pending, workers, [&](std::size_t i) {
    if (options.screen && bound[i] > rep.zero_tol && bound[i] >= best.load()) return;
    const Sector& sector = sectors[i];
    const SectorOperator op = make_hamiltonian(region, model, sector, representation_for(sizes[i], options.solver),
                                               options.limits);
    rep.sectors[i] = solve_sector(op, sector, species, rep.zero_tol, options);
    rep.sectors[i].lower_bound = bound[i];
    solved[i] = 1;
    lower_best(first_positive(rep.sectors[i], rep.zero_tol));
  });

  const double gap = best.load();
  for (std::size_t i : pending) {
    // Which of the borderline sectors got solved depends on timing; report
    // every sector at or above the gap as bounded so the output does not.
    if (options.screen && bound[i] > rep.zero_tol && bound[i] >= gap) solved[i] = 0;
    if (solved[i]) continue;
    SectorSpectrum s;
    s.occupation = sectors[i].occupation;
    s.size = sizes[i];
    s.method = SolveMethod::bounded;
    s.lower_bound = bound[i];
    rep.sectors[i] = std::move(s);
  }

  for (const auto& s : rep.sectors) {
    rep.kernel_dim += s.kernel_dim;
    if (!s.converged) {
      rep.converged = false;
      rep.unresolved.push_back(s.occupation);
    }
    rep.gap = std::min(rep.gap, first_positive(s, rep.zero_tol));
  }
  rep.gap_resolved = rep.converged && std::isfinite(rep.gap) && rep.gap > 100.0 * rep.zero_tol;
  return rep;
}

}  // namespace pvbs
