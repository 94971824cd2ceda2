#include "pvbs/gsoracle.hpp"

#include <algorithm>
#include <cmath>

#include "pvbs/criterion.hpp"
#include "pvbs/errors.hpp"

namespace pvbs {

bool is_admissible(const StickSequence& s) {
  if (s.labels.empty()) return false;
  bool reached_zero = false;
  for (std::size_t l = 0; l < s.labels.size(); ++l) {
    const int x = s.labels[l];
    if (reached_zero) {
      if (x != 0) return false;
      continue;
    }
    if (x == 0) {
      reached_zero = true;
      continue;
    }
    if (l + 1 < s.labels.size() && s.labels[l + 1] >= x) return false;
  }
  return reached_zero;
}

std::vector<StickSequence> enumerate_stick_sequences(int n) {
  if (n < 1) throw UsageError("species count must be >= 1");
  if (n > 9) throw CapacityError("exhaustive stick enumeration is limited to n <= 9");
  std::vector<StickSequence> out;
  std::vector<int> labels(static_cast<std::size_t>(n) + 1, 0);
  while (true) {
    StickSequence s{labels};
    if (is_admissible(s)) out.push_back(std::move(s));
    std::size_t k = labels.size();
    while (k > 0 && labels[k - 1] == n) labels[--k] = 0;
    if (k == 0) break;
    ++labels[k - 1];
  }
  return out;
}

std::vector<Config> reference_kernel_basis(int m, int n, int d) {
  RegionLimits unlimited;
  unlimited.max_sites = 64;
  const Region region = build_box_on_stick(m, n, d, unlimited);
  const StateSpace space(region.num_sites(), n);
  std::vector<Config> out;
  for (const auto& seq : enumerate_stick_sequences(n)) {
    std::vector<int> states(region.num_sites(), 0);
    for (std::size_t l = 0; l < seq.labels.size(); ++l) {
      LatticePoint p{std::vector<int>(static_cast<std::size_t>(d), 0)};
      p.coords[0] = static_cast<int>(l);
      states[*region.index_of(p)] = seq.labels[l];
    }
    out.push_back(space.pack(states));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Sector sector_of(Config c, std::size_t sites, int species) {
  return sector_of(StateSpace(sites, species), c);
}

OverlapCheck ground_overlap_check(const AnisotropyModel& model, int m, const Sector& sector,
                                  const SolverOptions& solver, OperatorLimits limits) {
  const int n = model.species(), d = model.dim();
  if (sector.occupation.size() != static_cast<std::size_t>(n) ||
      std::any_of(sector.occupation.begin(), sector.occupation.end(), [](int v) { return v != 0 && v != 1; }))
    throw UsageError("overlap check needs a sector with occupations in {0,1}");
  OverlapCheck out;
  out.C = C_mn(m, n, d);
  const double product = 3.0 * out.C * model.delta();
  if (!(product < 1.0))
    throw UsageError("overlap check needs 3 C delta < 1, got " + std::to_string(product));
  out.bound = 2.0 * out.C * model.delta();
  out.a0_floor = 1.0 - out.C * model.delta();

  const Region region = build_box_on_stick(m, n, d);
  const SectorOperator ref = make_reference_hamiltonian(region, n, sector, Representation::matrix_free, limits);
  const double zero_tol = default_zero_tol(region.num_edges());
  std::vector<std::size_t> ref_zero;
  for (std::size_t i = 0; i < ref.size(); ++i)
    if (std::abs(ref.diagonal()[i]) < zero_tol) ref_zero.push_back(i);
  if (ref_zero.size() != 1)
    throw ModelError("reference kernel in sector is " + std::to_string(ref_zero.size()) + "-dimensional");

  const SectorOperator h = make_hamiltonian(region, model, sector, Representation::sparse, limits);
  const int k = static_cast<int>(std::min<std::size_t>(2, h.size()));
  const EigenSolve s = lowest_eigenpairs(h, k, solver);
  if (!s.converged) throw ConvergenceError("ground state solve did not converge", s.residuals.back());
  if (s.values[0] >= zero_tol) throw ModelError("no ground state in sector");
  if (k == 2 && s.values[1] < zero_tol) throw ModelError("kernel of H in sector is degenerate");

  Eigen::VectorXd psi = s.vectors.col(0);
  psi.normalize();
  Eigen::Index top = 0;
  psi.cwiseAbs().maxCoeff(&top);
  if (psi(top) < 0) psi = -psi;
  out.nonnegative = psi.minCoeff() >= -1e-10;
  out.a0 = psi(static_cast<Eigen::Index>(ref_zero[0]));
  out.deviation = (psi - Eigen::VectorXd::Unit(psi.size(), static_cast<Eigen::Index>(ref_zero[0]))).squaredNorm();
  out.pass = out.deviation <= out.bound && out.a0 >= out.a0_floor;
  return out;
}

}  // namespace pvbs
