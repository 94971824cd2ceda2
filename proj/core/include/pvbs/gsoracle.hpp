#pragma once

#include <vector>

#include "pvbs/hamiltonian.hpp"
#include "pvbs/spectra.hpp"

namespace pvbs {

/// Labels (i_0, ..., i_n) on the sites 0, e_1, ..., n e_1 of the stick and
/// the box corner.
struct StickSequence {
  std::vector<int> labels;
  auto operator<=>(const StickSequence&) const = default;
  bool operator==(const StickSequence&) const = default;
};

/// Strictly decreasing until the first 0, then 0 to the end.
bool is_admissible(const StickSequence& s);

/// All admissible sequences for n species, by exhaustive filtering of the
/// (n+1)^(n+1) candidates; lexicographic order.
std::vector<StickSequence> enumerate_stick_sequences(int n);

/// Kernel configurations of the reference Hamiltonian on box_on_stick(m, n, d):
/// admissible stick labels, everything else in state 0. Ascending packed order.
std::vector<Config> reference_kernel_basis(int m, int n, int d);

/// Occupation numbers of a packed configuration on `sites` sites.
Sector sector_of(Config c, std::size_t sites, int species);

struct OverlapCheck {
  double a0 = 1.0;         // <psi_0, psi_ref>
  double deviation = 0.0;  // |psi_ref - psi_0|^2
  double bound = 0.0;      // 2 C delta
  double a0_floor = 1.0;   // 1 - C delta
  double C = 0.0;
  bool nonnegative = true;  // psi_0 nonnegative after the sign fix
  bool pass = true;         // deviation <= bound and a0 >= a0_floor
};

/// Compares the in-sector ground states of H and of the reference
/// Hamiltonian on C_m. Requires nu in {0,1}^n and 3 C delta < 1 (UsageError
/// otherwise); a kernel that is not one-dimensional in the sector throws
/// ModelError.
OverlapCheck ground_overlap_check(const AnisotropyModel& model, int m, const Sector& sector,
                                  const SolverOptions& solver = {}, OperatorLimits limits = {});

}  // namespace pvbs
