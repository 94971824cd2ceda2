#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pvbs/interactions.hpp"
#include "pvbs/lattice.hpp"

namespace pvbs {

using Config = std::uint64_t;

/// Mixed-radix little-endian packing of product configurations:
/// index = sum_v s_v (n+1)^pos(v), pos following the region's vertex order.
class StateSpace {
 public:
  StateSpace(std::size_t sites, int species);

  std::size_t sites() const noexcept { return sites_; }
  int local_dim() const noexcept { return q_; }
  std::uint64_t dimension() const noexcept { return dimension_; }
  std::uint64_t stride(std::size_t site) const { return strides_.at(site); }
  std::span<const std::uint64_t> strides() const noexcept { return strides_; }

  Config pack(std::span<const int> states) const;
  std::vector<int> unpack(Config c) const;
  /// All local states at once; `out` needs room for sites() entries.
  void decode(Config c, std::span<int> out) const noexcept;
  int state(Config c, std::size_t site) const noexcept {
    return static_cast<int>((c / strides_[site]) % static_cast<Config>(q_));
  }

 private:
  std::size_t sites_;
  int q_;
  int shift_ = 0;  // log2(q) when q is a power of two
  std::uint64_t dimension_;
  std::vector<std::uint64_t> strides_;
};

/// Particle-number sector: occupation[i-1] = number of sites in state i.
struct Sector {
  std::vector<int> occupation;
  auto operator<=>(const Sector&) const = default;
  bool operator==(const Sector&) const = default;
};

/// Multinomial size of a sector; 0 when infeasible.
std::uint64_t sector_dimension(std::size_t sites, const Sector& sector);
/// All sectors with sum of occupations <= sites, in lexicographic order.
std::vector<Sector> all_sectors(std::size_t sites, int species);
/// Occupation numbers of a configuration.
Sector sector_of(const StateSpace& space, Config c);

/// Configurations of a sector in ascending packed-index order. Infeasible
/// occupations give an empty list.
std::vector<Config> enumerate_sector(const Region& region, int species, const Sector& sector);

enum class Representation { matrix_free, sparse, dense };

struct OperatorLimits {
  std::size_t dense_cap = 8192;
  std::uint64_t max_dimension = std::uint64_t{1} << 25;
};

/// Sum over region edges of a two-site term chosen by edge axis, restricted to
/// one particle-number sector (or the full space when no sector is given).
/// Terms must conserve particle numbers: on |a b> they may only produce
/// |a b> and |b a>. Rows/columns follow the ascending sector basis.
class SectorOperator {
 public:
  SectorOperator(const Region& region, std::vector<TwoSiteOperator> terms_by_axis, int species,
                 std::optional<Sector> sector, Representation rep = Representation::matrix_free,
                 OperatorLimits limits = {});

  std::size_t size() const noexcept { return basis_.empty() ? full_size_ : basis_.size(); }
  const std::optional<Sector>& sector() const noexcept { return sector_; }
  int species() const noexcept { return space_.local_dim() - 1; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  Representation representation() const noexcept { return rep_; }
  const StateSpace& space() const noexcept { return space_; }

  Config config_at(std::size_t row) const { return basis_.empty() ? row : basis_[row]; }
  std::optional<std::size_t> index_of(Config c) const;

  void apply(std::span<const double> in, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> in) const;

  const std::vector<double>& diagonal() const noexcept { return diagonal_; }
  /// True when no edge term couples distinct configurations of this sector.
  bool is_diagonal() const noexcept { return diagonal_only_; }
  /// Gershgorin bound: min over rows of H_rr - sum_{c != r} |H_rc|. Every
  /// eigenvalue of the sector is >= this value.
  double gershgorin_lower_bound() const;

  /// M[a][b] = <a|H|b>. Throws CapacityError above the dense cap.
  Eigen::MatrixXd assemble_dense() const;
  /// Same operator in another representation (shares nothing mutable).
  SectorOperator with_representation(Representation rep) const;

 private:
  struct EdgeKernel {
    std::size_t tail;
    std::size_t head;
    int axis;
  };

  void apply_matrix_free(std::span<const double> in, std::span<double> out) const;
  void compile_sparse();
  void build_buckets();

  StateSpace space_;
  std::optional<Sector> sector_;
  Representation rep_;
  OperatorLimits limits_;
  std::vector<EdgeKernel> edges_;
  // Per axis, indexed by a*q + b: <ab|h|ab> and <ab|h|ba>.
  std::vector<std::vector<double>> diag_coeff_;
  std::vector<std::vector<double>> swap_coeff_;
  std::vector<Config> basis_;  // empty for the full space
  // index_of lookup: basis_ entries with c / bucket_width_ == b start at bucket_start_[b].
  Config bucket_width_ = 1;
  std::vector<std::uint32_t> bucket_start_;
  std::size_t full_size_ = 0;
  std::vector<double> diagonal_;
  bool diagonal_only_ = true;
  // sparse representation (off-diagonal part)
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
  Eigen::MatrixXd dense_;
};

SectorOperator make_hamiltonian(const Region& region, const AnisotropyModel& model,
                                std::optional<Sector> sector,
                                Representation rep = Representation::matrix_free,
                                OperatorLimits limits = {});
SectorOperator make_reference_hamiltonian(const Region& region, int species,
                                          std::optional<Sector> sector,
                                          Representation rep = Representation::matrix_free,
                                          OperatorLimits limits = {});
/// H - H_ref on the region.
SectorOperator make_perturbation(const Region& region, const AnisotropyModel& model,
                                 std::optional<Sector> sector,
                                 Representation rep = Representation::matrix_free,
                                 OperatorLimits limits = {});

using SparseOperator = Eigen::SparseMatrix<double>;

/// Full-space embedding of one edge term.
SparseOperator embed_edge_term(const Region& region, const Edge& edge, const TwoSiteOperator& h,
                               int species);

struct SquareDecomposition {
  SparseOperator H;
  SparseOperator Q;  // anticommutators of edge pairs sharing a vertex
  SparseOperator R;  // anticommutators of vertex-disjoint edge pairs
};

/// Full-space H, Q and R with H^2 = H + Q + R. Sums run over unordered edge
/// pairs. Two edges joining the same two sites (torus with L = 1) count as
/// adjacent. Throws CapacityError when (n+1)^|V| exceeds the dense cap.
SquareDecomposition build_QR(const Region& region, const AnisotropyModel& model,
                             OperatorLimits limits = {});

/// Upper bound on the operator norm: sqrt of max absolute row sum times max absolute column sum.
double symmetric_norm_bound(const SparseOperator& m);

}  // namespace pvbs
