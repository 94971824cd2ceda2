#include "pvbs/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "pvbs/errors.hpp"

namespace pvbs {

namespace {
using Digits = std::array<int, 64>;
}  // namespace

StateSpace::StateSpace(std::size_t sites, int species) : sites_(sites), q_(species + 1) {
  if (species < 1) throw UsageError("species count must be >= 1");
  strides_.reserve(sites);
  std::uint64_t stride = 1;
  for (std::size_t s = 0; s < sites; ++s) {
    strides_.push_back(stride);
    if (stride > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(q_) / 2)
      throw CapacityError("state space (n+1)^|V| does not fit in a 63-bit index");
    stride *= static_cast<std::uint64_t>(q_);
  }
  dimension_ = stride;
  if ((q_ & (q_ - 1)) == 0)
    while ((1 << shift_) < q_) ++shift_;
}

void StateSpace::decode(Config c, std::span<int> out) const noexcept {
  if (shift_ > 0) {
    const Config mask = (Config{1} << shift_) - 1;
    for (std::size_t s = 0; s < sites_; ++s, c >>= shift_) out[s] = static_cast<int>(c & mask);
    return;
  }
  // Constant divisors compile to multiplications.
  auto digits = [&]<Config Q>() {
    for (std::size_t s = 0; s < sites_; ++s, c /= Q) out[s] = static_cast<int>(c % Q);
  };
  switch (q_) {
    case 3: digits.template operator()<3>(); return;
    case 5: digits.template operator()<5>(); return;
    case 6: digits.template operator()<6>(); return;
    case 7: digits.template operator()<7>(); return;
    default: break;
  }
  const auto q = static_cast<Config>(q_);
  for (std::size_t s = 0; s < sites_; ++s, c /= q) out[s] = static_cast<int>(c % q);
}

Config StateSpace::pack(std::span<const int> states) const {
  if (states.size() != sites_) throw UsageError("configuration has wrong number of sites");
  Config c = 0;
  for (std::size_t s = 0; s < sites_; ++s) {
    if (states[s] < 0 || states[s] >= q_) throw UsageError("local state out of range");
    c += static_cast<Config>(states[s]) * strides_[s];
  }
  return c;
}

std::vector<int> StateSpace::unpack(Config c) const {
  if (c >= dimension_) throw UsageError("configuration index out of range");
  std::vector<int> states(sites_);
  for (std::size_t s = 0; s < sites_; ++s) {
    states[s] = static_cast<int>(c % static_cast<Config>(q_));
    c /= static_cast<Config>(q_);
  }
  return states;
}

std::uint64_t sector_dimension(std::size_t sites, const Sector& sector) {
  long long remaining = static_cast<long long>(sites);
  for (int v : sector.occupation) {
    if (v < 0) return 0;
    remaining -= v;
  }
  if (remaining < 0) return 0;
  // Product of binomials C(sites, nu_1) C(sites - nu_1, nu_2) ...
  long double total = 1;
  std::uint64_t exact = 1;
  std::size_t left = sites;
  for (int v : sector.occupation) {
    std::uint64_t b = 1;
    for (int t = 1; t <= v; ++t) b = b * (left - static_cast<std::size_t>(t) + 1) / static_cast<std::uint64_t>(t);
    total *= static_cast<long double>(b);
    if (total > static_cast<long double>(std::numeric_limits<std::uint64_t>::max()))
      throw CapacityError("sector dimension overflows");
    exact *= b;
    left -= static_cast<std::size_t>(v);
  }
  return exact;
}

std::vector<Sector> all_sectors(std::size_t sites, int species) {
  std::vector<Sector> out;
  std::vector<int> occ(static_cast<std::size_t>(species), 0);
  auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i == occ.size()) {
      out.push_back({occ});
      return;
    }
    for (int v = 0; v <= left; ++v) {
      occ[i] = v;
      self(self, i + 1, left - v);
    }
  };
  rec(rec, 0, static_cast<int>(sites));
  return out;
}

Sector sector_of(const StateSpace& space, Config c) {
  Sector s{std::vector<int>(static_cast<std::size_t>(space.local_dim() - 1), 0)};
  for (int st : space.unpack(c))
    if (st > 0) ++s.occupation[static_cast<std::size_t>(st - 1)];
  return s;
}

std::vector<Config> enumerate_sector(const Region& region, int species, const Sector& sector) {
  if (sector.occupation.size() != static_cast<std::size_t>(species))
    throw UsageError("sector occupation vector must have one entry per species");
  const StateSpace space(region.num_sites(), species);
  std::vector<int> counts(static_cast<std::size_t>(species) + 1, 0);
  long long vacuum = static_cast<long long>(region.num_sites());
  for (int i = 0; i < species; ++i) {
    if (sector.occupation[static_cast<std::size_t>(i)] < 0) return {};
    counts[static_cast<std::size_t>(i) + 1] = sector.occupation[static_cast<std::size_t>(i)];
    vacuum -= sector.occupation[static_cast<std::size_t>(i)];
  }
  if (vacuum < 0) return {};
  counts[0] = static_cast<int>(vacuum);

  std::vector<Config> out;
  out.reserve(static_cast<std::size_t>(sector_dimension(region.num_sites(), sector)));
  // Fill from the most significant site down, smallest state first: ascending order.
  auto rec = [&](auto&& self, std::size_t remaining, Config prefix) -> void {
    if (remaining == 0) {
      out.push_back(prefix);
      return;
    }
    const std::size_t site = remaining - 1;
    for (std::size_t s = 0; s < counts.size(); ++s) {
      if (counts[s] == 0) continue;
      --counts[s];
      self(self, site, prefix + static_cast<Config>(s) * space.stride(site));
      ++counts[s];
    }
  };
  rec(rec, region.num_sites(), 0);
  return out;
}

SectorOperator::SectorOperator(const Region& region, std::vector<TwoSiteOperator> terms_by_axis,
                               int species, std::optional<Sector> sector, Representation rep,
                               OperatorLimits limits)
    : space_(region.num_sites(), species), sector_(std::move(sector)), rep_(rep), limits_(limits) {
  const int q = species + 1;
  if (terms_by_axis.size() != static_cast<std::size_t>(region.dim()))
    throw UsageError("need one two-site term per lattice direction");
  for (const auto& h : terms_by_axis) {
    if (h.rows() != q * q || h.cols() != q * q) throw UsageError("two-site term has wrong size");
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ModelError("two-site term is not symmetric");
    std::vector<double> diag(static_cast<std::size_t>(q * q), 0.0), swap(static_cast<std::size_t>(q * q), 0.0);
    for (int a = 0; a < q; ++a) {
      for (int b = 0; b < q; ++b) {
        const int col = a * q + b, mirrored = b * q + a;
        for (int row = 0; row < q * q; ++row) {
          if (h(row, col) != 0.0 && row != col && row != mirrored)
            throw ModelError("two-site term does not conserve particle numbers");
        }
        diag[static_cast<std::size_t>(col)] = h(col, col);
        if (a != b) swap[static_cast<std::size_t>(col)] = h(col, mirrored);
      }
    }
    diag_coeff_.push_back(std::move(diag));
    swap_coeff_.push_back(std::move(swap));
  }
  for (const auto& e : region.edges()) edges_.push_back({e.tail, e.head, e.axis});

  if (sector_) {
    const std::uint64_t dim = sector_dimension(region.num_sites(), *sector_);
    if (dim > limits_.max_dimension)
      throw CapacityError("sector dimension " + std::to_string(dim) + " exceeds limit " +
                          std::to_string(limits_.max_dimension));
    basis_ = enumerate_sector(region, species, *sector_);
    build_buckets();
  } else {
    if (space_.dimension() > limits_.max_dimension)
      throw CapacityError("state space dimension " + std::to_string(space_.dimension()) +
                          " exceeds limit " + std::to_string(limits_.max_dimension));
    full_size_ = static_cast<std::size_t>(space_.dimension());
  }

  const std::size_t n_rows = size();
  diagonal_.assign(n_rows, 0.0);
  for (std::size_t r = 0; r < n_rows; ++r) {
    const Config c = config_at(r);
    double acc = 0.0;
    Digits digits;
    space_.decode(c, digits);
    for (const auto& e : edges_) {
      const int a = digits[e.tail], b = digits[e.head];
      const auto idx = static_cast<std::size_t>(a * q + b);
      acc += diag_coeff_[static_cast<std::size_t>(e.axis)][idx];
      if (a != b && swap_coeff_[static_cast<std::size_t>(e.axis)][idx] != 0.0) diagonal_only_ = false;
    }
    diagonal_[r] = acc;
  }

  if (rep_ == Representation::sparse) compile_sparse();
  if (rep_ == Representation::dense) dense_ = assemble_dense();
}

void SectorOperator::build_buckets() {
  // Bucket on the high sites, with about one bucket per basis state.
  std::size_t split = 0;
  while (split + 1 < space_.sites() && space_.dimension() / space_.stride(split) > basis_.size()) ++split;
  bucket_width_ = space_.stride(split);
  const std::uint64_t buckets = space_.dimension() / bucket_width_;
  if (buckets > 2 * basis_.size() + 64 || basis_.size() >= UINT32_MAX) return;  // plain binary search
  bucket_start_.assign(static_cast<std::size_t>(buckets) + 1, 0);
  for (Config c : basis_) ++bucket_start_[static_cast<std::size_t>(c / bucket_width_) + 1];
  for (std::size_t b = 1; b < bucket_start_.size(); ++b) bucket_start_[b] += bucket_start_[b - 1];
}

std::optional<std::size_t> SectorOperator::index_of(Config c) const {
  if (basis_.empty()) {
    if (c < full_size_) return static_cast<std::size_t>(c);
    return std::nullopt;
  }
  if (!bucket_start_.empty()) {
    const Config b = c / bucket_width_;
    if (b + 1 >= bucket_start_.size()) return std::nullopt;
    const auto first = basis_.begin() + bucket_start_[b], last = basis_.begin() + bucket_start_[b + 1];
    auto it = std::lower_bound(first, last, c);
    if (it == last || *it != c) return std::nullopt;
    return static_cast<std::size_t>(it - basis_.begin());
  }
  auto it = std::lower_bound(basis_.begin(), basis_.end(), c);
  if (it == basis_.end() || *it != c) return std::nullopt;
  return static_cast<std::size_t>(it - basis_.begin());
}

void SectorOperator::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != size() || out.size() != size())
    throw UsageError("vector length does not match sector size");
  switch (rep_) {
    case Representation::matrix_free:
      apply_matrix_free(in, out);
      return;
    case Representation::sparse:
      for (std::size_t r = 0; r < size(); ++r) {
        double acc = diagonal_[r] * in[r];
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) acc += vals_[p] * in[cols_[p]];
        out[r] = acc;
      }
      return;
    case Representation::dense: {
      Eigen::Map<const Eigen::VectorXd> x(in.data(), static_cast<Eigen::Index>(in.size()));
      Eigen::Map<Eigen::VectorXd> y(out.data(), static_cast<Eigen::Index>(out.size()));
      y.noalias() = dense_ * x;
      return;
    }
  }
}

std::vector<double> SectorOperator::apply(std::span<const double> in) const {
  std::vector<double> out(size());
  apply(in, out);
  return out;
}

void SectorOperator::apply_matrix_free(std::span<const double> in, std::span<double> out) const {
  const int q = space_.local_dim();
  const auto stride = space_.strides();
  for (std::size_t r = 0; r < size(); ++r) {
    double acc = diagonal_[r] * in[r];
    if (!diagonal_only_) {
      const Config c = config_at(r);
      Digits digits;
      space_.decode(c, digits);
      for (const auto& e : edges_) {
        const int a = digits[e.tail], b = digits[e.head];
        if (a == b) continue;
        const double coef = swap_coeff_[static_cast<std::size_t>(e.axis)][static_cast<std::size_t>(a * q + b)];
        if (coef == 0.0) continue;
        // c + (b - a) stride_tail + (a - b) stride_head, in unsigned arithmetic.
        const Config swapped = c - static_cast<Config>(a) * stride[e.tail] - static_cast<Config>(b) * stride[e.head] +
                               static_cast<Config>(b) * stride[e.tail] + static_cast<Config>(a) * stride[e.head];
        // Swapping two labels keeps the occupation numbers, so the target is in the sector.
        acc += coef * in[*index_of(swapped)];
      }
    }
    out[r] = acc;
  }
}

double SectorOperator::gershgorin_lower_bound() const {
  const int q = space_.local_dim();
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < size(); ++r) {
    double radius = 0.0;
    if (!diagonal_only_) {
      const Config c = config_at(r);
      Digits digits;
      space_.decode(c, digits);
      for (const auto& e : edges_) {
        const int a = digits[e.tail], b = digits[e.head];
        if (a != b) radius += std::abs(swap_coeff_[static_cast<std::size_t>(e.axis)][static_cast<std::size_t>(a * q + b)]);
      }
    }
    bound = std::min(bound, diagonal_[r] - radius);
  }
  return bound;
}

void SectorOperator::compile_sparse() {
  const int q = space_.local_dim();
  row_ptr_.assign(size() + 1, 0);
  cols_.clear();
  vals_.clear();
  std::vector<std::pair<std::uint32_t, double>> row;
  for (std::size_t r = 0; r < size(); ++r) {
    row.clear();
    if (!diagonal_only_) {
      const Config c = config_at(r);
      Digits digits;
      space_.decode(c, digits);
      for (const auto& e : edges_) {
        const int a = digits[e.tail], b = digits[e.head];
        if (a == b) continue;
        const double coef = swap_coeff_[static_cast<std::size_t>(e.axis)][static_cast<std::size_t>(a * q + b)];
        if (coef == 0.0) continue;
        const Config swapped = c - static_cast<Config>(a) * space_.stride(e.tail) -
                               static_cast<Config>(b) * space_.stride(e.head) +
                               static_cast<Config>(b) * space_.stride(e.tail) +
                               static_cast<Config>(a) * space_.stride(e.head);
        row.emplace_back(static_cast<std::uint32_t>(*index_of(swapped)), coef);
      }
      std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0 && row[i].first == row[i - 1].first) {
        vals_.back() += row[i].second;
      } else {
        cols_.push_back(row[i].first);
        vals_.push_back(row[i].second);
      }
    }
    row_ptr_[r + 1] = cols_.size();
  }
}

Eigen::MatrixXd SectorOperator::assemble_dense() const {
  if (size() > limits_.dense_cap)
    throw CapacityError("sector size " + std::to_string(size()) + " exceeds the dense cap " +
                        std::to_string(limits_.dense_cap));
  if (rep_ == Representation::dense && dense_.size() > 0) return dense_;
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const int q = space_.local_dim();
  for (std::size_t r = 0; r < size(); ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    m(ri, ri) = diagonal_[r];
    if (diagonal_only_) continue;
    const Config c = config_at(r);
    Digits digits;
    space_.decode(c, digits);
    for (const auto& e : edges_) {
      const int a = digits[e.tail], b = digits[e.head];
      if (a == b) continue;
      const double coef = swap_coeff_[static_cast<std::size_t>(e.axis)][static_cast<std::size_t>(a * q + b)];
      if (coef == 0.0) continue;
      const Config swapped = c - static_cast<Config>(a) * space_.stride(e.tail) -
                             static_cast<Config>(b) * space_.stride(e.head) +
                             static_cast<Config>(b) * space_.stride(e.tail) +
                             static_cast<Config>(a) * space_.stride(e.head);
      m(ri, static_cast<Eigen::Index>(*index_of(swapped))) += coef;
    }
  }
  return m;
}

SectorOperator SectorOperator::with_representation(Representation rep) const {
  SectorOperator copy = *this;
  if (copy.rep_ == rep) return copy;
  copy.rep_ = rep;
  copy.row_ptr_.clear();
  copy.cols_.clear();
  copy.vals_.clear();
  copy.dense_.resize(0, 0);
  if (rep == Representation::sparse) copy.compile_sparse();
  if (rep == Representation::dense) copy.dense_ = copy.assemble_dense();
  return copy;
}

namespace {

std::vector<TwoSiteOperator> interaction_terms(const AnisotropyModel& model) {
  std::vector<TwoSiteOperator> terms;
  for (int k = 0; k < model.dim(); ++k) terms.push_back(build_interaction(model, k));
  return terms;
}

void check_model_region(const Region& region, const AnisotropyModel& model) {
  if (region.dim() != model.dim()) throw UsageError("model and region dimensions differ");
}

}  // namespace

SectorOperator make_hamiltonian(const Region& region, const AnisotropyModel& model,
                                std::optional<Sector> sector, Representation rep,
                                OperatorLimits limits) {
  check_model_region(region, model);
  return SectorOperator(region, interaction_terms(model), model.species(), std::move(sector), rep, limits);
}

SectorOperator make_reference_hamiltonian(const Region& region, int species,
                                          std::optional<Sector> sector, Representation rep,
                                          OperatorLimits limits) {
  std::vector<TwoSiteOperator> terms(static_cast<std::size_t>(region.dim()),
                                     build_reference_interaction(species));
  return SectorOperator(region, std::move(terms), species, std::move(sector), rep, limits);
}

SectorOperator make_perturbation(const Region& region, const AnisotropyModel& model,
                                 std::optional<Sector> sector, Representation rep,
                                 OperatorLimits limits) {
  check_model_region(region, model);
  auto terms = interaction_terms(model);
  const TwoSiteOperator ref = build_reference_interaction(model.species());
  for (auto& t : terms) t -= ref;
  return SectorOperator(region, std::move(terms), model.species(), std::move(sector), rep, limits);
}

SparseOperator embed_edge_term(const Region& region, const Edge& edge, const TwoSiteOperator& h,
                               int species) {
  const StateSpace space(region.num_sites(), species);
  const int q = space.local_dim();
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  const std::uint64_t st = space.stride(edge.tail), sh = space.stride(edge.head);
  std::vector<Eigen::Triplet<double>> trip;
  for (Config c = 0; c < space.dimension(); ++c) {
    const int a = space.state(c, edge.tail), b = space.state(c, edge.head);
    const Config base = c - static_cast<Config>(a) * st - static_cast<Config>(b) * sh;
    for (int x = 0; x < q; ++x) {
      for (int y = 0; y < q; ++y) {
        const double v = h(x * q + y, a * q + b);
        if (v == 0.0) continue;
        const Config target = base + static_cast<Config>(x) * st + static_cast<Config>(y) * sh;
        trip.emplace_back(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(c), v);
      }
    }
  }
  SparseOperator m(dim, dim);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SquareDecomposition build_QR(const Region& region, const AnisotropyModel& model, OperatorLimits limits) {
  check_model_region(region, model);
  const StateSpace space(region.num_sites(), model.species());
  if (space.dimension() > limits.dense_cap)
    throw CapacityError("Q/R assembly needs (n+1)^|V| <= dense cap");
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  const auto terms = interaction_terms(model);
  std::vector<SparseOperator> h;
  for (const auto& e : region.edges())
    h.push_back(embed_edge_term(region, e, terms[static_cast<std::size_t>(e.axis)], model.species()));

  SquareDecomposition out{SparseOperator(dim, dim), SparseOperator(dim, dim), SparseOperator(dim, dim)};
  for (const auto& t : h) out.H += t;
  const auto& edges = region.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      const bool adjacent = edges[i].tail == edges[j].tail || edges[i].tail == edges[j].head ||
                            edges[i].head == edges[j].tail || edges[i].head == edges[j].head;
      SparseOperator prod = h[i] * h[j];
      SparseOperator anti = prod + SparseOperator(prod.transpose());
      if (adjacent) out.Q += anti;
      else out.R += anti;
    }
  }
  return out;
}

double symmetric_norm_bound(const SparseOperator& m) {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(m.rows());
  Eigen::VectorXd col_sums = Eigen::VectorXd::Zero(m.cols());
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(m, k); it; ++it) {
      row_sums(it.row()) += std::abs(it.value());
      col_sums(it.col()) += std::abs(it.value());
    }
  }
  const double r = row_sums.size() ? row_sums.maxCoeff() : 0.0;
  const double c = col_sums.size() ? col_sums.maxCoeff() : 0.0;
  return std::sqrt(r * c);
}

}  // namespace pvbs
