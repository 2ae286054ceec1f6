#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "gaam/core.hpp"
#include "gaam/params.hpp"

namespace gaam {

// Periodic-grid geometry plus a deterministic enumeration of the retained
// (dealiased, half-spectrum) Fourier modes of real vector fields.
//
// Integer modes n with |n_i| <= max_index() are retained, where max_index is
// the largest K with 3K < modes_per_axis, so quadratic products evaluated on
// the collocation grid are alias-free on every retained mode.  One
// representative per conjugate pair {n, -n} is stored; the representative has
// its first nonzero component positive.  Modes are ordered by ascending |n|^2
// with lexicographic (nx, ny, nz) tie-break, which fixes the basis used by
// the weak distance and the checkpoint payload order.
template <typename Scalar>
class SpectralGrid {
 public:
  SpectralGrid(int dim, int modes_per_axis, Scalar box_length)
      : dim_(dim), n_(modes_per_axis), length_(box_length) {
    if (dim != 2 && dim != 3) throw ConfigError("grid: dim must be 2 or 3");
    if (n_ < 8 || n_ % 2 != 0)
      throw ConfigError("grid: modes_per_axis must be even and >= 8");
    if (!(length_ > 0)) throw ConfigError("grid: box_length must be > 0");
    kmax_index_ = (n_ - 1) / 3;
    build_modes();
  }

  static std::shared_ptr<const SpectralGrid> make(const ModelParams<Scalar>& p) {
    return std::make_shared<const SpectralGrid>(p.dim, p.modes_per_axis,
                                                p.box_length);
  }

  int dim() const { return dim_; }
  int modes_per_axis() const { return n_; }
  Scalar box_length() const { return length_; }
  int max_index() const { return kmax_index_; }
  Eigen::Index n_modes() const { return static_cast<Eigen::Index>(modes_.size()); }
  std::int64_t n_points() const {
    std::int64_t p = 1;
    for (int i = 0; i < dim_; ++i) p *= n_;
    return p;
  }
  Scalar cell_volume() const { return std::pow(length_ / Scalar(n_), Scalar(dim_)); }
  Scalar box_volume() const { return std::pow(length_, Scalar(dim_)); }
  // Base wavenumber 2 pi / L.
  Scalar k0() const { return two_pi<Scalar>() / length_; }
  // Largest retained |k| along one axis.
  Scalar k_max() const { return k0() * Scalar(kmax_index_); }

  const std::array<int, 3>& mode(Eigen::Index m) const { return modes_[m]; }
  // Physical squared wavenumber |k|^2 for each retained mode.
  const RealArray<Scalar>& k_sq() const { return k_sq_; }
  // Conjugate-pair multiplicity: 1 for the zero mode, 2 otherwise.
  const RealArray<Scalar>& multiplicity() const { return mult_; }
  Scalar k_component(Eigen::Index m, int axis) const {
    return k0() * Scalar(modes_[m][axis]);
  }
  std::int64_t flat_plus(Eigen::Index m) const { return flat_plus_[m]; }
  std::int64_t flat_minus(Eigen::Index m) const { return flat_minus_[m]; }
  bool self_conjugate(Eigen::Index m) const { return m == 0; }

  bool compatible(const SpectralGrid& other) const {
    return dim_ == other.dim_ && n_ == other.n_ && length_ == other.length_;
  }

 private:
  void build_modes() {
    const int k = kmax_index_;
    std::vector<std::array<int, 3>> reps;
    std::array<int, 3> n{0, 0, 0};
    const int zlo = dim_ == 3 ? -k : 0;
    const int zhi = dim_ == 3 ? k : 0;
    for (int nz = zlo; nz <= zhi; ++nz)
      for (int ny = -k; ny <= k; ++ny)
        for (int nx = -k; nx <= k; ++nx) {
          n = {nx, ny, nz};
          if (!is_representative(n)) continue;
          reps.push_back(n);
        }
    std::sort(reps.begin(), reps.end(),
              [](const std::array<int, 3>& p, const std::array<int, 3>& q) {
                const long np = norm2(p), nq = norm2(q);
                if (np != nq) return np < nq;
                return p < q;
              });
    modes_ = std::move(reps);

    const Eigen::Index m = n_modes();
    k_sq_.resize(m);
    mult_.resize(m);
    flat_plus_.resize(m);
    flat_minus_.resize(m);
    const Scalar kk = k0();
    for (Eigen::Index i = 0; i < m; ++i) {
      k_sq_[i] = kk * kk * Scalar(norm2(modes_[i]));
      mult_[i] = (i == 0) ? Scalar(1) : Scalar(2);
      flat_plus_[i] = flat_index(modes_[i], +1);
      flat_minus_[i] = flat_index(modes_[i], -1);
    }
  }

  static long norm2(const std::array<int, 3>& n) {
    return long(n[0]) * n[0] + long(n[1]) * n[1] + long(n[2]) * n[2];
  }

  static bool is_representative(const std::array<int, 3>& n) {
    for (int i = 0; i < 3; ++i) {
      if (n[i] > 0) return true;
      if (n[i] < 0) return false;
    }
    return true;  // zero mode
  }

  std::int64_t flat_index(const std::array<int, 3>& n, int sign) const {
    std::int64_t flat = 0;
    for (int ax = dim_ - 1; ax >= 0; --ax) {
      int v = sign * n[ax];
      if (v < 0) v += n_;
      flat = flat * n_ + v;
    }
    return flat;
  }

  int dim_;
  int n_;
  Scalar length_;
  int kmax_index_;
  std::vector<std::array<int, 3>> modes_;
  RealArray<Scalar> k_sq_;
  RealArray<Scalar> mult_;
  std::vector<std::int64_t> flat_plus_;
  std::vector<std::int64_t> flat_minus_;
};

template <typename Scalar>
using GridPtr = std::shared_ptr<const SpectralGrid<Scalar>>;

}  // namespace gaam
