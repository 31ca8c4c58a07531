// SPDX-License-Identifier: Apache-2.0
#include "spinqpu/spin_system.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <string>

namespace spinqpu::spin {

namespace {

Mat identity(int d) { return Mat::Identity(d, d); }

Mat kron(const Mat& a, const Mat& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

// op embedded at position `index` of a factor list with dimensions dims.
Mat kron_at(const Mat& op, int index, const std::vector<int>& dims) {
  Mat out = Mat::Identity(1, 1);
  for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
    if (k == index)
      out = kron(out, op);
    else
      out = kron(out, identity(dims[k]));
  }
  return out;
}

// Electronic and nuclear operators of one site in its local
// (2S+1)(2I+1)-dimensional space.
struct SiteOperators {
  Mat sx, sy, sz;           // electronic
  Mat ix, iy, iz;           // nuclear (empty if no nuclear spin)
  bool has_nuclear = false;
};

SiteOperators site_operators(const SpinSite& site) {
  SiteOperators ops;
  const SpinOperators s = spin_operators(site.spin);
  if (site.nuclear) {
    const SpinOperators i = spin_operators(site.nuclear->spin);
    const Mat es = identity(s.dim), en = identity(i.dim);
    ops.sx = kron(s.sx, en);
    ops.sy = kron(s.sy, en);
    ops.sz = kron(s.sz, en);
    ops.ix = kron(es, i.sx);
    ops.iy = kron(es, i.sy);
    ops.iz = kron(es, i.sz);
    ops.has_nuclear = true;
  } else {
    ops.sx = s.sx;
    ops.sy = s.sy;
    ops.sz = s.sz;
  }
  return ops;
}

std::vector<int> site_dimensions(const SpinSystemSpec& spec) {
  std::vector<int> dims;
  dims.reserve(spec.sites.size());
  for (const auto& site : spec.sites) dims.push_back(site.dimension());
  return dims;
}

}  // namespace

SpinOperators spin_operators(double s) {
  if (!is_half_integer(s))
    throw ValidationError(kModule, "spin must be a nonnegative half-integer, got " +
                                       std::to_string(s));
  const int d = static_cast<int>(std::lround(2.0 * s)) + 1;
  SpinOperators ops;
  ops.dim = d;
  ops.sz = Mat::Zero(d, d);
  ops.sp = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double m = s - k;  // descending order
    ops.sz(k, k) = m;
    // S+ |m> = sqrt(S(S+1) - m(m+1)) |m+1>; |m+1> has row index k-1.
    if (k > 0) {
      const double mm = s - k;
      ops.sp(k - 1, k) = std::sqrt(s * (s + 1.0) - mm * (mm + 1.0));
    }
  }
  ops.sm = ops.sp.adjoint();
  ops.sx = 0.5 * (ops.sp + ops.sm);
  ops.sy = Complex(0.0, -0.5) * (ops.sp - ops.sm);
  return ops;
}

int SpinSite::dimension() const {
  const int ds = static_cast<int>(std::lround(2.0 * spin)) + 1;
  const int di = nuclear ? static_cast<int>(std::lround(2.0 * nuclear->spin)) + 1 : 1;
  return ds * di;
}

void SpinSite::validate(int site_index) const {
  const std::string where = "site " + std::to_string(site_index) + ": ";
  if (!is_half_integer(spin) || spin < 0.5)
    throw ValidationError(kModule, where + "spin must be a half-integer >= 1/2");
  if (d_ghz != 0.0 && e_ghz != 0.0 && std::abs(e_ghz) > std::abs(d_ghz) / 3.0 + 1e-15)
    throw ValidationError(kModule, where + "rhombicity out of range: |E| > |D|/3");
  if (nuclear) {
    if (!is_half_integer(nuclear->spin) || nuclear->spin < 0.5)
      throw ValidationError(kModule, where + "nuclear spin must be a half-integer >= 1/2");
  }
}

long SpinSystemSpec::dimension() const {
  long d = 1;
  for (const auto& site : sites) d *= site.dimension();
  return d;
}

void SpinSystemSpec::validate() const {
  if (sites.empty()) throw ValidationError(kModule, "spec has no sites");
  for (int k = 0; k < static_cast<int>(sites.size()); ++k) sites[k].validate(k);
  const int n = static_cast<int>(sites.size());
  for (const auto& c : couplings) {
    if (c.site_i < 0 || c.site_i >= n || c.site_j < 0 || c.site_j >= n)
      throw ValidationError(kModule, "coupling site index out of range");
    if (c.site_i == c.site_j)
      throw ValidationError(kModule, "coupling connects a site to itself");
  }
  if (dimension() > kMaxDimension)
    throw ContractError(kModule, "Hilbert dimension " + std::to_string(dimension()) +
                                     " exceeds cap " + std::to_string(kMaxDimension));
}

Mat build_hamiltonian(const SpinSystemSpec& spec) {
  spec.validate();
  const auto dims = site_dimensions(spec);
  const long dim = spec.dimension();
  Mat h = Mat::Zero(dim, dim);

  std::vector<SiteOperators> per_site;
  per_site.reserve(spec.sites.size());
  for (const auto& site : spec.sites) per_site.push_back(site_operators(site));

  for (int k = 0; k < static_cast<int>(spec.sites.size()); ++k) {
    const SpinSite& site = spec.sites[k];
    const SiteOperators& ops = per_site[k];
    const int d = dims[k];
    Mat local = Mat::Zero(d, d);
    // Zeeman, diagonal g tensor.
    local += kGhzPerTesla * (site.g[0] * spec.field_tesla[0] * ops.sx +
                             site.g[1] * spec.field_tesla[1] * ops.sy +
                             site.g[2] * spec.field_tesla[2] * ops.sz);
    if (site.d_ghz != 0.0) local += site.d_ghz * (ops.sz * ops.sz);
    if (site.e_ghz != 0.0)
      local += site.e_ghz * (ops.sx * ops.sx - ops.sy * ops.sy);
    if (ops.has_nuclear) {
      const NuclearSpin& nuc = *site.nuclear;
      if (nuc.a_ghz != 0.0)
        local += nuc.a_ghz * (ops.sx * ops.ix + ops.sy * ops.iy + ops.sz * ops.iz);
      if (nuc.p_ghz != 0.0) local += nuc.p_ghz * (ops.iz * ops.iz);
    }
    h += kron_at(local, k, dims);
  }

  for (const auto& c : spec.couplings) {
    if (c.j_ghz == 0.0) continue;
    const SiteOperators& a = per_site[c.site_i];
    const SiteOperators& b = per_site[c.site_j];
    h += c.j_ghz * (kron_at(a.sx, c.site_i, dims) * kron_at(b.sx, c.site_j, dims) +
                    kron_at(a.sy, c.site_i, dims) * kron_at(b.sy, c.site_j, dims) +
                    kron_at(a.sz, c.site_i, dims) * kron_at(b.sz, c.site_j, dims));
  }

  require_hermitian(h, kModule);
  return h;
}

Mat embed_operator(const Mat& op, int site_index, const SpinSystemSpec& spec) {
  spec.validate();
  if (site_index < 0 || site_index >= static_cast<int>(spec.sites.size()))
    throw ValidationError(kModule, "embed_operator: site index out of range");
  const auto dims = site_dimensions(spec);
  if (op.rows() != dims[site_index] || op.cols() != dims[site_index])
    throw ValidationError(kModule, "embed_operator: operator dimension " +
                                       std::to_string(op.rows()) +
                                       " does not match site dimension " +
                                       std::to_string(dims[site_index]));
  return kron_at(op, site_index, dims);
}

namespace {

Mat total_component(const SpinSystemSpec& spec, int axis) {
  const auto dims = site_dimensions(spec);
  const long dim = spec.dimension();
  Mat out = Mat::Zero(dim, dim);
  for (int k = 0; k < static_cast<int>(spec.sites.size()); ++k) {
    const SiteOperators ops = site_operators(spec.sites[k]);
    const Mat& s = axis == 0 ? ops.sx : ops.sz;
    out += kron_at(s, k, dims);
    if (ops.has_nuclear) out += kron_at(axis == 0 ? ops.ix : ops.iz, k, dims);
  }
  return out;
}

}  // namespace

Mat total_sz(const SpinSystemSpec& spec) { return total_component(spec, 2); }
Mat total_sx(const SpinSystemSpec& spec) { return total_component(spec, 0); }

EigenSystem diagonalize(const Mat& hamiltonian) {
  require_hermitian(hamiltonian, kModule);
  Eigen::SelfAdjointEigenSolver<Mat> solver(hamiltonian);
  if (solver.info() != Eigen::Success)
    throw ContractError(kModule, "eigendecomposition failed to converge");
  EigenSystem eig;
  eig.energies_ghz = solver.eigenvalues();
  eig.states = solver.eigenvectors();
  eig.sz_labels = RealVec::Zero(eig.energies_ghz.size());
  return eig;
}

EigenSystem diagonalize(const Mat& hamiltonian, const Mat& sz_total) {
  EigenSystem eig = diagonalize(hamiltonian);
  const int n = eig.dim();
  constexpr double kClusterTol = 1e-9;

  // Resolve each degenerate cluster deterministically: sub-diagonalize Sz
  // within the cluster and order by descending <Sz>.
  int start = 0;
  while (start < n) {
    int stop = start + 1;
    while (stop < n &&
           eig.energies_ghz[stop] - eig.energies_ghz[stop - 1] <= kClusterTol)
      ++stop;
    const int width = stop - start;
    if (width > 1) {
      const Mat block = eig.states.middleCols(start, width);
      const Mat sz_block = block.adjoint() * sz_total * block;
      Eigen::SelfAdjointEigenSolver<Mat> sub(0.5 * (sz_block + sz_block.adjoint()));
      // Ascending from the solver; reverse for descending <Sz>.
      Mat rotated = block * sub.eigenvectors();
      for (int c = 0; c < width; ++c)
        eig.states.col(start + c) = rotated.col(width - 1 - c);
    }
    start = stop;
  }

  // Deterministic column phases: largest-|.| component real positive.
  for (int c = 0; c < n; ++c) {
    int imax = 0;
    double best = 0.0;
    for (int r = 0; r < n; ++r) {
      const double a = std::abs(eig.states(r, c));
      if (a > best + 1e-15) {
        best = a;
        imax = r;
      }
    }
    const Complex z = eig.states(imax, c);
    if (std::abs(z) > 0.0) eig.states.col(c) *= std::conj(z) / std::abs(z);
  }

  for (int c = 0; c < n; ++c)
    eig.sz_labels[c] =
        (eig.states.col(c).adjoint() * sz_total * eig.states.col(c))(0, 0).real();
  return eig;
}

EigenSystem system_eigensystem(const SpinSystemSpec& spec) {
  return diagonalize(build_hamiltonian(spec), total_sz(spec));
}

}  // namespace spinqpu::spin
