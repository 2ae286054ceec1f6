#pragma once

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "gaam/field.hpp"
#include "gaam/norms.hpp"

namespace gaam {

// Binary state snapshot.  Layout (little-endian):
//   magic "GAAM1", version byte 0x01,
//   u32 dim, u32 modes_per_axis,
//   f64 box_length, alpha, beta, gamma, delta, nu, time,
//   payload: per component, per mode in enumeration order, (re, im) f64.
// The fixed mode enumeration makes read(write(x)) bit-exact, which the
// restart tests rely on.
struct CheckpointHeader {
  static constexpr char magic[5] = {'G', 'A', 'A', 'M', '1'};
  static constexpr unsigned char version = 1;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) out.push_back(char((bits >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32(const std::string& in, std::size_t& pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= std::uint32_t(static_cast<unsigned char>(in.at(pos++))) << (8 * i);
  return v;
}

inline double get_f64(const std::string& in, std::size_t& pos) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= std::uint64_t(static_cast<unsigned char>(in.at(pos++))) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace detail

template <typename Scalar>
struct CheckpointData {
  ModelParams<Scalar> params;
  Scalar time = 0;
  VectorField<Scalar> field;
};

template <typename Scalar>
std::string encode_checkpoint(const VectorField<Scalar>& u,
                              const ModelParams<Scalar>& p, Scalar time) {
  std::string out;
  out.append(CheckpointHeader::magic, 5);
  out.push_back(char(CheckpointHeader::version));
  detail::put_u32(out, std::uint32_t(p.dim));
  detail::put_u32(out, std::uint32_t(p.modes_per_axis));
  detail::put_f64(out, double(p.box_length));
  detail::put_f64(out, double(p.alpha));
  detail::put_f64(out, double(p.beta));
  detail::put_f64(out, double(p.gamma));
  detail::put_f64(out, double(p.delta));
  detail::put_f64(out, double(p.nu));
  detail::put_f64(out, double(time));
  for (int j = 0; j < u.dim(); ++j)
    for (Eigen::Index m = 0; m < u.n_modes(); ++m) {
      detail::put_f64(out, double(u.coef(m, j).real()));
      detail::put_f64(out, double(u.coef(m, j).imag()));
    }
  return out;
}

template <typename Scalar>
CheckpointData<Scalar> decode_checkpoint(const std::string& in) {
  if (in.size() < 6 || std::memcmp(in.data(), CheckpointHeader::magic, 5) != 0)
    throw Error("checkpoint: bad magic");
  if (static_cast<unsigned char>(in[5]) != CheckpointHeader::version)
    throw Error("checkpoint: unsupported version");
  std::size_t pos = 6;
  CheckpointData<Scalar> data;
  auto& p = data.params;
  p.dim = int(detail::get_u32(in, pos));
  p.modes_per_axis = int(detail::get_u32(in, pos));
  p.box_length = Scalar(detail::get_f64(in, pos));
  p.alpha = Scalar(detail::get_f64(in, pos));
  p.beta = Scalar(detail::get_f64(in, pos));
  p.gamma = Scalar(detail::get_f64(in, pos));
  p.delta = Scalar(detail::get_f64(in, pos));
  p.nu = Scalar(detail::get_f64(in, pos));
  data.time = Scalar(detail::get_f64(in, pos));
  p.validate();

  auto grid = SpectralGrid<Scalar>::make(p);
  data.field = VectorField<Scalar>(grid);
  const std::size_t expect =
      pos + std::size_t(grid->n_modes()) * std::size_t(p.dim) * 16;
  if (in.size() != expect) throw Error("checkpoint: truncated or oversized payload");
  for (int j = 0; j < p.dim; ++j)
    for (Eigen::Index m = 0; m < grid->n_modes(); ++m) {
      const double re = detail::get_f64(in, pos);
      const double im = detail::get_f64(in, pos);
      data.field.coef(m, j) = std::complex<Scalar>(Scalar(re), Scalar(im));
    }
  // Re-derive the divergence-free certificate instead of trusting the file.
  const Scalar l2 = std::sqrt(sobolev_norm_sq(data.field, Scalar(0)));
  data.field.divergence_free =
      max_divergence(data.field) <= Scalar(1e-10) * std::max(l2, Scalar(1e-300));
  return data;
}

template <typename Scalar>
void write_checkpoint(const std::string& path, const VectorField<Scalar>& u,
                      const ModelParams<Scalar>& p, Scalar time) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("checkpoint: cannot open for writing: " + path);
  const std::string bytes = encode_checkpoint(u, p, time);
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw Error("checkpoint: write failed: " + path);
}

template <typename Scalar>
CheckpointData<Scalar> read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checkpoint: cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return decode_checkpoint<Scalar>(bytes);
}

}  // namespace gaam
