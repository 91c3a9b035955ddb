// Output plumbing: deterministic CSV formatting, observable-series emission,
// and the fixed-width binary snapshot of joint (sigma, omega) pairs.
//
// Snapshot layout (little-endian):
//   bytes 0-7   magic "ISGSNP01"
//   i32 N, i32 k, i32 eps, f64 beta, u64 seed
//   u32 n_sites, u32 n_bonds
//   sigma bits packed LSB-first (ceil(n_sites/8) bytes), bit = 1 <=> +1
//   omega bits packed LSB-first (ceil(n_bonds/8) bytes), bit = 1 <=> open

#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fk.hpp"
#include "ising.hpp"

namespace isinggap {

// Shortest round-trip-exact decimal formatting.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = 0;
  std::sscanf(buf, "%lf", &back);
  if (back == v) {
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[40];
      std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
      std::sscanf(shorter, "%lf", &back);
      if (back == v) return shorter;
    }
  }
  return buf;
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

inline void write_series_csv(std::ostream& os, const ChainResult& r,
                             const std::vector<std::string>& extra_names) {
  std::vector<std::string> head{"sweep", "energy", "magnetization"};
  head.insert(head.end(), extra_names.begin(), extra_names.end());
  write_csv_row(os, head);
  for (const auto& row : r.series) {
    std::vector<std::string> cells{std::to_string(row.sweep), fmt_double(row.energy),
                                   fmt_double(row.magnetization)};
    for (double v : row.extra) cells.push_back(fmt_double(v));
    write_csv_row(os, cells);
  }
}

struct Snapshot {
  std::int32_t N = 0;
  std::int32_t k = 0;
  std::int32_t eps = 0;
  double beta = 0;
  std::uint64_t seed = 0;
  SpinConfig sigma;
  BondConfig omega;
};

namespace detail {

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

inline std::vector<std::uint8_t> pack_bits(const std::vector<std::int8_t>& s) {
  std::vector<std::uint8_t> out((s.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] > 0) out[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  return out;
}
inline std::vector<std::uint8_t> pack_bits(const std::vector<std::uint8_t>& s) {
  std::vector<std::uint8_t> out((s.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i]) out[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  return out;
}

}  // namespace detail

inline void write_snapshot(std::ostream& os, const Snapshot& snap) {
  os.write("ISGSNP01", 8);
  detail::put(os, snap.N);
  detail::put(os, snap.k);
  detail::put(os, snap.eps);
  detail::put(os, snap.beta);
  detail::put(os, snap.seed);
  detail::put(os, static_cast<std::uint32_t>(snap.sigma.s.size()));
  detail::put(os, static_cast<std::uint32_t>(snap.omega.open.size()));
  auto sb = detail::pack_bits(snap.sigma.s);
  auto ob = detail::pack_bits(snap.omega.open);
  os.write(reinterpret_cast<const char*>(sb.data()), static_cast<std::streamsize>(sb.size()));
  os.write(reinterpret_cast<const char*>(ob.data()), static_cast<std::streamsize>(ob.size()));
}

inline Snapshot read_snapshot(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "ISGSNP01", 8) != 0)
    throw std::runtime_error("read_snapshot: bad magic");
  Snapshot snap;
  snap.N = detail::get<std::int32_t>(is);
  snap.k = detail::get<std::int32_t>(is);
  snap.eps = detail::get<std::int32_t>(is);
  snap.beta = detail::get<double>(is);
  snap.seed = detail::get<std::uint64_t>(is);
  const auto ns = detail::get<std::uint32_t>(is);
  const auto nb = detail::get<std::uint32_t>(is);
  std::vector<std::uint8_t> sb((ns + 7) / 8), ob((nb + 7) / 8);
  is.read(reinterpret_cast<char*>(sb.data()), static_cast<std::streamsize>(sb.size()));
  is.read(reinterpret_cast<char*>(ob.data()), static_cast<std::streamsize>(ob.size()));
  if (!is) throw std::runtime_error("read_snapshot: truncated");
  snap.sigma.s.resize(ns);
  for (std::uint32_t i = 0; i < ns; ++i)
    snap.sigma.s[i] = (sb[i / 8] >> (i % 8)) & 1 ? 1 : -1;
  snap.omega.open.resize(nb);
  for (std::uint32_t i = 0; i < nb; ++i)
    snap.omega.open[i] = (ob[i / 8] >> (i % 8)) & 1;
  return snap;
}

}  // namespace isinggap
