#pragma once

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dpl/error.hpp"
#include "dpl/state.hpp"
#include "json.hpp"

namespace dpl::io {

using nlohmann::json;

inline constexpr char kMagic[5] = {'D', 'P', 'S', 'T', '1'};
inline constexpr int kFormatVersion = 1;

struct StateFile {
  PhotonState state;
  json header;  // as read from disk
};

inline std::uint32_t crc32_of(const std::string& bytes) {
  uLong c = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for large payloads
  std::size_t off = 0;
  while (off < bytes.size()) {
    const std::size_t len = std::min<std::size_t>(bytes.size() - off, 1u << 30);
    c = ::crc32(c, reinterpret_cast<const Bytef*>(bytes.data() + off), uInt(len));
    off += len;
  }
  return std::uint32_t(c);
}

namespace detail {

inline void put_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_u64_le(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(p[i])) << (8 * i);
  return v;
}

inline void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32_le(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(p[i])) << (8 * i);
  return v;
}

}  // namespace detail

/// Payload: (re, im) as little-endian f64 for 6 components per bin, bins in storage order.
inline std::string encode_payload(const Field6C& psi) {
  std::string out;
  out.reserve(psi.size() * 6 * 16);
  for (const auto& v : psi.values)
    for (const auto& z : v) {
      detail::put_u64_le(out, std::bit_cast<std::uint64_t>(z.real()));
      detail::put_u64_le(out, std::bit_cast<std::uint64_t>(z.imag()));
    }
  return out;
}

inline json units_json(const Units& u) { return {{"hbar", u.hbar}, {"eps0", u.eps0}, {"mu0", u.mu0}}; }

inline json state_header(const PhotonState& s, const std::string& payload, const json& metadata) {
  return {{"format_version", kFormatVersion},
          {"grid", {{"n", s.grid().n()}, {"dk", s.grid().dk()}}},
          {"time", s.time()},
          {"norm", s.norm},
          {"rqc_residual", s.rqc_residual},
          {"energy_sign", s.energy_sign},
          {"scale_factor", s.scale_factor},
          {"units", units_json(s.units)},
          {"payload_bytes", payload.size()},
          {"crc32", crc32_of(payload)},
          {"metadata", metadata.is_null() ? json::object() : metadata}};
}

inline std::string encode_state(const PhotonState& s, const json& metadata = json::object()) {
  const std::string payload = encode_payload(s.psi);
  const std::string header = state_header(s, payload, metadata).dump();
  std::string out(kMagic, kMagic + 5);
  detail::put_u32_le(out, std::uint32_t(header.size()));
  out += header;
  out += payload;
  return out;
}

/// Writes to a temporary sibling and renames it over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f.write(bytes.data(), std::streamsize(bytes.size()));
    f.flush();
    if (!f) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void write_state(const std::filesystem::path& path, const PhotonState& s,
                        const json& metadata = json::object()) {
  write_file_atomic(path, encode_state(s, metadata));
}

inline StateFile decode_state(const std::string& bytes) {
  if (bytes.size() < 9 || std::memcmp(bytes.data(), kMagic, 5) != 0) throw IntegrityError("bad magic: not a state file");
  const std::uint32_t hlen = detail::get_u32_le(bytes.data() + 5);
  if (std::size_t(hlen) > bytes.size() - 9) throw IntegrityError("truncated header");
  json h;
  try {
    h = json::parse(bytes.begin() + 9, bytes.begin() + 9 + hlen);
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("unreadable header: ") + e.what());
  }
  StateFile sf;
  sf.header = h;
  int n;
  double dk;
  std::uint64_t plen;
  std::uint32_t crc;
  try {
    if (h.at("format_version").get<int>() != kFormatVersion) throw IntegrityError("unsupported format version");
    n = h.at("grid").at("n").get<int>();
    dk = h.at("grid").at("dk").get<double>();
    plen = h.at("payload_bytes").get<std::uint64_t>();
    crc = h.at("crc32").get<std::uint32_t>();
    sf.state.units = {h.at("units").at("hbar").get<double>(), h.at("units").at("eps0").get<double>(),
                      h.at("units").at("mu0").get<double>()};
    sf.state.energy_sign = h.at("energy_sign").get<int>();
    sf.state.scale_factor = h.at("scale_factor").get<double>();
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("malformed header: ") + e.what());
  }
  KGrid g;
  try {
    g = KGrid(n, dk);
  } catch (const DomainError& e) {
    throw IntegrityError(std::string("invalid grid in header: ") + e.what());
  }
  const std::uint64_t expect = std::uint64_t(g.size()) * 6 * 2 * 8;
  const std::size_t off = 9 + hlen;
  if (plen != expect || bytes.size() - off != expect)
    throw IntegrityError("payload length mismatch: expected " + std::to_string(expect) + " bytes, found " +
                         std::to_string(bytes.size() - off));
  const std::string payload = bytes.substr(off);
  if (crc32_of(payload) != crc) throw IntegrityError("payload checksum mismatch");

  Field6C psi(g, Representation::momentum, h.at("time").get<double>());
  const char* p = payload.data();
  for (auto& v : psi.values)
    for (auto& z : v) {
      const double re = std::bit_cast<double>(detail::get_u64_le(p));
      const double im = std::bit_cast<double>(detail::get_u64_le(p + 8));
      z = {re, im};
      p += 16;
    }
  PhotonState s = make_state(std::move(psi), sf.state.units, sf.state.scale_factor);
  s.energy_sign = sf.state.energy_sign;
  sf.state = std::move(s);
  return sf;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IntegrityError("cannot open " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

inline StateFile read_state(const std::filesystem::path& path) { return decode_state(read_file(path)); }

}  // namespace dpl::io
