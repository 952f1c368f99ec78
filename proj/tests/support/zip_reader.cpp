#include "zip_reader.hpp"

#include <stdexcept>

#include <zlib.h>

namespace forge::testing {

namespace {

std::uint16_t u16(std::string_view b, std::size_t at) {
  if (at + 2 > b.size()) throw std::runtime_error("zip: truncated");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) | static_cast<unsigned char>(b[at + 1]) << 8);
}

std::uint32_t u32(std::string_view b, std::size_t at) {
  return static_cast<std::uint32_t>(u16(b, at)) | static_cast<std::uint32_t>(u16(b, at + 2)) << 16;
}

std::string inflate_raw(std::string_view packed, std::size_t expected) {
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw std::runtime_error("zip: inflateInit2");
  std::string out(expected, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(packed.data()));
  zs.avail_in = static_cast<uInt>(packed.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) throw std::runtime_error("zip: inflate did not reach stream end");
  if (produced != expected) throw std::runtime_error("zip: inflated size mismatch");
  return out;
}

}  // namespace

std::vector<ZipEntry> read_zip(std::string_view b) {
  if (b.size() < 22) throw std::runtime_error("zip: too short");
  std::size_t eocd = b.size() - 22;
  while (u32(b, eocd) != 0x06054b50) {
    if (eocd == 0) throw std::runtime_error("zip: no end of central directory");
    --eocd;
  }
  const std::uint16_t disk_entries = u16(b, eocd + 8);
  const std::uint16_t total = u16(b, eocd + 10);
  const std::uint32_t cd_size = u32(b, eocd + 12);
  const std::uint32_t cd_offset = u32(b, eocd + 16);
  if (disk_entries != total) throw std::runtime_error("zip: multi-disk archive");
  if (static_cast<std::size_t>(cd_offset) + cd_size != eocd) throw std::runtime_error("zip: directory bounds");

  std::vector<ZipEntry> out;
  std::size_t at = cd_offset;
  for (std::uint16_t i = 0; i < total; ++i) {
    if (u32(b, at) != 0x02014b50) throw std::runtime_error("zip: bad central header");
    ZipEntry e;
    e.version_needed = u16(b, at + 6);
    e.flags = u16(b, at + 8);
    e.method = u16(b, at + 10);
    e.time = u16(b, at + 12);
    e.date = u16(b, at + 14);
    e.crc = u32(b, at + 16);
    const std::uint32_t csize = u32(b, at + 20);
    const std::uint32_t usize = u32(b, at + 24);
    const std::uint16_t name_len = u16(b, at + 28);
    e.extra_length = u16(b, at + 30);
    const std::uint16_t comment_len = u16(b, at + 32);
    e.external_attributes = u32(b, at + 38);
    const std::uint32_t local = u32(b, at + 42);
    e.name = std::string(b.substr(at + 46, name_len));
    at += 46 + name_len + e.extra_length + comment_len;

    if (u32(b, local) != 0x04034b50) throw std::runtime_error("zip: bad local header");
    if (u16(b, local + 4) != e.version_needed || u16(b, local + 6) != e.flags || u16(b, local + 8) != e.method ||
        u16(b, local + 10) != e.time || u16(b, local + 12) != e.date || u32(b, local + 14) != e.crc ||
        u32(b, local + 18) != csize || u32(b, local + 22) != usize) {
      throw std::runtime_error("zip: local header disagrees with directory for " + e.name);
    }
    const std::uint16_t lname = u16(b, local + 26);
    const std::uint16_t lextra = u16(b, local + 28);
    if (b.substr(local + 30, lname) != e.name) throw std::runtime_error("zip: local name mismatch");
    const std::size_t data = local + 30 + lname + lextra;
    if (data + csize > cd_offset) throw std::runtime_error("zip: data overlaps directory");
    const auto packed = b.substr(data, csize);
    if (e.method == 8) {
      e.content = inflate_raw(packed, usize);
    } else if (e.method == 0) {
      if (csize != usize) throw std::runtime_error("zip: stored size mismatch");
      e.content = std::string(packed);
    } else {
      throw std::runtime_error("zip: unsupported method");
    }
    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(e.content.data()), static_cast<uInt>(e.content.size())));
    if (crc != e.crc) throw std::runtime_error("zip: crc mismatch for " + e.name);
    out.push_back(std::move(e));
  }
  if (at != eocd) throw std::runtime_error("zip: directory size mismatch");
  return out;
}

}  // namespace forge::testing
