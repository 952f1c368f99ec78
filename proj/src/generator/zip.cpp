#include "forge/generator/zip.hpp"

#include <fstream>
#include <limits>
#include <vector>

#include <zlib.h>

#include "forge/common/errors.hpp"

namespace forge::generator {

namespace {

constexpr std::uint16_t kVersion = 20;        // 2.0: deflate
constexpr std::uint16_t kUtf8Flag = 0x0800;   // general purpose bit 11
constexpr std::uint16_t kDeflate = 8;
constexpr std::uint16_t kDosTime = 0;         // 00:00:00
constexpr std::uint16_t kDosDate = 0x0021;    // 1980-01-01

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string deflate_raw(const std::string& input) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error("deflateInit2 failed");
  }
  std::string out(deflateBound(&zs, static_cast<uLong>(input.size())), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(input.data()));
  zs.avail_in = static_cast<uInt>(input.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error("deflate failed");
  out.resize(produced);
  return out;
}

struct CentralEntry {
  std::string name;
  std::uint32_t crc = 0;
  std::uint32_t compressed = 0;
  std::uint32_t size = 0;
  std::uint32_t offset = 0;
};

std::uint32_t checked32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) throw Error(std::string("zip64 not supported: ") + what);
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::string zip_bytes(const PackageTree& tree) {
  if (tree.size() > 0xffff) throw Error("zip64 not supported: too many entries");
  std::string out;
  std::vector<CentralEntry> central;
  for (const auto& [path, content] : tree) {
    if (path.size() > 0xffff) throw Error("zip entry name too long: " + path);
    const std::string packed = deflate_raw(content);
    CentralEntry e;
    e.name = path;
    e.crc = static_cast<std::uint32_t>(crc32(0L, reinterpret_cast<const Bytef*>(content.data()),
                                             static_cast<uInt>(content.size())));
    e.compressed = checked32(packed.size(), "entry too large");
    e.size = checked32(content.size(), "entry too large");
    e.offset = checked32(out.size(), "archive too large");

    put32(out, 0x04034b50);
    put16(out, kVersion);
    put16(out, kUtf8Flag);
    put16(out, kDeflate);
    put16(out, kDosTime);
    put16(out, kDosDate);
    put32(out, e.crc);
    put32(out, e.compressed);
    put32(out, e.size);
    put16(out, static_cast<std::uint16_t>(path.size()));
    put16(out, 0);
    out += path;
    out += packed;
    central.push_back(std::move(e));
  }

  const std::uint32_t directory_offset = checked32(out.size(), "archive too large");
  for (const auto& e : central) {
    put32(out, 0x02014b50);
    put16(out, kVersion);  // made by: MS-DOS attribute compatibility, 2.0
    put16(out, kVersion);
    put16(out, kUtf8Flag);
    put16(out, kDeflate);
    put16(out, kDosTime);
    put16(out, kDosDate);
    put32(out, e.crc);
    put32(out, e.compressed);
    put32(out, e.size);
    put16(out, static_cast<std::uint16_t>(e.name.size()));
    put16(out, 0);  // extra
    put16(out, 0);  // comment
    put16(out, 0);  // disk
    put16(out, 0);  // internal attributes
    put32(out, 0);  // external attributes
    put32(out, e.offset);
    out += e.name;
  }
  const std::uint32_t directory_size = checked32(out.size() - directory_offset, "archive too large");

  put32(out, 0x06054b50);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(central.size()));
  put16(out, static_cast<std::uint16_t>(central.size()));
  put32(out, directory_size);
  put32(out, directory_offset);
  put16(out, 0);
  return out;
}

std::uintmax_t export_zip(const PackageTree& tree, const std::filesystem::path& zip_path) {
  const std::string bytes = zip_bytes(tree);
  if (zip_path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(zip_path.parent_path(), ec);
  }
  std::ofstream out(zip_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(zip_path, "cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError(zip_path, "write failed");
  return bytes.size();
}

}  // namespace forge::generator
