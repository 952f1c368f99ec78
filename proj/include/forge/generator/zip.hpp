#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "forge/common/package_tree.hpp"

namespace forge::generator {

/// Deflated zip archive of the tree, a pure function of its entries: paths in
/// lexicographic order, every timestamp 1980-01-01 00:00, no extra fields,
/// UTF-8 name flag set. An empty tree yields a bare end-of-directory record.
std::string zip_bytes(const PackageTree& tree);

/// Writes zip_bytes(tree) to zip_path and returns the byte count.
std::uintmax_t export_zip(const PackageTree& tree, const std::filesystem::path& zip_path);

}  // namespace forge::generator
