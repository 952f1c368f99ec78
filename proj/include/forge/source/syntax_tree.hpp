#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "forge/source/tokens.hpp"

namespace forge::source {

/// One node of a syntax tree. Internal nodes are named after grammar
/// productions ("function_def", "call", ...). Leaves own exactly one
/// significant token; their kind is the token kind for names and literals
/// ("identifier", "number", "string") and the token text otherwise.
struct SyntaxNode {
  std::string kind;
  std::vector<int> children;
  int token = -1;                // leaf token index, -1 for internal nodes
  std::size_t first_token = 0;   // token index range [first, last)
  std::size_t last_token = 0;

  bool is_leaf() const { return token >= 0; }
};

class SyntaxTree {
 public:
  SyntaxTree() = default;
  SyntaxTree(std::string source, TokenStream tokens, std::vector<SyntaxNode> nodes, int root);

  int root() const noexcept { return root_; }
  const SyntaxNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  const std::vector<SyntaxNode>& nodes() const noexcept { return nodes_; }
  const TokenStream& tokens() const noexcept { return tokens_; }
  const std::string& source() const noexcept { return source_; }

  /// The token a leaf stands for.
  const Token& token_of(int leaf) const;
  /// Source text covered by a node, verbatim.
  std::string_view text_of(int id) const;

  bool has_errors() const noexcept { return error_count_ > 0; }
  std::size_t error_count() const noexcept { return error_count_; }

  /// Leaf node ids in left-to-right order.
  std::vector<int> leaves() const;

  /// Indented text rendering, one node per line.
  std::string dump() const;

 private:
  std::string source_;
  TokenStream tokens_;
  std::vector<SyntaxNode> nodes_;
  int root_ = -1;
  std::size_t error_count_ = 0;
};

/// Error-recovering parser for the Python subset the generator emits. A
/// statement that fails to parse becomes an "error" node covering its tokens
/// up to the end of its logical line, and parsing resumes after it.
SyntaxTree parse(std::string_view source);

}  // namespace forge::source
