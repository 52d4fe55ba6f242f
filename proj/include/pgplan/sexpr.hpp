#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pgplan/error.hpp"

namespace pgplan::sexpr {

/// A parsed s-expression: either a list or a bare symbol. `;` starts a line
/// comment; there are no string literals in any of our formats.
struct Node {
  bool is_list = false;
  std::string text;  // symbol text, empty for lists
  std::vector<Node> children;
  SourcePos pos;

  bool is_symbol() const { return !is_list; }
  bool is_symbol(std::string_view s) const { return !is_list && text == s; }
};

/// Parses every top-level form in `text`.
std::vector<Node> parse_all(std::string_view text);

/// Parses exactly one top-level form.
Node parse_one(std::string_view text);

std::string to_string(const Node& node);

// Shape helpers used by the format readers. All throw SyntaxError positioned
// at the node.
const Node& expect_list(const Node& node, std::string_view what);
const std::string& expect_symbol(const Node& node, std::string_view what);
void expect_keyword(const Node& node, std::string_view keyword);
int expect_int(const Node& node, std::string_view what);

/// `[A-Za-z][A-Za-z0-9_-]*`
bool is_identifier(std::string_view s);

}  // namespace pgplan::sexpr
