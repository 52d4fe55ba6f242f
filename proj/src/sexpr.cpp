#include "pgplan/sexpr.hpp"

#include <cctype>
#include <charconv>

namespace pgplan::sexpr {

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<Node> read_all() {
    std::vector<Node> out;
    skip_blank();
    while (i_ < text_.size()) {
      out.push_back(read());
      skip_blank();
    }
    return out;
  }

 private:
  Node read() {
    skip_blank();
    if (i_ >= text_.size()) throw SyntaxError("expected '(' or symbol, got end of input", here());
    Node node;
    node.pos = here();
    char c = text_[i_];
    if (c == ')') throw SyntaxError("expected '(' or symbol, got ')'", here());
    if (c == '(') {
      node.is_list = true;
      advance();
      for (;;) {
        skip_blank();
        if (i_ >= text_.size()) throw SyntaxError("expected ')', got end of input", here());
        if (text_[i_] == ')') {
          advance();
          break;
        }
        node.children.push_back(read());
      }
      return node;
    }
    std::size_t start = i_;
    while (i_ < text_.size() && !is_delim(text_[i_])) advance();
    node.text = std::string(text_.substr(start, i_ - start));
    return node;
  }

  static bool is_delim(char c) {
    return c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c));
  }

  void skip_blank() {
    while (i_ < text_.size()) {
      char c = text_[i_];
      if (c == ';') {
        while (i_ < text_.size() && text_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  SourcePos here() const { return {line_, col_}; }

  std::string_view text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

void print(const Node& n, std::string& out) {
  if (!n.is_list) {
    out += n.text;
    return;
  }
  out += '(';
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (i) out += ' ';
    print(n.children[i], out);
  }
  out += ')';
}

}  // namespace

std::vector<Node> parse_all(std::string_view text) { return Reader(text).read_all(); }

Node parse_one(std::string_view text) {
  auto nodes = parse_all(text);
  if (nodes.empty()) throw SyntaxError("expected one form, got empty input", SourcePos{1, 1});
  if (nodes.size() > 1) throw SyntaxError("expected end of input", nodes[1].pos);
  return std::move(nodes.front());
}

std::string to_string(const Node& node) {
  std::string out;
  print(node, out);
  return out;
}

const Node& expect_list(const Node& node, std::string_view what) {
  if (!node.is_list) throw SyntaxError("expected " + std::string(what) + " list, got '" + node.text + "'", node.pos);
  return node;
}

const std::string& expect_symbol(const Node& node, std::string_view what) {
  if (node.is_list) throw SyntaxError("expected " + std::string(what) + ", got a list", node.pos);
  return node.text;
}

void expect_keyword(const Node& node, std::string_view keyword) {
  if (!node.is_symbol(keyword)) {
    throw SyntaxError("expected '" + std::string(keyword) + "', got '" + (node.is_list ? std::string("(...)") : node.text) + "'",
                      node.pos);
  }
}

int expect_int(const Node& node, std::string_view what) {
  const std::string& s = expect_symbol(node, what);
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value < 0) {
    throw SyntaxError("expected " + std::string(what) + " (non-negative integer), got '" + s + "'", node.pos);
  }
  return value;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s.substr(1)) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  }
  return true;
}

}  // namespace pgplan::sexpr
