#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace litclass::xml {

// Minimal element tree built with expat. Text runs are stored as child nodes
// with an empty name so mixed content keeps document order.
struct Node {
  std::string name;
  std::string text;  // only for text nodes
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Node> children;

  bool is_text() const { return name.empty(); }
  const Node* child(std::string_view tag) const;
  std::vector<const Node*> children_named(std::string_view tag) const;
  const Node* path(std::initializer_list<std::string_view> tags) const;
  std::string attribute(std::string_view key) const;
  // Concatenated text of this node and all descendants.
  std::string text_content() const;
};

// Throws ParseError with the expat message and line on malformed input.
Node parse(std::string_view document);

// Collapses whitespace runs to one space and trims both ends.
std::string normalize_space(std::string_view s);

}  // namespace litclass::xml
