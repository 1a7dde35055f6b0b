#include "xml.hpp"

#include <expat.h>

#include <memory>

#include "litclass/error.hpp"

namespace litclass::xml {

const Node* Node::child(std::string_view tag) const {
  for (const auto& c : children) {
    if (c.name == tag) return &c;
  }
  return nullptr;
}

std::vector<const Node*> Node::children_named(std::string_view tag) const {
  std::vector<const Node*> out;
  for (const auto& c : children) {
    if (c.name == tag) out.push_back(&c);
  }
  return out;
}

const Node* Node::path(std::initializer_list<std::string_view> tags) const {
  const Node* cur = this;
  for (auto tag : tags) {
    cur = cur->child(tag);
    if (!cur) return nullptr;
  }
  return cur;
}

std::string Node::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return v;
  }
  return {};
}

std::string Node::text_content() const {
  if (is_text()) return text;
  std::string out;
  for (const auto& c : children) out += c.text_content();
  return out;
}

namespace {

struct Builder {
  std::vector<Node> stack;

  static void on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
    auto* self = static_cast<Builder*>(data);
    Node node;
    node.name = name;
    for (int i = 0; attrs[i]; i += 2) node.attributes.emplace_back(attrs[i], attrs[i + 1]);
    self->stack.push_back(std::move(node));
  }

  static void on_end(void* data, const XML_Char*) {
    auto* self = static_cast<Builder*>(data);
    Node done = std::move(self->stack.back());
    self->stack.pop_back();
    self->stack.back().children.push_back(std::move(done));
  }

  static void on_text(void* data, const XML_Char* s, int len) {
    auto* self = static_cast<Builder*>(data);
    auto& kids = self->stack.back().children;
    if (!kids.empty() && kids.back().is_text()) {
      kids.back().text.append(s, len);
    } else {
      Node t;
      t.text.assign(s, len);
      kids.push_back(std::move(t));
    }
  }
};

}  // namespace

Node parse(std::string_view document) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                        &XML_ParserFree);
  Builder builder;
  builder.stack.emplace_back();  // synthetic document root
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), &Builder::on_start, &Builder::on_end);
  XML_SetCharacterDataHandler(parser.get(), &Builder::on_text);
  if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), 1) ==
      XML_STATUS_ERROR) {
    throw ParseError("xml line " + std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
                     XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  Node root = std::move(builder.stack.front());
  // Drop whitespace between top-level markup.
  std::erase_if(root.children, [](const Node& n) { return n.is_text(); });
  return root;
}

std::string normalize_space(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace litclass::xml
