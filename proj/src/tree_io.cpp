#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "solvency/errors.hpp"
#include "solvency/tree.hpp"
#include "text.hpp"

namespace solvency {

namespace {

constexpr std::string_view kMagic = "solvency-tree";
constexpr int kFormatVersion = 1;

void write_node(const TreeNode& node, std::ostream& out) {
  if (node.is_leaf()) {
    out << "leaf";
    for (auto c : node.counts) out << ' ' << c;
    out << '\n';
    return;
  }
  out << "split " << attribute_name(node.attribute) << ' ' << text::significant(node.threshold, 17) << '\n';
  write_node(*node.left, out);
  write_node(*node.right, out);
}

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  // Next non-empty line split on spaces; throws on end of input.
  std::vector<std::string_view> next(std::string_view expecting) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (!text::trim(line_).empty()) {
        tokens_.clear();
        for (auto tok : text::split(text::trim(line_), ' ')) {
          if (!tok.empty()) tokens_.push_back(tok);
        }
        return tokens_;
      }
    }
    throw ParseError("unexpected end of input, expected " + std::string(expecting), line_no_ + 1);
  }

  bool at_end() {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (!text::trim(line_).empty()) return false;
    }
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_no_); }

  template <typename T>
  T integer(std::string_view tok) const {
    auto value = text::parse_int<T>(tok);
    if (!value) fail("expected an integer, found '" + std::string(tok) + "'");
    return *value;
  }

  double number(std::string_view tok) const {
    auto value = text::parse_double(tok);
    if (!value) fail("expected a number, found '" + std::string(tok) + "'");
    return *value;
  }

  // key=value token
  std::string_view value_of(std::string_view tok, std::string_view key) const {
    if (tok.size() <= key.size() || tok.substr(0, key.size()) != key || tok[key.size()] != '=') {
      fail("expected " + std::string(key) + "=...");
    }
    return tok.substr(key.size() + 1);
  }

  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  std::string line_;
  std::vector<std::string_view> tokens_;
  std::size_t line_no_ = 0;
};

TreeNode read_node(ModelReader& reader, const std::vector<std::size_t>& schema, std::size_t depth) {
  if (depth > 10000) reader.fail("tree nesting too deep");
  const auto tokens = reader.next("a node");
  if (tokens[0] == "leaf") {
    if (tokens.size() != 1 + kNumClasses) reader.fail("leaf needs 4 class counts");
    TreeNode leaf;
    for (std::size_t c = 0; c < kNumClasses; ++c) leaf.counts[c] = reader.integer<std::size_t>(tokens[1 + c]);
    if (leaf.total() == 0) reader.fail("leaf with no training records");
    return leaf;
  }
  if (tokens[0] != "split") reader.fail("expected 'split' or 'leaf', found '" + std::string(tokens[0]) + "'");
  if (tokens.size() != 3) reader.fail("split needs an attribute and a threshold");
  auto attr = parse_attribute_name(tokens[1]);
  if (!attr) reader.fail("unknown attribute '" + std::string(tokens[1]) + "'");
  if (!std::binary_search(schema.begin(), schema.end(), *attr)) {
    reader.fail("split attribute " + std::string(tokens[1]) + " is not in the schema");
  }
  TreeNode node;
  node.attribute = *attr;
  node.threshold = reader.number(tokens[2]);
  node.left = std::make_unique<TreeNode>(read_node(reader, schema, depth + 1));
  node.right = std::make_unique<TreeNode>(read_node(reader, schema, depth + 1));
  for (std::size_t c = 0; c < kNumClasses; ++c) node.counts[c] = node.left->counts[c] + node.right->counts[c];
  return node;
}

std::string counts_text(const ClassCounts& counts) {
  std::string out;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (c) out += '/';
    out += std::to_string(counts[c]);
  }
  return out;
}

void render_node(const TreeNode& node, std::size_t level, std::ostringstream& out) {
  for (int side = 0; side < 2; ++side) {
    const TreeNode& child = side == 0 ? *node.left : *node.right;
    for (std::size_t i = 0; i < level; ++i) out << "|   ";
    out << attribute_name(node.attribute) << (side == 0 ? " <= " : " > ") << text::significant(node.threshold, 6);
    if (child.is_leaf()) {
      out << ": " << to_string(child.predicted()) << " (" << counts_text(child.counts) << ")\n";
    } else {
      out << '\n';
      render_node(child, level + 1, out);
    }
  }
}

}  // namespace

void serialize(const TreeModel& model, std::ostream& out) {
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "params cf=" << text::significant(model.params.confidence_factor, 17)
      << " min_leaf=" << model.params.min_leaf << " max_depth="
      << (model.params.max_depth ? std::to_string(*model.params.max_depth) : "none") << '\n';
  out << "schema";
  for (auto j : model.schema) out << ' ' << attribute_name(j);
  out << '\n';
  out << "training " << model.training_size;
  for (auto c : model.training_counts) out << ' ' << c;
  out << '\n';
  write_node(model.root, out);
}

std::string serialize(const TreeModel& model) {
  std::ostringstream out;
  serialize(model, out);
  return out.str();
}

TreeModel parse_model(std::istream& in) {
  ModelReader reader(in);
  TreeModel model;

  auto header = reader.next("header");
  if (header.size() != 2 || header[0] != kMagic) reader.fail("not a solvency-tree model file");
  if (reader.integer<int>(header[1]) != kFormatVersion) reader.fail("unsupported format version");

  auto params = reader.next("params");
  if (params.size() != 4 || params[0] != "params") reader.fail("expected 'params cf=.. min_leaf=.. max_depth=..'");
  model.params.confidence_factor = reader.number(reader.value_of(params[1], "cf"));
  model.params.min_leaf = reader.integer<std::size_t>(reader.value_of(params[2], "min_leaf"));
  if (auto depth = reader.value_of(params[3], "max_depth"); depth != "none") {
    model.params.max_depth = reader.integer<std::size_t>(depth);
  }
  try {
    validate(model.params);
  } catch (const std::invalid_argument& e) {
    reader.fail(e.what());
  }

  auto schema = reader.next("schema");
  if (schema[0] != "schema") reader.fail("expected 'schema'");
  for (std::size_t i = 1; i < schema.size(); ++i) {
    auto attr = parse_attribute_name(schema[i]);
    if (!attr) reader.fail("unknown attribute '" + std::string(schema[i]) + "'");
    if (!model.schema.empty() && *attr <= model.schema.back()) reader.fail("schema must be in V1..V11 order");
    model.schema.push_back(*attr);
  }

  auto training = reader.next("training");
  if (training.size() != 2 + kNumClasses || training[0] != "training") {
    reader.fail("expected 'training <n> <c_I> <c_W> <c_M> <c_S>'");
  }
  model.training_size = reader.integer<std::size_t>(training[1]);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    model.training_counts[c] = reader.integer<std::size_t>(training[2 + c]);
  }

  model.root = read_node(reader, model.schema, 0);
  if (!reader.at_end()) reader.fail("trailing content after the tree");
  return model;
}

TreeModel parse_model(const std::string& text) {
  std::istringstream in(text);
  return parse_model(in);
}

std::string render(const TreeModel& model) {
  std::ostringstream out;
  if (model.root.is_leaf()) {
    out << ": " << to_string(model.root.predicted()) << " (" << counts_text(model.root.counts) << ")\n";
  } else {
    render_node(model.root, 0, out);
  }
  return out.str();
}

}  // namespace solvency
