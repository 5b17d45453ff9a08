#include <charconv>
#include <cstdlib>
#include <type_traits>
#include <vector>
#include <cstdio>
#include <sstream>
#include <string>

#include "fcodt/errors.hpp"
#include "fcodt/tree.hpp"

// Text model format, one record per line:
//
//   fcodt-model 1
//   kind fc_odt
//   input_dim <d>
//   lambda <real>
//   criteria <max_depth> <min_samples_split> <min_samples_leaf> <min_gain>
//   flags <concatenate 0|1> <residual_path 0|1>
//   nodes <count>
//   internal <depth> <samples> <threshold> <gain> <left> <right> <p> <w_1> ... <w_p>
//   leaf <depth> <samples> <value>
//   end
//
// Node lines appear in index order (root first). The projection on an
// internal line includes the bias as its last entry.

namespace fcodt {

namespace {

constexpr int kFormatVersion = 1;

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : in_(std::string(text)) {}

  std::istringstream next(std::string_view expected_tag) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ss(line);
      std::string tag;
      ss >> tag;
      if (tag != expected_tag) fail("expected '" + std::string(expected_tag) + "', got '" + tag + "'");
      return ss;
    }
    fail("unexpected end of model, expected '" + std::string(expected_tag) + "'");
  }

  std::pair<std::string, std::istringstream> next_any() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ss(line);
      std::string tag;
      ss >> tag;
      return {tag, std::move(ss)};
    }
    fail("unexpected end of model");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_no_, what); }

  template <class T>
  T read(std::istringstream& ss, const char* field) {
    std::string tok;
    if (!(ss >> tok)) fail(std::string("missing field ") + field);
    T value{};
    if constexpr (std::is_same_v<T, double>) {
      char* end = nullptr;
      value = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size()) fail(std::string("bad number for ") + field + ": " + tok);
    } else {
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (ec != std::errc{} || ptr != tok.data() + tok.size())
        fail(std::string("bad integer for ") + field + ": " + tok);
    }
    return value;
  }

  void expect_eol(std::istringstream& ss) {
    std::string extra;
    if (ss >> extra) fail("trailing token '" + extra + "'");
  }

 private:
  std::istringstream in_;
  std::size_t line_no_ = 0;
};

}  // namespace

std::string serialize_model(const ObliqueTreeModel& model) {
  std::ostringstream out;
  out << "fcodt-model " << kFormatVersion << '\n';
  out << "kind " << to_string(model.kind) << '\n';
  out << "input_dim " << model.input_dim << '\n';
  out << "lambda " << fmt_real(model.lambda) << '\n';
  out << "criteria " << model.criteria.max_depth << ' ' << model.criteria.min_samples_split << ' '
      << model.criteria.min_samples_leaf << ' ' << fmt_real(model.criteria.min_gain) << '\n';
  out << "flags " << int(model.flags.concatenate) << ' ' << int(model.flags.residual_path) << '\n';
  out << "nodes " << model.nodes.size() << '\n';
  for (const auto& n : model.nodes) {
    if (n.is_leaf) {
      out << "leaf " << n.depth << ' ' << n.sample_count << ' ' << fmt_real(n.value) << '\n';
      continue;
    }
    out << "internal " << n.depth << ' ' << n.sample_count << ' ' << fmt_real(n.threshold) << ' '
        << fmt_real(n.gain) << ' ' << n.left << ' ' << n.right << ' ' << n.projection.size();
    for (double w : n.projection) out << ' ' << fmt_real(w);
    out << '\n';
  }
  out << "end\n";
  return out.str();
}

ObliqueTreeModel deserialize_model(std::string_view text) {
  LineReader rd(text);
  ObliqueTreeModel m;

  auto hdr = rd.next("fcodt-model");
  if (auto version = rd.read<int>(hdr, "version"); version != kFormatVersion)
    rd.fail("unsupported model format version " + std::to_string(version));

  auto kind = rd.next("kind");
  std::string kind_name;
  kind >> kind_name;
  try {
    m.kind = parse_model_kind(kind_name);
  } catch (const ContractViolation& e) {
    rd.fail(e.what());
  }

  auto dim = rd.next("input_dim");
  m.input_dim = rd.read<std::size_t>(dim, "input_dim");
  auto lam = rd.next("lambda");
  m.lambda = rd.read<double>(lam, "lambda");

  auto crit = rd.next("criteria");
  m.criteria.max_depth = rd.read<std::size_t>(crit, "max_depth");
  m.criteria.min_samples_split = rd.read<std::size_t>(crit, "min_samples_split");
  m.criteria.min_samples_leaf = rd.read<std::size_t>(crit, "min_samples_leaf");
  m.criteria.min_gain = rd.read<double>(crit, "min_gain");
  rd.expect_eol(crit);

  auto flags = rd.next("flags");
  m.flags.concatenate = rd.read<int>(flags, "concatenate") != 0;
  m.flags.residual_path = rd.read<int>(flags, "residual_path") != 0;

  auto count_line = rd.next("nodes");
  const auto count = rd.read<std::size_t>(count_line, "nodes");
  if (count == 0) rd.fail("model has no nodes");
  m.nodes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto [tag, ss] = rd.next_any();
    TreeNode n;
    if (tag == "leaf") {
      n.is_leaf = true;
      n.depth = rd.read<std::size_t>(ss, "depth");
      n.sample_count = rd.read<std::size_t>(ss, "samples");
      n.value = rd.read<double>(ss, "value");
    } else if (tag == "internal") {
      n.is_leaf = false;
      n.depth = rd.read<std::size_t>(ss, "depth");
      n.sample_count = rd.read<std::size_t>(ss, "samples");
      n.threshold = rd.read<double>(ss, "threshold");
      n.gain = rd.read<double>(ss, "gain");
      n.left = rd.read<std::size_t>(ss, "left");
      n.right = rd.read<std::size_t>(ss, "right");
      const auto p = rd.read<std::size_t>(ss, "projection length");
      if (p != m.representation_dim(n.depth) + 1)
        rd.fail("projection length " + std::to_string(p) + " does not match depth " +
                std::to_string(n.depth));
      n.projection.resize(p);
      for (auto& w : n.projection) w = rd.read<double>(ss, "projection");
      if (n.left <= i || n.right <= i || n.left == n.right || n.left >= count || n.right >= count)
        rd.fail("invalid child indices on node " + std::to_string(i));
    } else {
      rd.fail("expected node record, got '" + tag + "'");
    }
    rd.expect_eol(ss);
    m.nodes.push_back(std::move(n));
  }
  std::vector<int> parents(count, 0);
  for (const auto& n : m.nodes) {
    if (n.is_leaf) continue;
    for (std::size_t c : {n.left, n.right}) {
      ++parents[c];
      if (m.nodes[c].depth != n.depth + 1) rd.fail("child depth inconsistent with parent");
    }
  }
  if (m.nodes[0].depth != 0) rd.fail("root must have depth 0");
  for (std::size_t i = 1; i < count; ++i)
    if (parents[i] != 1) rd.fail("node " + std::to_string(i) + " is not a tree child");
  rd.next("end");
  return m;
}

}  // namespace fcodt
