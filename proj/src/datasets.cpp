#include "fcodt/datasets.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "fcodt/errors.hpp"
#include "fcodt/rng.hpp"

namespace fcodt {

void Dataset::validate() const {
  if (features.rows() != targets.size())
    throw ContractViolation("dataset: " + std::to_string(features.rows()) + " feature rows but " +
                            std::to_string(targets.size()) + " targets");
  if (!noise_free.empty() && noise_free.size() != targets.size())
    throw ContractViolation("dataset: noise-free target length mismatch");
  if (!features.all_finite() || !all_finite(targets) || !all_finite(noise_free))
    throw ContractViolation("dataset contains non-finite values");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = features.select_rows(rows);
  out.targets.reserve(rows.size());
  for (std::size_t r : rows) out.targets.push_back(targets.at(r));
  if (!noise_free.empty()) {
    out.noise_free.reserve(rows.size());
    for (std::size_t r : rows) out.noise_free.push_back(noise_free.at(r));
  }
  out.meta = meta;
  return out;
}

namespace {

template <class Link>
double ridge_sum(std::span<const double> x, Link link) {
  auto avg = [&](std::initializer_list<int> idx) {
    double s = 0.0;
    for (int i : idx) s += x[static_cast<std::size_t>(i - 1)];
    return s / static_cast<double>(idx.size());
  };
  return link(avg({1})) + link(avg({2, 3})) + link(avg({4, 5, 6})) + link(avg({7, 8, 9, 10})) +
         link(avg({1, 3, 5, 7, 9}));
}

template <class F>
Dataset generate(std::string name, std::size_t n, double sigma, std::uint64_t seed, F f) {
  if (n < 1) throw ContractViolation("simulated dataset needs n >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ContractViolation("sigma must be >= 0");
  Rng rng(seed);
  Dataset d;
  d.features = DenseMatrix(n, kSimDim);
  d.targets.resize(n);
  d.noise_free.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = d.features.row(i);
    for (auto& v : row) v = rng.uniform(-3.0, 3.0);
    const double fx = f(row);
    d.noise_free[i] = fx;
    d.targets[i] = fx + sigma * rng.normal();
  }
  d.meta = {std::move(name), seed, sigma, "simulated"};
  return d;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::optional<double> parse_number(const std::string& tok) {
  if (tok.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) return std::nullopt;
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double sim1_function(std::span<const double> x) {
  if (x.size() != kSimDim) throw ContractViolation("sim1 expects 10 coordinates");
  return ridge_sum(x, [](double z) { return std::max(z, 0.0); });
}

double sim2_function(std::span<const double> x) {
  if (x.size() != kSimDim) throw ContractViolation("sim2 expects 10 coordinates");
  return ridge_sum(x, [](double z) { return std::exp(z); });
}

Dataset gen_sim1(std::size_t n, double sigma, std::uint64_t seed) {
  return generate("sim1", n, sigma, seed, [](std::span<const double> x) { return sim1_function(x); });
}

Dataset gen_sim2(std::size_t n, double sigma, std::uint64_t seed) {
  return generate("sim2", n, sigma, seed, [](std::span<const double> x) { return sim2_function(x); });
}

Dataset gen_sim(std::string_view which, std::size_t n, double sigma, std::uint64_t seed) {
  if (which == "sim1") return gen_sim1(n, sigma, seed);
  if (which == "sim2") return gen_sim2(n, sigma, seed);
  throw ContractViolation("unknown simulated dataset '" + std::string(which) + "'");
}

Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> expected_dim) {
  struct Row {
    double target;
    std::vector<std::pair<std::size_t, double>> entries;
  };
  std::vector<Row> rows;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    Row row{};
    auto target = parse_number(tok);
    if (!target) throw ParseError(line_no, "malformed target '" + tok + "'");
    if (!std::isfinite(*target)) throw ParseError(line_no, "non-finite target");
    row.target = *target;
    std::size_t prev = 0;
    while (ss >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0)
        throw ParseError(line_no, "malformed token '" + tok + "'");
      const std::string idx_str = tok.substr(0, colon);
      char* end = nullptr;
      const unsigned long long idx = std::strtoull(idx_str.c_str(), &end, 10);
      if (end != idx_str.c_str() + idx_str.size() || idx == 0 || idx_str[0] == '-')
        throw ParseError(line_no, "malformed feature index '" + idx_str + "'");
      auto value = parse_number(tok.substr(colon + 1));
      if (!value) throw ParseError(line_no, "malformed feature value in '" + tok + "'");
      if (!std::isfinite(*value)) throw ParseError(line_no, "non-finite feature value");
      if (idx <= prev) throw ParseError(line_no, "feature indices must be strictly increasing");
      if (expected_dim && idx > *expected_dim)
        throw ParseError(line_no, "feature index " + std::to_string(idx) +
                                      " exceeds expected dimension " +
                                      std::to_string(*expected_dim));
      prev = idx;
      row.entries.emplace_back(static_cast<std::size_t>(idx), *value);
    }
    max_index = std::max(max_index, prev);
    rows.push_back(std::move(row));
  }
  const std::size_t dim = expected_dim.value_or(max_index);
  Dataset d;
  d.features = DenseMatrix(rows.size(), dim);
  d.targets.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    d.targets[r] = rows[r].target;
    for (auto [idx, v] : rows[r].entries) d.features(r, idx - 1) = v;
  }
  d.meta.source = "libsvm";
  return d;
}

Dataset parse_csv(std::istream& in, std::optional<ColumnRef> target,
                  std::optional<std::string> noise_free_column) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (first) {
      first = false;
      width = cells.size();
      const bool numeric = std::all_of(cells.begin(), cells.end(),
                                       [](const std::string& c) { return parse_number(c).has_value(); });
      if (!numeric) {
        header = std::move(cells);
        continue;
      }
    }
    if (cells.size() != width)
      throw ParseError(line_no, "ragged row: expected " + std::to_string(width) + " cells, got " +
                                    std::to_string(cells.size()));
    std::vector<double> values(width);
    for (std::size_t c = 0; c < width; ++c) {
      auto v = parse_number(cells[c]);
      if (!v) throw ParseError(line_no, "non-numeric cell '" + cells[c] + "' in column " +
                                            std::to_string(c + 1));
      if (!std::isfinite(*v))
        throw ParseError(line_no, "non-finite cell in column " + std::to_string(c + 1));
      values[c] = *v;
    }
    rows.push_back(std::move(values));
  }

  std::optional<std::size_t> target_col;
  if (target) {
    if (const auto* name = std::get_if<std::string>(&*target)) {
      auto it = std::find(header.begin(), header.end(), *name);
      if (it == header.end()) {
        if (header.empty() && rows.empty()) {
          Dataset empty;
          empty.meta.source = "csv";
          return empty;
        }
        throw ContractViolation("target column '" + *name + "' not found in header");
      }
      target_col = static_cast<std::size_t>(it - header.begin());
    } else {
      target_col = std::get<std::size_t>(*target);
      if (width > 0 && *target_col >= width)
        throw ContractViolation("target column index " + std::to_string(*target_col) +
                                " out of range");
    }
  }

  std::optional<std::size_t> f_col;
  if (noise_free_column) {
    auto it = std::find(header.begin(), header.end(), *noise_free_column);
    if (it != header.end() && static_cast<std::size_t>(it - header.begin()) != target_col)
      f_col = static_cast<std::size_t>(it - header.begin());
  }

  const std::size_t dim = width == 0 ? 0 : width - (target_col ? 1 : 0) - (f_col ? 1 : 0);
  Dataset d;
  d.features = DenseMatrix(rows.size(), dim);
  d.targets.assign(rows.size(), 0.0);
  if (f_col) d.noise_free.assign(rows.size(), 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::size_t j = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (target_col && c == *target_col)
        d.targets[r] = rows[r][c];
      else if (f_col && c == *f_col)
        d.noise_free[r] = rows[r][c];
      else
        d.features(r, j++) = rows[r][c];
    }
  }
  d.meta.source = "csv";
  return d;
}

void write_csv(std::ostream& out, const Dataset& data, bool include_noise_free) {
  const bool with_f = include_noise_free && !data.noise_free.empty();
  for (std::size_t j = 0; j < data.dim(); ++j) out << 'x' << (j + 1) << ',';
  out << 'y' << (with_f ? ",f" : "") << '\n';
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (double v : data.features.row(r)) out << fmt17(v) << ',';
    out << fmt17(data.targets[r]);
    if (with_f) out << ',' << fmt17(data.noise_free[r]);
    out << '\n';
  }
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  for (std::size_t r = 0; r < data.size(); ++r) {
    out << fmt17(data.targets[r]);
    auto row = data.features.row(r);
    for (std::size_t j = 0; j < row.size(); ++j)
      if (row[j] != 0.0) out << ' ' << (j + 1) << ':' << fmt17(row[j]);
    out << '\n';
  }
}

Dataset load_dataset(const std::filesystem::path& path, std::optional<ColumnRef> target,
                     std::optional<std::size_t> expected_dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file " + path.string());
  Dataset d = path.extension() == ".csv"
                  ? parse_csv(in, target ? target : ColumnRef{std::string("y")}, "f")
                  : parse_libsvm(in, expected_dim);
  d.meta.name = path.stem().string();
  return d;
}

SplitAssignment train_test_split(std::size_t n, double train_fraction, std::uint64_t seed) {
  if (n < 2) throw ContractViolation("train_test_split needs at least two rows");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ContractViolation("train_fraction must lie in (0, 1)");
  auto idx = iota_indices(n);
  Rng rng(seed);
  shuffle(idx, rng);
  // The tolerance keeps products such as 10 × 0.7 = 7.000000000000001 at 7.
  auto n_train = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * train_fraction - 1e-9));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  SplitAssignment s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  return s;
}

std::vector<SplitAssignment> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ContractViolation("kfold needs k >= 2");
  if (k > n) throw ContractViolation("kfold: k = " + std::to_string(k) + " exceeds n = " +
                                     std::to_string(n));
  auto idx = iota_indices(n);
  Rng rng(seed);
  shuffle(idx, rng);
  std::vector<SplitAssignment> folds(k);
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i)
      (i >= start && i < start + size ? folds[f].test : folds[f].train).push_back(idx[i]);
    start += size;
  }
  return folds;
}

MinMaxScaler MinMaxScaler::fit(const DenseMatrix& x) {
  MinMaxScaler s;
  s.lo.assign(x.cols(), 0.0);
  s.hi.assign(x.cols(), 0.0);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      lo = std::min(lo, x(r, j));
      hi = std::max(hi, x(r, j));
    }
    s.lo[j] = x.rows() ? lo : 0.0;
    s.hi[j] = x.rows() ? hi : 0.0;
  }
  return s;
}

DenseMatrix MinMaxScaler::apply(const DenseMatrix& x) const {
  if (x.cols() != lo.size()) throw ContractViolation("MinMaxScaler: dimension mismatch");
  DenseMatrix out = x;
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double range = hi[j] - lo[j];
      out(r, j) = range > 0.0 ? (x(r, j) - lo[j]) / range : 0.0;
    }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  static constexpr char digits[] = "0123456789abcdef";
  for (unsigned i = 0; i < len; ++i) {
    hex += digits[md[i] >> 4];
    hex += digits[md[i] & 0xf];
  }
  return hex;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("manifest " + path.string() + ": " + e.what());
  }
  DatasetManifest m;
  m.base_dir = path.parent_path();
  static const std::vector<std::string> known = {"format", "path", "target", "dim", "sha256",
                                                 "url", "n", "sigma", "description"};
  for (auto& [name, item] : doc.at("datasets").items()) {
    for (auto& [key, _] : item.items())
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw ContractViolation("manifest entry '" + name + "': unknown key '" + key + "'");
    ManifestEntry e;
    e.name = name;
    e.format = item.value("format", std::string("libsvm"));
    if (item.contains("path")) e.path = item.at("path").get<std::string>();
    if (item.contains("target")) {
      if (item.at("target").is_string())
        e.target = item.at("target").get<std::string>();
      else
        e.target = item.at("target").get<std::size_t>();
    }
    if (item.contains("dim")) e.dim = item.at("dim").get<std::size_t>();
    e.sha256 = item.value("sha256", std::string());
    e.url = item.value("url", std::string());
    e.sim_n = item.value("n", std::size_t{2000});
    e.sim_sigma = item.value("sigma", 0.01);
    m.entries.emplace(name, std::move(e));
  }
  return m;
}

Dataset resolve_dataset(const DatasetManifest& manifest, const std::string& name,
                        std::uint64_t seed) {
  auto it = manifest.entries.find(name);
  if (it == manifest.entries.end()) throw std::runtime_error("dataset '" + name + "' not in manifest");
  const ManifestEntry& e = it->second;
  if (e.format == "sim1" || e.format == "sim2") return gen_sim(e.format, e.sim_n, e.sim_sigma, seed);

  const auto path = e.path.is_absolute() ? e.path : manifest.base_dir / e.path;
  if (!std::filesystem::exists(path))
    throw std::runtime_error("dataset '" + name + "' missing at " + path.string());
  if (!e.sha256.empty()) {
    const std::string actual = sha256_file(path);
    if (actual != e.sha256)
      throw std::runtime_error("dataset '" + name + "' checksum mismatch: expected " + e.sha256 +
                               ", got " + actual);
  }
  std::ifstream in(path);
  Dataset d = e.format == "csv" ? parse_csv(in, e.target ? e.target : ColumnRef{std::string("y")})
                                : parse_libsvm(in, e.dim);
  d.meta.name = name;
  d.meta.source = path.string();
  return d;
}

}  // namespace fcodt
