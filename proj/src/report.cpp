#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "fcodt/errors.hpp"
#include "fcodt/evaluation.hpp"

namespace fcodt {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string f3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double to_double(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw ParseError(line, "expected a number, got '" + s + "'");
  return v;
}

std::pair<double, double> mean_std(const Vector& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return {m, sd};
}

const char* kResultsHeader = "dataset,method,repeat,seed,param_name,param_value,metric,value";

}  // namespace

void write_results_csv(std::ostream& out, std::span<const ResultRecord> records) {
  out << kResultsHeader << '\n';
  for (const auto& r : records)
    out << r.dataset << ',' << r.method << ',' << r.repeat << ',' << r.seed << ',' << r.param_name
        << ',' << g17(r.param_value) << ',' << r.metric << ',' << g17(r.value) << '\n';
}

std::vector<ResultRecord> read_results_csv(std::istream& in) {
  std::vector<ResultRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kResultsHeader) throw ParseError(1, "unexpected results header");
      continue;
    }
    const auto c = split_commas(line);
    if (c.size() != 8) throw ParseError(line_no, "expected 8 columns");
    ResultRecord r;
    r.dataset = c[0];
    r.method = c[1];
    r.repeat = static_cast<std::size_t>(to_double(c[2], line_no));
    r.seed = std::stoull(c[3]);
    r.param_name = c[4];
    r.param_value = to_double(c[5], line_no);
    r.metric = c[6];
    r.value = to_double(c[7], line_no);
    records.push_back(std::move(r));
  }
  return records;
}

void write_timings_csv(std::ostream& out, std::span<const CellTiming> timings) {
  out << "dataset,method,param_name,param_value,repeat,seconds\n";
  for (const auto& t : timings)
    out << t.dataset << ',' << t.method << ',' << t.param_name << ',' << g17(t.param_value) << ','
        << t.repeat << ',' << g17(t.seconds) << '\n';
}

std::vector<SummaryRow> summarize(std::span<const ResultRecord> records, std::string_view metric) {
  std::map<std::tuple<std::string, std::string, std::string, double>, Vector> groups;
  for (const auto& r : records)
    if (r.metric == metric) groups[{r.dataset, r.method, r.param_name, r.param_value}].push_back(r.value);
  std::vector<SummaryRow> rows;
  for (const auto& [key, values] : groups) {
    const auto [m, sd] = mean_std(values);
    rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key),
                    std::string(metric), m, sd, values.size()});
  }
  return rows;
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "dataset,method,param_name,param_value,metric,mean,std,count\n";
  for (const auto& r : rows)
    out << r.dataset << ',' << r.method << ',' << r.param_name << ',' << g17(r.param_value) << ','
        << r.metric << ',' << g17(r.mean) << ',' << g17(r.std) << ',' << r.count << '\n';
}

std::vector<ReferenceScore> read_reference_csv(std::istream& in) {
  std::vector<ReferenceScore> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto c = split_commas(line);
    if (!header_seen) {
      header_seen = true;
      if (c.size() < 4 || c[0] != "dataset" || c[1] != "method" || c[2] != "mean" || c[3] != "std")
        throw ParseError(line_no, "reference header must start with dataset,method,mean,std");
      continue;
    }
    if (c.size() < 4) throw ParseError(line_no, "expected at least 4 columns");
    ReferenceScore s{c[0], c[1], to_double(c[2], line_no), to_double(c[3], line_no)};
    try {
      s.method = std::string(method_name(parse_method(s.method)));
    } catch (const ContractViolation&) {
      // external method, name kept verbatim
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

// "FC-ODT" and "fc_odt" name the same column.
std::string canonical_method(const std::string& name) {
  try {
    return std::string(method_name(parse_method(name)));
  } catch (const ContractViolation&) {
    return name;
  }
}

}  // namespace

AggregateTable aggregate_benchmark(std::span<const ResultRecord> records,
                                   std::span<const ReferenceScore> reference, double alpha) {
  AggregateTable t;
  std::map<std::pair<std::string, std::string>, Vector> values;
  for (const auto& r : records) {
    if (r.metric != "r2") continue;
    if (std::find(t.datasets.begin(), t.datasets.end(), r.dataset) == t.datasets.end())
      t.datasets.push_back(r.dataset);
    if (std::find(t.methods.begin(), t.methods.end(), r.method) == t.methods.end())
      t.methods.push_back(r.method);
    values[{r.dataset, r.method}].push_back(r.value);
  }
  const std::vector<std::string> computed = t.methods;

  for (const auto& [key, v] : values) {
    AggregateCell cell;
    std::tie(cell.mean, cell.std) = mean_std(v);
    cell.count = v.size();
    t.cells[key] = cell;
  }

  // Imported scores fill columns for methods not computed here.
  for (const auto& ref : reference) {
    if (std::find(computed.begin(), computed.end(), canonical_method(ref.method)) != computed.end())
      continue;
    if (std::find(t.datasets.begin(), t.datasets.end(), ref.dataset) == t.datasets.end()) continue;
    if (std::find(t.methods.begin(), t.methods.end(), ref.method) == t.methods.end())
      t.methods.push_back(ref.method);
    AggregateCell cell;
    cell.mean = ref.mean;
    cell.std = ref.std;
    cell.reference = true;
    t.cells[{ref.dataset, ref.method}] = cell;
  }

  const std::string fc(method_name(Method::fc_odt));
  for (const auto& d : t.datasets) {
    auto fc_it = values.find({d, fc});
    if (fc_it == values.end()) continue;
    for (const auto& m : computed) {
      if (m == fc) continue;
      auto it = values.find({d, m});
      if (it == values.end()) continue;
      const auto test = rank_sum_test(fc_it->second, it->second);
      if (test.p_value < alpha) {
        AggregateCell& cell = t.cells[{d, m}];
        cell.marker = t.cells[{d, fc}].mean > cell.mean ? "•" : "∘";
      }
    }
  }

  std::map<std::string, double> rank_sum;
  for (const auto& d : t.datasets) {
    std::vector<std::pair<double, std::string>> row;
    for (const auto& m : t.methods)
      if (auto it = t.cells.find({d, m}); it != t.cells.end()) row.emplace_back(it->second.mean, m);
    if (row.size() != t.methods.size()) continue;
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < row.size();) {
      std::size_t j = i;
      while (j + 1 < row.size() && row[j + 1].first == row[i].first) ++j;
      const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) rank_sum[row[k].second] += rank;
      i = j + 1;
    }
    ++t.ranked_datasets;
  }
  if (t.ranked_datasets > 0)
    for (const auto& [m, s] : rank_sum) t.average_rank[m] = s / static_cast<double>(t.ranked_datasets);
  return t;
}

void write_aggregate_csv(std::ostream& out, const AggregateTable& table) {
  out << "dataset";
  for (const auto& m : table.methods) out << ',' << m;
  out << '\n';
  for (const auto& d : table.datasets) {
    out << d;
    for (const auto& m : table.methods) {
      out << ',';
      if (auto it = table.cells.find({d, m}); it != table.cells.end())
        out << f3(it->second.mean) << "±" << f3(it->second.std) << it->second.marker;
    }
    out << '\n';
  }
  out << "average rank";
  for (const auto& m : table.methods) {
    out << ',';
    if (auto it = table.average_rank.find(m); it != table.average_rank.end()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", it->second);
      out << buf;
    }
  }
  out << '\n';
}

}  // namespace fcodt
