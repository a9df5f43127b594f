// Copyright 2026 The diskpca Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "diskpca/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "diskpca/errors.hpp"
#include "diskpca/random.hpp"

namespace diskpca {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string line_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_index(std::string_view s, long long& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    ++line_no;
    fn(line_no, line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

ColumnMatrix parse_sparse(std::string_view text) {
  std::vector<std::vector<std::pair<Index, double>>> columns;
  Index dim = 0;
  for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
    const std::string_view line = trim(raw);
    if (line.empty()) return;
    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      if (body.substr(0, 4) == "dim=") {
        long long d = 0;
        if (!parse_index(trim(body.substr(4)), d) || d < 0) {
          throw DataError(line_error(line_no, "bad dimension header"));
        }
        dim = std::max<Index>(dim, static_cast<Index>(d));
      }
      return;
    }
    std::vector<std::pair<Index, double>> col;
    std::istringstream tokens{std::string(line)};
    std::string tok;
    bool first = true;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) {
        double label = 0.0;
        if (!first || !parse_double(tok, label)) {
          throw DataError(line_error(line_no, "expected idx:val, got '" + tok + "'"));
        }
        first = false;
        continue;
      }
      first = false;
      long long idx = 0;
      double val = 0.0;
      const std::string_view sv(tok);
      if (!parse_index(sv.substr(0, colon), idx) || idx < 1) {
        throw DataError(line_error(line_no, "bad index in '" + tok + "' (indices are 1-based)"));
      }
      if (!parse_double(sv.substr(colon + 1), val)) {
        throw DataError(line_error(line_no, "bad value in '" + tok + "'"));
      }
      const auto row = static_cast<Index>(idx - 1);
      if (!col.empty() && row <= col.back().first) {
        throw DataError(line_error(line_no, "indices must be strictly increasing"));
      }
      col.emplace_back(row, val);
      dim = std::max(dim, row + 1);
    }
    columns.push_back(std::move(col));
  });
  if (columns.empty()) throw DataError("dataset has no points");
  return ColumnMatrix::from_sparse_columns(dim, columns);
}

ColumnMatrix parse_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') return;
    std::vector<double> values;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view field = trim(rest.substr(0, comma));
      double v = 0.0;
      if (!parse_double(field, v)) {
        throw DataError(line_error(line_no, "bad value '" + std::string(field) + "'"));
      }
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows.empty()) {
      width = values.size();
    } else if (values.size() != width) {
      throw DataError(line_error(line_no, "expected " + std::to_string(width) + " values, got " +
                                              std::to_string(values.size())));
    }
    rows.push_back(std::move(values));
  });
  if (rows.empty()) throw DataError("dataset has no points");
  Matrix m(static_cast<Index>(width), static_cast<Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i < width; ++i) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[j][i];
  }
  return ColumnMatrix(std::move(m));
}

void append_double(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

DataFormat parse_format(const std::string& name) {
  if (name == "sparse" || name == "sparse-index-value" || name == "svm" || name == "libsvm") {
    return DataFormat::kSparse;
  }
  if (name == "dense-csv" || name == "csv" || name == "dense") return DataFormat::kDenseCsv;
  throw ArgumentError("unknown data format '" + name + "'");
}

DataFormat format_from_path(const std::string& path) {
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return csv ? DataFormat::kDenseCsv : DataFormat::kSparse;
}

ColumnMatrix parse_dataset(std::string_view text, DataFormat format) {
  return format == DataFormat::kSparse ? parse_sparse(text) : parse_csv(text);
}

ColumnMatrix load_dataset(const std::string& path, DataFormat format) {
  try {
    return parse_dataset(read_file(path), format);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string format_dataset(const ColumnMatrix& data, DataFormat format) {
  std::string out;
  if (format == DataFormat::kSparse) {
    out += "# dim=" + std::to_string(data.rows()) + "\n";
    for (Index j = 0; j < data.cols(); ++j) {
      bool any = false;
      auto emit = [&](Index row, double v) {
        if (any) out += ' ';
        out += std::to_string(row + 1);
        out += ':';
        append_double(out, v);
        any = true;
      };
      if (data.is_sparse()) {
        for (SparseMatrix::InnerIterator it(data.sparse(), j); it; ++it) emit(it.row(), it.value());
      } else {
        for (Index i = 0; i < data.rows(); ++i) {
          if (data.dense()(i, j) != 0.0) emit(i, data.dense()(i, j));
        }
      }
      // A point with no entries is written as a bare label.
      if (!any) out += '0';
      out += '\n';
    }
    return out;
  }
  const Matrix dense = data.to_dense();
  for (Index j = 0; j < dense.cols(); ++j) {
    for (Index i = 0; i < dense.rows(); ++i) {
      if (i > 0) out += ',';
      append_double(out, dense(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_dataset(const std::string& path, const ColumnMatrix& data, DataFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << format_dataset(data, format);
  if (!out) throw DataError("write failed for '" + path + "'");
}

SyntheticKind parse_synthetic_kind(const std::string& name) {
  if (name == "low-rank-plus-noise" || name == "lowrank") return SyntheticKind::kLowRankPlusNoise;
  if (name == "clustered" || name == "blobs") return SyntheticKind::kClustered;
  throw ArgumentError("unknown synthetic kind '" + name + "'");
}

SyntheticData gen_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.d < 1 || spec.k_true < 1) {
    throw ArgumentError("gen_synthetic: n, d and k_true must be >= 1");
  }
  if (spec.k_true > std::min(spec.d, spec.n)) {
    throw ArgumentError("gen_synthetic: k_true = " + std::to_string(spec.k_true) +
                        " exceeds min(d, n) = " + std::to_string(std::min(spec.d, spec.n)));
  }
  if (!(spec.noise >= 0.0)) throw ArgumentError("gen_synthetic: noise must be >= 0");
  SyntheticData out;
  Rng rng(lane(spec.seed, "synthetic"));
  auto gaussian = [&](Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    }
    return m;
  };
  if (spec.kind == SyntheticKind::kLowRankPlusNoise) {
    const Matrix b = gaussian(spec.d, spec.k_true);
    const Matrix c = gaussian(spec.k_true, spec.n);
    Matrix a = b * c;
    if (spec.noise > 0.0) a += spec.noise * gaussian(spec.d, spec.n);
    out.data = ColumnMatrix(std::move(a));
    return out;
  }
  const Matrix centers = (spec.separation / std::sqrt(static_cast<double>(spec.d))) * gaussian(spec.d, spec.k_true);
  std::vector<double> weights(static_cast<std::size_t>(spec.k_true));
  for (std::size_t c = 0; c < weights.size(); ++c) {
    weights[c] = std::pow(static_cast<double>(c + 1), -spec.imbalance);
  }
  // Every blob gets at least one point; the rest follow the weights.
  const auto extra = rng.multinomial(weights, static_cast<std::size_t>(spec.n - spec.k_true));
  for (std::size_t c = 0; c < weights.size(); ++c) {
    out.labels.insert(out.labels.end(), extra[c] + 1, static_cast<int>(c));
  }
  Matrix a(spec.d, spec.n);
  for (Index j = 0; j < spec.n; ++j) {
    a.col(j) = centers.col(out.labels[static_cast<std::size_t>(j)]);
    for (Index i = 0; i < spec.d; ++i) a(i, j) += spec.noise * rng.normal();
  }
  out.data = ColumnMatrix(std::move(a));
  return out;
}

}  // namespace diskpca
