#include "hte/data.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hte/rng.hpp"

namespace hte {

void Sample::validate() const {
  const int nn = n();
  if (nn < 2) throw ValidationError("need at least 2 rows");
  if (x.rows() != nn || a.size() != nn)
    throw ValidationError("column lengths differ");
  if (s.empty()) throw ValidationError("effect-modifier set s is empty");
  for (int j : s)
    if (j < 0 || j >= p())
      throw ValidationError("effect-modifier index out of bounds");
  int n1 = 0;
  for (int i = 0; i < nn; ++i) {
    if (a[i] != 0 && a[i] != 1)
      throw ValidationError("treatment value outside {0,1} at row " +
                            std::to_string(i + 1));
    n1 += a[i];
    if (!std::isfinite(y[i]))
      throw ValidationError("non-finite outcome at row " + std::to_string(i + 1));
  }
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < p(); ++j)
      if (!std::isfinite(x(i, j)))
        throw ValidationError("non-finite covariate at row " +
                              std::to_string(i + 1));
  if (n1 == 0 || n1 == nn) throw ValidationError("single treatment arm");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_cell(const std::string& tok, int row, const std::string& col) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  // require the whole token to be consumed and the value finite
  while (end && *end == ' ') ++end;
  if (tok.empty() || end == begin || (end && *end != '\0') || !std::isfinite(v))
    throw ValidationError("cannot parse value '" + tok + "' at row " +
                          std::to_string(row) + ", column " + col);
  return v;
}

}  // namespace

Sample load_csv(const std::string& path,
                const std::vector<std::string>& modifier_columns) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty file: " + path);
  const auto header = split_line(line);
  int y_col = -1, a_col = -1;
  std::vector<int> x_cols(header.size(), -1);  // x index per column
  int p = 0;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string& h = header[j];
    if (h == "y") {
      if (y_col >= 0) throw ValidationError("duplicate column y");
      y_col = static_cast<int>(j);
    } else if (h == "a") {
      if (a_col >= 0) throw ValidationError("duplicate column a");
      a_col = static_cast<int>(j);
    } else if (h.size() > 1 && h[0] == 'x') {
      int k = 0;
      try {
        k = std::stoi(h.substr(1));
      } catch (...) {
        throw ValidationError("unrecognized column '" + h + "'");
      }
      if (k < 1) throw ValidationError("unrecognized column '" + h + "'");
      x_cols[j] = k - 1;
      p = std::max(p, k);
    } else {
      throw ValidationError("unrecognized column '" + h + "'");
    }
  }
  if (y_col < 0) throw ValidationError("missing column y");
  if (a_col < 0) throw ValidationError("missing column a");
  std::vector<bool> seen(p, false);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (x_cols[j] >= 0) {
      if (seen[x_cols[j]])
        throw ValidationError("duplicate column " + header[j]);
      seen[x_cols[j]] = true;
    }
  }
  for (int k = 0; k < p; ++k)
    if (!seen[k])
      throw ValidationError("missing column x" + std::to_string(k + 1));
  if (p == 0) throw ValidationError("no covariate columns x1..xp");

  std::vector<double> ys, xs;
  std::vector<int> as;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() && in.eof()) break;
    const auto toks = split_line(line);
    if (toks.size() != header.size())
      throw ValidationError("row " + std::to_string(row) + " has " +
                            std::to_string(toks.size()) + " fields, expected " +
                            std::to_string(header.size()));
    double yv = 0.0, av = 0.0;
    std::vector<double> xv(p, 0.0);
    for (std::size_t j = 0; j < toks.size(); ++j) {
      const double v = parse_cell(toks[j], row, header[j]);
      if (static_cast<int>(j) == y_col) yv = v;
      else if (static_cast<int>(j) == a_col) av = v;
      else xv[x_cols[j]] = v;
    }
    if (av != 0.0 && av != 1.0)
      throw ValidationError("treatment value " + toks[a_col] +
                            " outside {0,1} at row " + std::to_string(row));
    ys.push_back(yv);
    as.push_back(static_cast<int>(av));
    for (double v : xv) xs.push_back(v);
  }

  const int n = static_cast<int>(ys.size());
  Sample sm;
  sm.y = Eigen::Map<Vec>(ys.data(), n);
  sm.a = Eigen::Map<Eigen::VectorXi>(as.data(), n);
  sm.x = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                  Eigen::RowMajor>>(xs.data(), n, p);

  for (const std::string& name : modifier_columns) {
    bool found = false;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name && x_cols[j] >= 0) {
        sm.s.push_back(x_cols[j]);
        found = true;
        break;
      }
    }
    if (!found)
      throw ValidationError("modifier column '" + name + "' not in header");
  }
  sm.validate();
  return sm;
}

void write_csv(const Sample& sample, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open file for writing: " + path);
  out << "y,a";
  for (int j = 0; j < sample.p(); ++j) out << ",x" << (j + 1);
  out << "\n";
  char buf[64];
  for (int i = 0; i < sample.n(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", sample.y[i]);
    out << buf << "," << sample.a[i];
    for (int j = 0; j < sample.p(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", sample.x(i, j));
      out << "," << buf;
    }
    out << "\n";
  }
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> split_folds(
    int n, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("fold count must be >= 2");
  if (k > n) throw ValidationError("fold count exceeds sample size");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  RandomStream rs(seed, {0x666f6c64ULL});  // "fold" stream
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rs.uniform_int(i + 1));
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::pair<std::vector<int>, std::vector<int>>> folds(k);
  const int base = n / k, extra = n % k;
  int pos = 0;
  for (int f = 0; f < k; ++f) {
    const int size = base + (f < extra ? 1 : 0);
    std::vector<int> eval(idx.begin() + pos, idx.begin() + pos + size);
    pos += size;
    std::sort(eval.begin(), eval.end());
    std::vector<int> train;
    train.reserve(n - size);
    std::vector<bool> in_eval(n, false);
    for (int i : eval) in_eval[i] = true;
    for (int i = 0; i < n; ++i)
      if (!in_eval[i]) train.push_back(i);
    folds[f] = {std::move(train), std::move(eval)};
  }
  return folds;
}

}  // namespace hte
