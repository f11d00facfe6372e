#include "cecib/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include <Eigen/Eigenvalues>

#include "cecib/error.hpp"

namespace cecib {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::optional<double> parse_real(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

LoadedData parse_csv(std::istream& in, const std::optional<std::string>& label_column,
                     const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Parse, source + ": missing header row");
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  std::vector<std::string> header;
  for (auto cell : split(line)) header.emplace_back(cell);

  std::optional<std::size_t> label_index;
  if (label_column) {
    const auto it = std::find(header.begin(), header.end(), *label_column);
    if (it == header.end()) {
      fail(ErrorKind::Configuration,
           source + ": label column '" + *label_column + "' not found in header");
    }
    label_index = static_cast<std::size_t>(it - header.begin());
  }
  const std::size_t columns = header.size();
  const std::size_t dims = columns - (label_index ? 1 : 0);
  if (dims == 0) fail(ErrorKind::Parse, source + ": no feature columns");

  LoadedData out;
  for (std::size_t c = 0; c < columns; ++c) {
    if (c != label_index) out.data.feature_names.push_back(header[c]);
  }

  std::vector<double> values;
  std::map<std::string, std::size_t, std::less<>> categories;
  std::size_t row = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != columns) {
      fail(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": expected " +
                                 std::to_string(columns) + " cells, found " +
                                 std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < columns; ++c) {
      if (c == label_index) {
        if (cells[c].empty()) {
          out.side.labels.emplace_back();
          continue;
        }
        auto it = categories.find(cells[c]);
        if (it == categories.end()) {
          it = categories.emplace(std::string(cells[c]), categories.size()).first;
          out.category_names.emplace_back(cells[c]);
        }
        out.side.labels.emplace_back(it->second);
        continue;
      }
      const auto value = parse_real(cells[c]);
      if (!value) {
        fail(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": column '" +
                                   header[c] + "' is not a finite number: '" +
                                   std::string(cells[c]) + "'");
      }
      values.push_back(*value);
    }
    if (!label_index) out.side.labels.emplace_back();
    ++row;
  }
  if (row == 0) fail(ErrorKind::Parse, source + ": no data rows");

  out.data.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(dims));
  out.side.categories = categories.size();
  return out;
}

LoadedData load_csv(const std::string& path, const std::optional<std::string>& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  return parse_csv(in, label_column, path);
}

PcaModel pca_fit(const Dataset& data, std::size_t d) {
  validate(data);
  if (d == 0 || d > data.dims()) {
    fail(ErrorKind::Configuration, "PCA dimension must lie in 1.." + std::to_string(data.dims()));
  }
  PcaModel model;
  model.center = data.values.colwise().mean().transpose();
  const Matrix centered = data.values.rowwise() - model.center.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(data.rows());

  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::DegenerateModel, "eigen-decomposition of the covariance failed");
  }
  // Eigen returns ascending eigenvalues.
  const Eigen::Index n_dims = static_cast<Eigen::Index>(data.dims());
  model.eigenvalues = solver.eigenvalues().reverse();
  model.components.resize(n_dims, static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j) {
    Vector axis = solver.eigenvectors().col(n_dims - 1 - j);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0.0) axis = -axis;
    model.components.col(j) = axis;
  }
  return model;
}

Dataset pca_reduce(const Dataset& data, std::size_t d) {
  const PcaModel model = pca_fit(data, d);
  Dataset out;
  out.values = (data.values.rowwise() - model.center.transpose()) * model.components;
  for (std::size_t j = 0; j < d; ++j) out.feature_names.push_back("pc" + std::to_string(j + 1));
  return out;
}

void write_file_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) fail(ErrorKind::Io, "write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::Io, "cannot move output into place at '" + path + "'");
  }
}

}  // namespace cecib
