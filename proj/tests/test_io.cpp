#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include "cecib/error.hpp"
#include "cecib/eval.hpp"
#include "cecib/io.hpp"
#include "cecib/report.hpp"
#include "cecib/theory.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cecib;

namespace {

LoadedData parse(const std::string& text, std::optional<std::string> label = std::nullopt) {
  std::istringstream in(text);
  return parse_csv(in, label, "test.csv");
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidInput;
}

std::string tmp(const std::string& name) { return std::string(CECIB_TEST_TMPDIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_mixture_csv(const std::string& path, std::size_t n, std::uint64_t seed) {
  auto at = [](double x, double y) {
    Vector v(2);
    v << x, y;
    return v;
  };
  const auto [data, truth] = gaussian_mixture_sample(
      {{0.5, at(0, 0), Matrix::Identity(2, 2)}, {0.5, at(6, 1), Matrix::Identity(2, 2)}}, n, seed);
  std::ofstream out(path);
  out.precision(17);
  out << "a,b,cls\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << data.values(static_cast<Eigen::Index>(i), 0) << ','
        << data.values(static_cast<Eigen::Index>(i), 1) << ','
        << (i % 3 == 0 ? (truth.assignment[i] ? "right" : "left") : "") << '\n';
  }
}

}  // namespace

TEST_CASE("csv without a label column") {
  const auto loaded = parse("x,y\n1,2\n3,4\n-5.5,6e1\n");
  CHECK(loaded.data.rows() == 3);
  CHECK(loaded.data.dims() == 2);
  CHECK(loaded.data.values(2, 0) == -5.5);
  CHECK(loaded.data.values(2, 1) == 60.0);
  CHECK(loaded.side.labeled_count() == 0);
  CHECK(loaded.data.feature_names == std::vector<std::string>{"x", "y"});
}

TEST_CASE("csv label column maps categories by first appearance") {
  const auto loaded = parse("f,label,g\n1,a,2\n3,,4\n5,a,6\n7,b,8\n", "label");
  CHECK(loaded.data.dims() == 2);
  CHECK(loaded.side.categories == 2);
  CHECK(loaded.side.labels[0] == 0u);
  CHECK_FALSE(loaded.side.labels[1].has_value());
  CHECK(loaded.side.labels[2] == 0u);
  CHECK(loaded.side.labels[3] == 1u);
  CHECK(loaded.category_names == std::vector<std::string>{"a", "b"});
  CHECK(loaded.data.values(3, 1) == 8.0);
}

TEST_CASE("csv errors") {
  CHECK(kind_of([] { parse("x,y\n1,2\n3\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse("x,y\n1,oops\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse("x,y\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse("x,y\n1,2\n", "label"); }) == ErrorKind::Configuration);
  CHECK(kind_of([] { load_csv(tmp("does-not-exist.csv"), std::nullopt); }) == ErrorKind::Io);
  try {
    parse("x,y\n1,2\n3,abc\n");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find("test.csv:3:") != std::string::npos);
    CHECK(what.find("column 'y'") != std::string::npos);
  }
}

TEST_CASE("csv tolerates a BOM, CRLF and surrounding blanks") {
  const auto loaded = parse("\xEF\xBB\xBFx, y\r\n 1 , 2\r\n3,4\r\n");
  CHECK(loaded.data.rows() == 2);
  CHECK(loaded.data.values(0, 1) == 2.0);
  CHECK(loaded.data.feature_names[1] == "y");
}

TEST_CASE("full PCA is a rotation") {
  std::mt19937_64 rng(91);
  auto data = oracle::random_dataset(200, 4, rng);
  data.values.col(1) += 0.7 * data.values.col(0);
  const auto model = pca_fit(data, 4);
  CHECK((model.components.transpose() * model.components - Matrix::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() <= 1e-10);
  const auto reduced = pca_reduce(data, 4);
  const Matrix centered = data.values.rowwise() - data.values.colwise().mean();
  CHECK(std::abs(reduced.values.squaredNorm() - centered.squaredNorm()) <=
        1e-8 * centered.squaredNorm());
  for (Eigen::Index j = 0; j < 4; ++j) {
    Eigen::Index arg = 0;
    model.components.col(j).cwiseAbs().maxCoeff(&arg);
    CHECK(model.components(arg, j) > 0.0);
  }
  for (Eigen::Index j = 1; j < 4; ++j) CHECK(model.eigenvalues(j) <= model.eigenvalues(j - 1));
}

TEST_CASE("rank one data is reconstructed exactly") {
  Dataset data;
  data.values.resize(20, 3);
  for (Eigen::Index i = 0; i < 20; ++i) {
    const double t = static_cast<double>(i) - 7.0;
    data.values.row(i) << 1.0 + 2.0 * t, -1.0 + t, 3.0 - 0.5 * t;
  }
  const auto model = pca_fit(data, 1);
  const auto reduced = pca_reduce(data, 1);
  const Matrix rebuilt =
      (reduced.values * model.components.transpose()).rowwise() + model.center.transpose();
  CHECK((rebuilt - data.values).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(reduced.feature_names == std::vector<std::string>{"pc1"});
}

TEST_CASE("retained variance equals the top eigenvalues") {
  std::mt19937_64 rng(92);
  auto data = oracle::random_dataset(300, 5, rng);
  for (Eigen::Index j = 0; j < 5; ++j) data.values.col(j) *= 1.0 + static_cast<double>(j);
  const auto reduced = pca_reduce(data, 2);
  std::vector<std::size_t> all(300);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const Matrix cov = oracle::batch_moments(data, all).second;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  const auto& ev = solver.eigenvalues();  // ascending
  const double retained = reduced.values.squaredNorm() / 300.0;
  CHECK(std::abs(retained - (ev(4) + ev(3))) <= 1e-8);
}

TEST_CASE("pca dimension checks") {
  std::mt19937_64 rng(93);
  const auto data = oracle::random_dataset(10, 3, rng);
  CHECK(kind_of([&] { pca_reduce(data, 4); }) == ErrorKind::Configuration);
  CHECK(kind_of([&] { pca_reduce(data, 0); }) == ErrorKind::Configuration);
}

TEST_CASE("beta parsing") {
  CHECK(parse_beta("0.5") == 0.5);
  CHECK(parse_beta("auto:halves") == beta0_gaussian_halves());
  CHECK(kind_of([] { parse_beta("-1"); }) == ErrorKind::Configuration);
  CHECK(kind_of([] { parse_beta("auto"); }) == ErrorKind::Configuration);
  CHECK(kind_of([] { parse_beta("nan"); }) == ErrorKind::Configuration);
}

TEST_CASE("report round trip and replay") {
  const std::string csv = tmp("io_mixture.csv");
  write_mixture_csv(csv, 120, 94);

  RunManifest m;
  m.input = csv;
  m.label_column = "cls";
  m.beta_text = "auto:halves";
  m.beta = parse_beta(m.beta_text);
  m.k_init = 4;
  m.restarts = 3;
  m.seed = 17;
  m.output = tmp("io_report.txt");
  std::filesystem::remove(m.output);

  const auto outcome = run(m);
  CHECK(slurp(m.output) == outcome.document);
  CHECK(outcome.document.find("manifest.beta=auto:halves\n") != std::string::npos);
  CHECK(outcome.document.find("manifest.beta_value=0.269775913") != std::string::npos);

  const auto parsed = read_report_file(m.output);
  CHECK(parsed.clustering.assignment == outcome.report.clustering.assignment);
  CHECK(parsed.clustering.k == outcome.report.clustering.k);
  CHECK(parsed.manifest.input == m.input);
  CHECK(parsed.manifest.label_column == m.label_column);
  CHECK(parsed.manifest.beta == m.beta);
  CHECK(parsed.manifest.seed == 17);
  CHECK(parsed.manifest.restarts == 3);
  CHECK_FALSE(parsed.manifest.ridge.has_value());
  CHECK(std::stod(parsed.fields.at("cost.total")) == outcome.report.cost.total);

  // The recorded manifest alone reproduces the document byte for byte.
  const auto replayed = run(parsed.manifest);
  CHECK(replayed.document == outcome.document);
}

TEST_CASE("beta zero still reports the conditional entropy") {
  const std::string csv = tmp("io_beta0.csv");
  write_mixture_csv(csv, 90, 95);
  RunManifest m;
  m.input = csv;
  m.label_column = "cls";
  m.beta_text = "0";
  m.beta = 0.0;
  m.k_init = 1;
  m.restarts = 1;
  const auto outcome = run(m);
  std::istringstream in(outcome.document);
  const auto parsed = read_report(in);
  CHECK(std::stod(parsed.fields.at("cost.side_contribution")) == 0.0);
  // One cluster over two labeled classes: H(Z|Y) > 0.
  CHECK(std::stod(parsed.fields.at("cost.conditional_entropy")) > 0.1);
}

TEST_CASE("malformed reports") {
  auto read = [](const std::string& s) {
    std::istringstream in(s);
    return read_report(in);
  };
  CHECK(kind_of([&] { read("hello\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { read("cecib-report 1\nmanifest.input=x\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { read("cecib-report 1\nassignment.begin\nzz\nassignment.end\n"); }) ==
        ErrorKind::Parse);
}

TEST_CASE("grid specs") {
  const auto grid = parse_grid_spec("fractions=0,0.1,0.2;noise=0,0.5;betas=0,auto:halves,1;reps=3");
  CHECK(grid.protocols.size() == 6);
  CHECK(grid.protocols[1].labeled_fraction == 0.0);
  CHECK(grid.protocols[1].noise_fraction == 0.5);
  CHECK(grid.protocols[2].labeled_fraction == 0.1);
  CHECK(grid.betas.size() == 3);
  CHECK(grid.betas[1] == beta0_gaussian_halves());
  CHECK(grid.repetitions == 3);
  const auto defaults = parse_grid_spec("betas=1");
  CHECK(defaults.protocols.size() == 1);
  CHECK(defaults.repetitions == 10);
  CHECK(parse_grid_spec("classes=0,2").protocols[0].class_subset ==
        std::vector<std::size_t>{0, 2});
  CHECK(kind_of([] { parse_grid_spec("fractions=1.5"); }) == ErrorKind::Configuration);
  CHECK(kind_of([] { parse_grid_spec("colour=red"); }) == ErrorKind::Configuration);
  CHECK(kind_of([] { parse_grid_spec("reps=0"); }) == ErrorKind::Configuration);
}

TEST_CASE("grid run needs a full truth column") {
  const std::string csv = tmp("io_grid.csv");
  write_mixture_csv(csv, 60, 96);
  RunManifest m;
  m.input = csv;
  m.label_column = "cls";
  CHECK(kind_of([&] { run_grid(m, "reps=1"); }) == ErrorKind::Configuration);
  m.label_column.reset();
  CHECK(kind_of([&] { run_grid(m, "reps=1"); }) == ErrorKind::Configuration);
}

TEST_CASE("atomic writes leave no temporary behind") {
  const std::string path = tmp("io_atomic.txt");
  write_file_atomically(path, "first\n");
  write_file_atomically(path, "second\n");
  CHECK(slurp(path) == "second\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  CHECK(kind_of([&] { write_file_atomically(tmp("no/such/dir/x.txt"), "x"); }) == ErrorKind::Io);
}
