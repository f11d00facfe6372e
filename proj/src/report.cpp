#include "cecib/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "cecib/error.hpp"
#include "cecib/io.hpp"
#include "cecib/theory.hpp"

namespace cecib {

namespace {

constexpr std::string_view kMagic = "cecib-report 1";

std::string real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& items, auto&& format) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += format(items[i]);
  }
  return out;
}

std::optional<double> to_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> to_int(std::string_view s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = s.find(sep, start);
    out.push_back(s.substr(start, at == std::string_view::npos ? at : at - start));
    if (at == std::string_view::npos) return out;
    start = at + 1;
  }
}

bool has_newline(const std::string& s) { return s.find_first_of("\r\n") != std::string::npos; }

const std::string& field(const std::map<std::string, std::string>& fields,
                         const std::string& key) {
  const auto it = fields.find(key);
  if (it == fields.end()) fail(ErrorKind::Parse, "report is missing '" + key + "'");
  return it->second;
}

template <class Int>
Int int_field(const std::map<std::string, std::string>& fields, const std::string& key) {
  const auto v = to_int<Int>(field(fields, key));
  if (!v) fail(ErrorKind::Parse, "report field '" + key + "' is not an integer");
  return *v;
}

double real_field(const std::map<std::string, std::string>& fields, const std::string& key) {
  const auto v = to_real(field(fields, key));
  if (!v) fail(ErrorKind::Parse, "report field '" + key + "' is not a number");
  return *v;
}

}  // namespace

double parse_beta(const std::string& text) {
  if (text == "auto:halves") return beta0_gaussian_halves();
  const auto v = to_real(text);
  if (!v || !(*v >= 0.0) || !std::isfinite(*v)) {
    fail(ErrorKind::Configuration,
         "beta must be a non-negative number or 'auto:halves', got '" + text + "'");
  }
  return *v;
}

void validate(const RunManifest& m) {
  if (m.input.empty()) fail(ErrorKind::Configuration, "an input file is required");
  if (m.label_column && m.label_column->empty()) {
    fail(ErrorKind::Configuration, "label column name must not be empty");
  }
  for (const std::string* s : {&m.input, &m.output, &m.beta_text}) {
    if (has_newline(*s)) fail(ErrorKind::Configuration, "manifest strings must be single-line");
  }
  if (m.label_column && has_newline(*m.label_column)) {
    fail(ErrorKind::Configuration, "manifest strings must be single-line");
  }
  if (parse_beta(m.beta_text) != m.beta) {
    fail(ErrorKind::Configuration, "beta value does not match its text form");
  }
  if (m.pca_dims && *m.pca_dims == 0) fail(ErrorKind::Configuration, "--pca must be positive");
  FitConfig config = to_fit_config(m);
  validate(config, 0);
}

FitConfig to_fit_config(const RunManifest& m) {
  FitConfig config;
  config.beta = m.beta;
  config.k_init = m.k_init;
  config.epsilon = m.epsilon;
  config.restarts = m.restarts;
  config.max_epochs = m.max_epochs;
  config.seed = m.seed;
  config.ridge = m.ridge;
  return config;
}

void write_report(std::ostream& out, const RunManifest& m, const FitReport& report,
                  double conditional_entropy, std::size_t dims) {
  out << kMagic << '\n';
  out << "manifest.input=" << m.input << '\n';
  out << "manifest.label_col=" << m.label_column.value_or("") << '\n';
  out << "manifest.beta=" << m.beta_text << '\n';
  out << "manifest.beta_value=" << real(m.beta) << '\n';
  out << "manifest.k_init=" << m.k_init << '\n';
  out << "manifest.epsilon=" << real(m.epsilon) << '\n';
  out << "manifest.restarts=" << m.restarts << '\n';
  out << "manifest.max_epochs=" << m.max_epochs << '\n';
  out << "manifest.seed=" << m.seed << '\n';
  out << "manifest.ridge=" << (m.ridge ? real(*m.ridge) : std::string("auto")) << '\n';
  out << "manifest.pca=" << (m.pca_dims ? std::to_string(*m.pca_dims) : std::string("none"))
      << '\n';
  out << "manifest.output=" << m.output << '\n';

  const auto& runs = report.restarts;
  out << "result.n=" << report.clustering.size() << '\n';
  out << "result.dims=" << dims << '\n';
  out << "result.k=" << report.clustering.k << '\n';
  out << "result.ridge=" << real(report.ridge) << '\n';
  out << "result.winning_restart=" << report.restart_index << '\n';
  out << "result.epochs_run=" << report.epochs_run << '\n';
  out << "result.moves_made=" << report.moves_made << '\n';
  out << "result.clusters_deleted=" << report.clusters_deleted << '\n';
  out << "result.epochs_per_restart="
      << join(runs, [](const RunSummary& r) { return std::to_string(r.epochs); }) << '\n';
  out << "result.k_per_restart="
      << join(runs, [](const RunSummary& r) { return std::to_string(r.final_k); }) << '\n';
  out << "result.cost_per_restart="
      << join(runs, [](const RunSummary& r) { return real(r.total); }) << '\n';

  out << "cost.partition_term=" << real(report.cost.partition_term) << '\n';
  out << "cost.model_term=" << real(report.cost.model_term) << '\n';
  out << "cost.conditional_entropy=" << real(conditional_entropy) << '\n';
  out << "cost.beta=" << real(report.cost.beta) << '\n';
  out << "cost.side_contribution=" << real(report.cost.beta * report.cost.side_term) << '\n';
  out << "cost.total=" << real(report.cost.total) << '\n';
  out << "cost.trace=" << join(report.cost_trace, [](double v) { return real(v); }) << '\n';

  out << "assignment.begin\n";
  for (std::size_t a : report.clustering.assignment) out << a << '\n';
  out << "assignment.end\n";
}

ParsedReport read_report(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    fail(ErrorKind::Parse, "not a cecib report (bad first line)");
  }
  ParsedReport parsed;
  bool in_assignment = false;
  bool finished = false;
  while (std::getline(in, line)) {
    if (in_assignment) {
      if (line == "assignment.end") {
        finished = true;
        break;
      }
      const auto v = to_int<std::size_t>(line);
      if (!v) fail(ErrorKind::Parse, "bad assignment line '" + line + "'");
      parsed.clustering.assignment.push_back(*v);
      continue;
    }
    if (line == "assignment.begin") {
      in_assignment = true;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Parse, "bad report line '" + line + "'");
    parsed.fields[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (!finished) fail(ErrorKind::Parse, "report has no complete assignment block");

  const auto& f = parsed.fields;
  RunManifest& m = parsed.manifest;
  m.input = field(f, "manifest.input");
  if (const auto& l = field(f, "manifest.label_col"); !l.empty()) m.label_column = l;
  m.beta_text = field(f, "manifest.beta");
  m.beta = parse_beta(m.beta_text);
  m.k_init = int_field<std::size_t>(f, "manifest.k_init");
  m.epsilon = real_field(f, "manifest.epsilon");
  m.restarts = int_field<std::size_t>(f, "manifest.restarts");
  m.max_epochs = int_field<std::size_t>(f, "manifest.max_epochs");
  m.seed = int_field<std::uint64_t>(f, "manifest.seed");
  if (field(f, "manifest.ridge") != "auto") m.ridge = real_field(f, "manifest.ridge");
  if (field(f, "manifest.pca") != "none") m.pca_dims = int_field<std::size_t>(f, "manifest.pca");
  m.output = field(f, "manifest.output");

  parsed.clustering.k = int_field<std::size_t>(f, "result.k");
  if (parsed.clustering.size() != int_field<std::size_t>(f, "result.n")) {
    fail(ErrorKind::Parse, "assignment block length does not match result.n");
  }
  validate(parsed.clustering);
  return parsed;
}

ParsedReport read_report_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  return read_report(in);
}

RunOutcome run(const RunManifest& manifest) {
  validate(manifest);
  LoadedData loaded = load_csv(manifest.input, manifest.label_column);
  if (manifest.pca_dims) loaded.data = pca_reduce(loaded.data, *manifest.pca_dims);

  RunOutcome outcome;
  outcome.report = fit(loaded.data, loaded.side, to_fit_config(manifest));
  const double h_zy = conditional_entropy_or_zero(outcome.report.clustering, loaded.side);
  std::ostringstream doc;
  write_report(doc, manifest, outcome.report, h_zy, loaded.data.dims());
  outcome.document = doc.str();
  if (!manifest.output.empty()) write_file_atomically(manifest.output, outcome.document);
  return outcome;
}

ProtocolGrid parse_grid_spec(const std::string& spec) {
  std::vector<double> fractions{0.0};
  std::vector<double> noise{0.0};
  ProtocolGrid grid;
  grid.betas = {1.0};
  std::optional<std::vector<std::size_t>> classes;

  auto reals = [](std::string_view list, auto&& convert) {
    std::vector<double> out;
    for (auto item : split(list, ',')) out.push_back(convert(item));
    return out;
  };
  auto fraction = [](std::string_view s) {
    const auto v = to_real(s);
    if (!v || !(*v >= 0.0 && *v <= 1.0)) {
      fail(ErrorKind::Configuration, "grid fraction '" + std::string(s) + "' not in [0, 1]");
    }
    return *v;
  };

  if (spec.empty()) fail(ErrorKind::Configuration, "empty grid spec");
  for (auto part : split(spec, ';')) {
    if (part.empty()) continue;
    const std::size_t eq = part.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::Configuration, "grid spec entry '" + std::string(part) + "' lacks '='");
    }
    const std::string_view key = part.substr(0, eq);
    const std::string_view value = part.substr(eq + 1);
    if (key == "fractions") {
      fractions = reals(value, fraction);
    } else if (key == "noise") {
      noise = reals(value, fraction);
    } else if (key == "betas") {
      grid.betas = reals(value, [](std::string_view s) { return parse_beta(std::string(s)); });
    } else if (key == "classes") {
      classes.emplace();
      for (auto item : split(value, ',')) {
        const auto c = to_int<std::size_t>(item);
        if (!c) fail(ErrorKind::Configuration, "bad class index '" + std::string(item) + "'");
        classes->push_back(*c);
      }
    } else if (key == "reps") {
      const auto r = to_int<std::size_t>(value);
      if (!r || *r == 0) fail(ErrorKind::Configuration, "reps must be a positive integer");
      grid.repetitions = *r;
    } else {
      fail(ErrorKind::Configuration, "unknown grid key '" + std::string(key) + "'");
    }
  }
  for (double f : fractions) {
    for (double e : noise) {
      LabelProtocol p;
      p.labeled_fraction = f;
      p.noise_fraction = e;
      p.class_subset = classes;
      grid.protocols.push_back(p);
    }
  }
  return grid;
}

GridOutcome run_grid(const RunManifest& manifest, const std::string& spec) {
  validate(manifest);
  if (!manifest.label_column) {
    fail(ErrorKind::Configuration, "grid runs need --label-col with the true classes");
  }
  const ProtocolGrid grid = parse_grid_spec(spec);
  LoadedData loaded = load_csv(manifest.input, manifest.label_column);
  if (loaded.side.labeled_count() != loaded.data.rows()) {
    fail(ErrorKind::Configuration, "grid runs need a true class on every row");
  }
  if (manifest.pca_dims) loaded.data = pca_reduce(loaded.data, *manifest.pca_dims);
  Clustering truth{std::vector<std::size_t>(loaded.data.rows()), loaded.side.categories};
  for (std::size_t i = 0; i < truth.size(); ++i) truth.assignment[i] = *loaded.side.labels[i];

  GridOutcome outcome;
  outcome.rows = run_protocol_grid(loaded.data, truth, grid, to_fit_config(manifest));
  std::ostringstream table;
  write_grid_table(table, outcome.rows);
  outcome.table = table.str();
  if (!manifest.output.empty()) write_file_atomically(manifest.output, outcome.table);
  return outcome;
}

}  // namespace cecib
