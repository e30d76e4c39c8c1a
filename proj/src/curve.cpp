#include "ege/curve.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ege {

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::form_factor: return "form_factor";
    case CurveKind::number_variance: return "number_variance";
    case CurveKind::spacing_pdf: return "spacing_pdf";
    case CurveKind::density: return "density";
  }
  return "?";
}

CurveKind curve_kind_from_string(const std::string& s) {
  if (s == "form_factor") return CurveKind::form_factor;
  if (s == "number_variance") return CurveKind::number_variance;
  if (s == "spacing_pdf") return CurveKind::spacing_pdf;
  if (s == "density") return CurveKind::density;
  throw std::invalid_argument("unknown curve kind: " + s);
}

void Curve::validate() const {
  if (abscissa.size() != values.size())
    throw std::invalid_argument("Curve: abscissa/values size mismatch");
  if (stderrs.size() != 0 && stderrs.size() != values.size())
    throw std::invalid_argument("Curve: stderr size mismatch");
  for (Eigen::Index i = 1; i < abscissa.size(); ++i)
    if (!(abscissa[i] > abscissa[i - 1]))
      throw std::invalid_argument("Curve: abscissa not strictly increasing");
  for (Eigen::Index i = 0; i < stderrs.size(); ++i)
    if (!(stderrs[i] >= 0.0))
      throw std::invalid_argument("Curve: negative stderr");
}

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_curve_csv(const std::filesystem::path& path, const Curve& curve,
                     const Metadata& metadata) {
  curve.validate();
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "# kind=" << to_string(curve.kind) << "\n";
  for (const auto& [k, v] : metadata) out << "# " << k << "=" << v << "\n";
  out << "abscissa,value,stderr\n";
  const bool has_err = curve.stderrs.size() != 0;
  for (Eigen::Index i = 0; i < curve.abscissa.size(); ++i) {
    out << fmt17(curve.abscissa[i]) << ',' << fmt17(curve.values[i]) << ','
        << fmt17(has_err ? curve.stderrs[i] : 0.0) << "\n";
  }
  if (!out) throw std::runtime_error("short write to " + path.string());
}

void write_curve_json(const std::filesystem::path& path, const Curve& curve,
                      const Metadata& metadata) {
  curve.validate();
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "{\n  \"kind\": \"" << to_string(curve.kind) << "\",\n  \"metadata\": {";
  for (std::size_t i = 0; i < metadata.size(); ++i) {
    out << (i ? ", " : "") << '"' << metadata[i].first << "\": \""
        << metadata[i].second << '"';
  }
  out << "},\n  \"rows\": [\n";
  const bool has_err = curve.stderrs.size() != 0;
  for (Eigen::Index i = 0; i < curve.abscissa.size(); ++i) {
    out << "    [" << fmt17(curve.abscissa[i]) << ", " << fmt17(curve.values[i])
        << ", " << fmt17(has_err ? curve.stderrs[i] : 0.0) << ']'
        << (i + 1 < curve.abscissa.size() ? ",\n" : "\n");
  }
  out << "  ]\n}\n";
  if (!out) throw std::runtime_error("short write to " + path.string());
}

CurveFile read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CurveFile file;
  std::vector<double> xs, vs, es;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      const auto eq = body.find('=');
      if (eq != std::string::npos) {
        std::string key = body.substr(0, eq);
        std::string val = body.substr(eq + 1);
        while (!key.empty() && key.front() == ' ') key.erase(key.begin());
        while (!key.empty() && key.back() == ' ') key.pop_back();
        if (key == "kind") file.curve.kind = curve_kind_from_string(val);
        file.metadata.emplace_back(key, val);
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column header row
      continue;
    }
    std::istringstream ss(line);
    std::string tok;
    double row[3] = {0, 0, 0};
    for (int c = 0; c < 3 && std::getline(ss, tok, ','); ++c)
      row[c] = std::stod(tok);
    xs.push_back(row[0]);
    vs.push_back(row[1]);
    es.push_back(row[2]);
  }
  file.curve.abscissa = Eigen::Map<Eigen::ArrayXd>(xs.data(), xs.size());
  file.curve.values = Eigen::Map<Eigen::ArrayXd>(vs.data(), vs.size());
  file.curve.stderrs = Eigen::Map<Eigen::ArrayXd>(es.data(), es.size());
  return file;
}

Eigen::ArrayXd parse_grid(const std::string& spec) {
  std::istringstream ss(spec);
  std::string kind, a_s, b_s, n_s;
  if (!std::getline(ss, kind, ':') || !std::getline(ss, a_s, ':') ||
      !std::getline(ss, b_s, ':') || !std::getline(ss, n_s))
    throw std::invalid_argument("grid spec must be lin:a:b:n or log:a:b:n, got '" +
                                spec + "'");
  const double a = std::stod(a_s);
  const double b = std::stod(b_s);
  const int n = std::stoi(n_s);
  if (n < 1 || !(b > a))
    throw std::invalid_argument("grid spec needs b > a and n >= 1: '" + spec + "'");
  Eigen::ArrayXd g(n);
  if (kind == "lin") {
    for (int i = 0; i < n; ++i)
      g[i] = n == 1 ? a : a + (b - a) * i / static_cast<double>(n - 1);
  } else if (kind == "log") {
    if (!(a > 0.0))
      throw std::invalid_argument("log grid needs a > 0: '" + spec + "'");
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i)
      g[i] = std::exp(n == 1 ? la : la + (lb - la) * i / static_cast<double>(n - 1));
  } else {
    throw std::invalid_argument("grid kind must be lin or log: '" + spec + "'");
  }
  return g;
}

}  // namespace ege
