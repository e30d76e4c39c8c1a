#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

// Curve: a grid of abscissae with values and standard errors, the common
// carrier for estimator output and analytic overlays, plus its CSV form
// ('# key=value' comment header, then 'abscissa,value,stderr' rows printed
// with 17 significant digits).

namespace ege {

enum class CurveKind { form_factor, number_variance, spacing_pdf, density };

std::string to_string(CurveKind kind);
CurveKind curve_kind_from_string(const std::string& s);

struct Curve {
  Eigen::ArrayXd abscissa;
  Eigen::ArrayXd values;
  Eigen::ArrayXd stderrs;  // zero-length means "no error bars" (treated as 0)
  CurveKind kind = CurveKind::number_variance;

  void validate() const;  // strictly increasing abscissa, stderrs >= 0
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

void write_curve_csv(const std::filesystem::path& path, const Curve& curve,
                     const Metadata& metadata = {});

/// Same payload as the CSV writer in JSON form:
/// {"kind", "metadata", "rows": [[abscissa, value, stderr], ...]}.
void write_curve_json(const std::filesystem::path& path, const Curve& curve,
                      const Metadata& metadata = {});

struct CurveFile {
  Curve curve;
  Metadata metadata;
};

CurveFile read_curve_csv(const std::filesystem::path& path);

/// Grid helpers for CLI specs "lin:a:b:n" and "log:a:b:n".
Eigen::ArrayXd parse_grid(const std::string& spec);

}  // namespace ege
