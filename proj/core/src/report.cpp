#include "geoscale/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace geoscale {
namespace {

using nlohmann::ordered_json;

ordered_json number_or_null(double value) {
  return std::isfinite(value) ? ordered_json(value) : ordered_json(nullptr);
}

} // namespace

std::string format_double(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void write_curve_csv(std::ostream& out, const DistortionCurve& curve) {
  out << "epsilon,distortion,n_evaluated,n_failed\n";
  for (const auto& r : curve.results) {
    out << format_double(r.epsilon) << ',' << format_double(r.distortion) << ','
        << r.per_point.size() << ',' << r.failures.size() << '\n';
  }
}

void write_reconstruction_csv(std::ostream& out, const ReconstructionCurve& curve) {
  out << "epsilon,reconstruction_error\n";
  for (std::size_t g = 0; g < curve.grid.size(); ++g) {
    out << format_double(curve.grid[g]) << ',' << format_double(curve.errors[g]) << '\n';
  }
}

void write_profile_csv(std::ostream& out, const SingularValueProfile& profile) {
  out << "epsilon";
  for (std::size_t k = 0; k < profile.count(); ++k) {
    out << ",s" << (k + 1);
  }
  out << '\n';
  for (std::size_t g = 0; g < profile.grid.size(); ++g) {
    out << format_double(profile.grid[g]);
    for (const auto& seq : profile.values) {
      out << ',' << format_double(seq[g]);
    }
    out << '\n';
  }
}

void write_smoothing_csv(std::ostream& out, const SmoothingCurve& curve) {
  out << "epsilon,delta,argmin_eps_star\n";
  for (std::size_t g = 0; g < curve.grid.size(); ++g) {
    out << format_double(curve.grid[g]) << ',' << format_double(curve.delta[g]) << ','
        << (curve.argmin_star[g] ? format_double(curve.star_grid[*curve.argmin_star[g]])
                                 : std::string("nan"))
        << '\n';
  }
}

std::string curve_to_json(const DistortionCurve& curve) {
  ordered_json doc;
  doc["d_prime"] = curve.d_prime;
  doc["n_prime"] = curve.n_prime;
  doc["seed"] = curve.seed;
  doc["metric"] = curve.options.form == MetricForm::dual ? "dual" : "inverse";
  doc["squared"] = curve.options.squared;
  doc["eps_hat"] = curve.eps_hat;
  doc["eps_hat_index"] = curve.eps_hat_index;
  doc["grid"] = curve.grid.values();
  doc["eval_indices"] = curve.eval_indices;

  ordered_json results = ordered_json::array();
  for (const auto& r : curve.results) {
    ordered_json entry;
    entry["epsilon"] = r.epsilon;
    entry["distortion"] = number_or_null(r.distortion);
    entry["reliable"] = r.reliable;
    entry["n_evaluated"] = r.per_point.size();
    entry["n_failed"] = r.failures.size();
    entry["failures"] = r.failures;
    ordered_json points = ordered_json::array();
    for (const auto& p : r.per_point) {
      points.push_back({{"index", p.index}, {"norm", number_or_null(p.norm)}});
    }
    entry["per_point"] = std::move(points);
    results.push_back(std::move(entry));
  }
  doc["results"] = std::move(results);
  return doc.dump(2) + "\n";
}

} // namespace geoscale
