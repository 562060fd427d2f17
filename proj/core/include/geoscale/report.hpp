#pragma once

#include <iosfwd>
#include <string>

#include "geoscale/baselines.hpp"
#include "geoscale/distortion.hpp"
#include "geoscale/embedding.hpp"

namespace geoscale {

// CSV writers use fixed headers:
//   curve:      epsilon,distortion,n_evaluated,n_failed
//   rec:        epsilon,reconstruction_error
//   profile:    epsilon,s1,...,sK
//   smoothing:  epsilon,delta,argmin_eps_star
void write_curve_csv(std::ostream& out, const DistortionCurve& curve);
void write_reconstruction_csv(std::ostream& out, const ReconstructionCurve& curve);
void write_profile_csv(std::ostream& out, const SingularValueProfile& profile);
void write_smoothing_csv(std::ostream& out, const SmoothingCurve& curve);

/// Full curve with per-point detail, pretty-printed JSON.
std::string curve_to_json(const DistortionCurve& curve);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

} // namespace geoscale
