#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "nfmusic/array_model.hpp"
#include "nfmusic/estimator.hpp"
#include "nfmusic/scene.hpp"

namespace nfmusic::io {

using Json = nlohmann::ordered_json;

// {"curvature": zeta, "entries": [[re, im], ...]}
Json steering_to_json(const SteeringVector& a);
CVector steering_from_json(const Json& j);

// Header u,r,P; row-major over (direction, range). r is NA for
// direction-only spectra.
void write_spectrum_csv(std::ostream& os, const SpectrumGrid& spectrum);

// [{"u": .., "r": .. | null, "value": .., "mode": ".."}, ...]
Json estimates_to_json(const Estimates& est);

// Y_m tensors as M x N x T nested [re, im] pairs.
Json observations_to_json(const ObservationSet& obs);
ObservationSet observations_from_json(const Json& j);

// Binary dump: "NFOBS001", uint32 M, N, T, float64 noise power, then
// M * N * T complex doubles (re, im), index order (m, n, t). Little-endian.
void write_observations_binary(std::ostream& os, const ObservationSet& obs);
ObservationSet read_observations_binary(std::istream& is);

std::string format_double(double x);

}  // namespace nfmusic::io
