#include "nfmusic/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

namespace nfmusic::io {

namespace {

constexpr char kMagic[8] = {'N', 'F', 'O', 'B', 'S', '0', '0', '1'};

static_assert(std::endian::native == std::endian::little, "binary dumps assume little-endian");

template <typename T>
void put(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& is) {
  T value{};
  if (!is.read(reinterpret_cast<char*>(&value), sizeof value)) {
    throw ConfigError("observation dump is truncated");
  }
  return value;
}

Json pair(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex unpair(const Json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError("expected a [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) {
    return "NA";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json steering_to_json(const SteeringVector& a) {
  Json entries = Json::array();
  for (Eigen::Index n = 0; n < a.size(); ++n) {
    entries.push_back(pair(a.entries(n)));
  }
  return Json{{"curvature", a.curvature}, {"entries", entries}};
}

CVector steering_from_json(const Json& j) {
  const Json& entries = j.at("entries");
  CVector out(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t n = 0; n < entries.size(); ++n) {
    out(static_cast<Eigen::Index>(n)) = unpair(entries[n]);
  }
  return out;
}

void write_spectrum_csv(std::ostream& os, const SpectrumGrid& spectrum) {
  os << "u,r,P\n";
  const std::size_t n_rng = spectrum.range_count();
  for (std::size_t i = 0; i < spectrum.directions.size(); ++i) {
    for (std::size_t j = 0; j < n_rng; ++j) {
      os << format_double(spectrum.directions[i]) << ','
         << (spectrum.direction_only() ? "NA" : format_double(spectrum.ranges[j])) << ','
         << format_double(spectrum.at(i, j)) << '\n';
    }
  }
}

Json estimates_to_json(const Estimates& est) {
  Json out = Json::array();
  for (const Peak& p : est.peaks) {
    out.push_back(Json{{"u", p.direction},
                       {"r", p.range ? Json(*p.range) : Json(nullptr)},
                       {"value", p.value},
                       {"mode", std::string(mode_name(est.mode))}});
  }
  return out;
}

Json observations_to_json(const ObservationSet& obs) {
  Json data = Json::array();
  for (const CMatrix& y : obs.stacked) {
    Json rows = Json::array();
    for (Eigen::Index n = 0; n < y.rows(); ++n) {
      Json row = Json::array();
      for (Eigen::Index t = 0; t < y.cols(); ++t) {
        row.push_back(pair(y(n, t)));
      }
      rows.push_back(std::move(row));
    }
    data.push_back(std::move(rows));
  }
  return Json{{"subcarriers", obs.subcarriers()},
              {"antennas", obs.antennas()},
              {"snapshots", obs.snapshots()},
              {"noise_power", obs.noise_power},
              {"outside_visible", obs.outside_visible},
              {"data", data}};
}

ObservationSet observations_from_json(const Json& j) {
  ObservationSet obs;
  const int m_count = j.at("subcarriers").get<int>();
  const int n_count = j.at("antennas").get<int>();
  const int t_count = j.at("snapshots").get<int>();
  obs.noise_power = j.at("noise_power").get<double>();
  obs.outside_visible = j.value("outside_visible", false);
  const Json& data = j.at("data");
  if (static_cast<int>(data.size()) != m_count) {
    throw ConfigError("observation JSON: subcarrier count mismatch");
  }
  for (const Json& rows : data) {
    if (static_cast<int>(rows.size()) != n_count) {
      throw ConfigError("observation JSON: antenna count mismatch");
    }
    CMatrix y(n_count, t_count);
    for (int n = 0; n < n_count; ++n) {
      if (static_cast<int>(rows[n].size()) != t_count) {
        throw ConfigError("observation JSON: snapshot count mismatch");
      }
      for (int t = 0; t < t_count; ++t) {
        y(n, t) = unpair(rows[n][t]);
      }
    }
    obs.stacked.push_back(std::move(y));
  }
  return obs;
}

void write_observations_binary(std::ostream& os, const ObservationSet& obs) {
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(obs.subcarriers()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(obs.antennas()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(obs.snapshots()));
  put<double>(os, obs.noise_power);
  for (const CMatrix& y : obs.stacked) {
    for (Eigen::Index n = 0; n < y.rows(); ++n) {
      for (Eigen::Index t = 0; t < y.cols(); ++t) {
        put<double>(os, y(n, t).real());
        put<double>(os, y(n, t).imag());
      }
    }
  }
}

ObservationSet read_observations_binary(std::istream& is) {
  char magic[sizeof kMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw ConfigError("not an observation dump");
  }
  const auto m_count = get<std::uint32_t>(is);
  const auto n_count = get<std::uint32_t>(is);
  const auto t_count = get<std::uint32_t>(is);
  ObservationSet obs;
  obs.noise_power = get<double>(is);
  for (std::uint32_t m = 0; m < m_count; ++m) {
    CMatrix y(n_count, t_count);
    for (std::uint32_t n = 0; n < n_count; ++n) {
      for (std::uint32_t t = 0; t < t_count; ++t) {
        const double re = get<double>(is);
        const double im = get<double>(is);
        y(n, t) = {re, im};
      }
    }
    obs.stacked.push_back(std::move(y));
  }
  return obs;
}

}  // namespace nfmusic::io
