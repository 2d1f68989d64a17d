#ifndef ROBUSTSSM_IO_HPP
#define ROBUSTSSM_IO_HPP

#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "robustssm/rho.hpp"
#include "robustssm/types.hpp"

namespace rssm {

using json = nlohmann::json;

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

// CSV dialect: comma separated, UTF-8, header row of coordinate labels with
// the first column holding the year; empty cell or "NA" marks a missing value.
inline void write_observations_csv(const ObservationSeries& y, std::ostream& os) {
  os << "year";
  for (const auto& l : y.labels) os << ',' << l;
  os << '\n';
  for (int t = 0; t < y.T(); ++t) {
    os << (t < static_cast<int>(y.years.size()) ? y.years[t] : t + 1);
    for (int j = 0; j < y.r(); ++j) {
      os << ',';
      if (y.mask(t, j)) os << format_double(y.values(t, j));
      else os << "NA";
    }
    os << '\n';
  }
}

inline void write_observations_csv(const ObservationSeries& y,
                                   const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  write_observations_csv(y, os);
}

inline ObservationSeries read_observations_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty observation CSV");
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "year")
    throw ConfigError("observation CSV must start with a 'year' column");
  const int r = static_cast<int>(header.size()) - 1;
  std::vector<int> years;
  std::vector<std::vector<double>> vals;
  std::vector<std::vector<bool>> mask;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != r + 1)
      throw ConfigError("observation CSV: ragged row");
    years.push_back(std::stoi(cells[0]));
    std::vector<double> v(r);
    std::vector<bool> m(r);
    for (int j = 0; j < r; ++j) {
      const std::string& c = cells[j + 1];
      if (c.empty() || c == "NA") {
        v[j] = std::numeric_limits<double>::quiet_NaN();
        m[j] = false;
      } else {
        v[j] = std::stod(c);
        m[j] = true;
      }
    }
    vals.push_back(std::move(v));
    mask.push_back(std::move(m));
  }
  ObservationSeries y(static_cast<int>(vals.size()), r);
  y.labels.assign(header.begin() + 1, header.end());
  y.years = std::move(years);
  for (int t = 0; t < y.T(); ++t)
    for (int j = 0; j < r; ++j) {
      y.values(t, j) = vals[t][j];
      y.mask(t, j) = mask[t][j];
    }
  return y;
}

inline ObservationSeries read_observations_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  return read_observations_csv(is);
}

inline json theta_to_json(const Theta& theta) {
  json arr = json::array();
  for (int i = 0; i < theta.size(); ++i)
    arr.push_back({{"name", theta.name(i)},
                   {"natural", theta.natural()[i]},
                   {"transform", theta.spec()[i].transform.to_string()}});
  return arr;
}

inline Theta theta_from_json(const json& arr) {
  if (!arr.is_array()) throw ConfigError("theta JSON must be an array");
  ThetaSpec spec;
  Eigen::VectorXd natural(arr.size());
  int i = 0;
  for (const auto& e : arr) {
    spec.push_back({e.at("name").get<std::string>(),
                    ParamTransform::parse(e.at("transform").get<std::string>())});
    natural[i++] = e.at("natural").get<double>();
  }
  return Theta(std::move(spec), std::move(natural));
}

inline Theta read_theta_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  json j;
  is >> j;
  return theta_from_json(j);
}

inline void write_json(const json& j, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << j.dump(2) << '\n';
}

inline json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  json j;
  is >> j;
  return j;
}

inline json rho_config_to_json(const RhoConfig& cfg) {
  json groups = json::array();
  for (const auto& [label, rho] : cfg.groups) {
    json g = {{"label", label}, {"family", to_string(rho.family)}};
    if (!rho.is_identity()) g["c"] = rho.c;
    groups.push_back(g);
  }
  return {{"groups", groups}};
}

inline RhoConfig rho_config_from_json(const json& j) {
  RhoConfig cfg;
  for (const auto& g : j.at("groups")) {
    const RhoFamily fam = rho_family_from_string(g.at("family").get<std::string>());
    RhoFunction rho = fam == RhoFamily::Identity
                          ? RhoFunction::identity()
                          : RhoFunction(fam, g.at("c").get<double>());
    cfg.groups.emplace_back(g.at("label").get<std::string>(), rho);
  }
  return cfg;
}

}  // namespace rssm

#endif
