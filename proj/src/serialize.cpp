#include "coexist/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace coexist {

using nlohmann::json;

namespace {

json complex_to_json(cxd z) { return json::array({z.real(), z.imag()}); }

cxd complex_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json vec_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

Vec vec_from_json(const json& j) {
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

json mat_to_json(const Mat& m) {
  json out = json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(vec_to_json(m.col(c)));
  return out;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

json scene_to_json(const SceneConfig& scene) {
  json j;
  j["index_split"] = {{"n1", scene.split.n1}, {"n2", scene.split.n2}, {"n", scene.split.n}};
  j["pulse"] = {{"excess_bandwidth", scene.pulse.excess_bandwidth},
                {"chip_period", scene.pulse.chip_period},
                {"truncation_halfwidth", scene.pulse.trunc_halfwidth}};
  j["dictionary"] = {{"pulse_length", scene.dictionary.pulse_length},
                     {"k", scene.dictionary.k},
                     {"time_columns", mat_to_json(scene.dictionary.time_columns)}};
  j["radars"] = json::array();
  for (const auto& r : scene.radars) {
    j["radars"].push_back({{"delay", r.delay},
                           {"normalized_delay", r.normalized_delay},
                           {"coupling", complex_to_json(r.coupling)},
                           {"subspace_coeff", vec_to_json(r.subspace_coeff)}});
  }
  json link;
  link["m"] = scene.link.m;
  link["channel_diag"] = vec_to_json(scene.link.gamma);
  link["constellation"] =
      scene.link.constellation.kind() == Constellation::Kind::bpsk ? "bpsk" : "qpsk";
  link["energy"] = scene.link.constellation.energy();
  link["ricean_factor"] =
      std::isinf(scene.link.ricean_ratio) ? json("inf") : json(scene.link.ricean_ratio);
  j["link"] = link;
  j["noise_var"] = scene.noise_var;
  if (scene.snr_db) j["snr_db"] = *scene.snr_db;
  if (scene.sir_db) j["sir_db"] = *scene.sir_db;
  j["seed"] = scene.seed;
  return j;
}

SceneConfig scene_from_json(const json& j) {
  SceneConfig scene;
  const auto& js = j.at("index_split");
  scene.split.n1 = js.at("n1").get<int>();
  scene.split.n2 = js.at("n2").get<int>();
  scene.split.n = js.at("n").get<int>();
  if (scene.split.n1 + scene.split.n2 + 1 != scene.split.n) {
    throw std::invalid_argument("scene_from_json: inconsistent index split");
  }

  const auto& jp = j.at("pulse");
  scene.pulse.excess_bandwidth = jp.at("excess_bandwidth").get<double>();
  scene.pulse.chip_period = jp.at("chip_period").get<double>();
  scene.pulse.trunc_halfwidth = jp.at("truncation_halfwidth").get<double>();

  const auto& jd = j.at("dictionary");
  scene.dictionary.pulse_length = jd.at("pulse_length").get<int>();
  scene.dictionary.k = jd.at("k").get<int>();
  const auto& cols = jd.at("time_columns");
  scene.dictionary.time_columns = Mat(scene.split.n, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    scene.dictionary.time_columns.col(static_cast<Eigen::Index>(c)) = vec_from_json(cols[c]);
  }
  scene.dictionary.freq_columns = Mat(scene.split.n, scene.dictionary.k);
  for (int c = 0; c < scene.dictionary.k; ++c) {
    scene.dictionary.freq_columns.col(c) = dft(scene.split, scene.dictionary.time_columns.col(c));
  }

  for (const auto& jr : j.at("radars")) {
    RadarSource r;
    r.delay = jr.at("delay").get<double>();
    r.normalized_delay = jr.at("normalized_delay").get<double>();
    r.coupling = complex_from_json(jr.at("coupling"));
    r.subspace_coeff = vec_from_json(jr.at("subspace_coeff"));
    scene.radars.push_back(std::move(r));
  }

  const auto& jl = j.at("link");
  const std::string kind = jl.at("constellation").get<std::string>();
  const double energy = jl.at("energy").get<double>();
  Constellation constellation(kind == "bpsk" ? Constellation::Kind::bpsk
                                             : Constellation::Kind::qpsk,
                              energy);
  double ricean = std::numeric_limits<double>::infinity();
  if (!jl.at("ricean_factor").is_string()) ricean = jl.at("ricean_factor").get<double>();
  scene.link = make_ofdm_link(scene.split, vec_from_json(jl.at("channel_diag")), constellation,
                              ricean);
  scene.link.m = jl.at("m").get<int>();

  scene.noise_var = j.at("noise_var").get<double>();
  if (j.contains("snr_db")) scene.snr_db = j.at("snr_db").get<double>();
  if (j.contains("sir_db")) scene.sir_db = j.at("sir_db").get<double>();
  scene.seed = j.at("seed").get<std::uint64_t>();
  return scene;
}

std::string scene_to_json_string(const SceneConfig& scene) { return scene_to_json(scene).dump(2); }

SceneConfig scene_from_json_string(const std::string& text) {
  return scene_from_json(json::parse(text));
}

std::string observation_to_csv(const FreqObservation& obs) {
  std::ostringstream out;
  out << "k,re,im\n";
  for (int r = 0; r < obs.split.n; ++r) {
    out << obs.split.k_at(r) << ',' << fmt_double(obs.values(r).real()) << ','
        << fmt_double(obs.values(r).imag()) << '\n';
  }
  return out.str();
}

FreqObservation observation_from_csv(const std::string& text, double noise_var) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("observation_from_csv: empty input");
  std::vector<std::pair<int, cxd>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int k = 0;
    double re = 0, im = 0;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf", &k, &re, &im) != 3) {
      throw std::invalid_argument("observation_from_csv: malformed row: " + line);
    }
    rows.emplace_back(k, cxd(re, im));
  }
  FreqObservation obs;
  obs.split = IndexSplit::for_size(static_cast<int>(rows.size()));
  obs.values = Vec(obs.split.n);
  for (const auto& [k, val] : rows) {
    const int r = obs.split.row_of(k);
    if (r < 0 || r >= obs.split.n) throw std::invalid_argument("observation_from_csv: bad k index");
    obs.values(r) = val;
  }
  obs.noise_var = noise_var;
  return obs;
}

json radar_report_json(const std::vector<RadarEstimate>& radars) {
  json out = json::array();
  for (const auto& r : radars) {
    out.push_back({{"delay_s", r.delay_s},
                   {"normalized_delay", r.delay_norm},
                   {"coeff", vec_to_json(r.coeff)},
                   {"waveform_energy", r.waveform.squaredNorm()}});
  }
  return out;
}

json solve_result_json(const SolveResult& result) {
  json j;
  j["solver"] = result.solver_name;
  j["symbols"] = vec_to_json(result.symbols);
  j["v_hat"] = vec_to_json(result.v_hat);
  j["radars"] = radar_report_json(result.radars);
  j["ser_trace"] = result.ser_trace;
  j["objective_trace"] = result.objective_trace;
  j["outer_iterations"] = result.outer_iterations;
  j["reached_fixed_point"] = result.reached_fixed_point;
  j["solver_failed"] = result.solver_failed;
  j["wall_time_s"] = result.wall_time_s;
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

}  // namespace coexist
