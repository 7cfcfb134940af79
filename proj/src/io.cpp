#include "rwave/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace rwave::io {

namespace {

using cx = std::complex<double>;

void put_u64(std::string& out, std::uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}

void put_f64(std::string& out, double v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}

struct Reader {
  const std::string& s;
  std::size_t pos = 0;
  explicit Reader(const std::string& src) : s(src) {}
  void need(std::size_t n) const {
    if (pos + n > s.size()) throw std::runtime_error("trajectory file truncated");
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v;
    std::memcpy(&v, s.data() + pos, 8);
    pos += 8;
    return v;
  }
  double f64() {
    need(8);
    double v;
    std::memcpy(&v, s.data() + pos, 8);
    pos += 8;
    return v;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return data;
}

void put_spectrum(std::string& out, const std::vector<cx>& v) {
  for (const cx& z : v) {
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
}

std::vector<cx> get_spectrum(Reader& r, std::size_t n) {
  std::vector<cx> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double re = r.f64();
    const double im = r.f64();
    v[i] = cx(re, im);
  }
  return v;
}

constexpr char kTrajMagic[8] = {'R', 'W', 'T', 'R', 'A', 'J', '0', '1'};

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Csv::Csv(std::vector<std::string> columns) : cols_(std::move(columns)) {}

void Csv::add_row(std::vector<std::string> cells) {
  if (cells.size() != cols_.size())
    throw std::invalid_argument("csv row width does not match header");
  rows_.push_back(std::move(cells));
}

void Csv::add_numeric_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row(std::move(cells));
}

std::string Csv::str() const {
  std::string out;
  out += "# schema=";
  out += kCsvSchema;
  out += '\n';
  for (std::size_t i = 0; i < cols_.size(); ++i) {
    if (i) out += ',';
    out += cols_[i];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

void Csv::write(const std::string& path) const { write_text_atomic(path, str()); }

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string canonical_json(const nlohmann::json& j) {
  // nlohmann objects iterate in sorted key order already; dump with no
  // whitespace gives a canonical byte string.
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

std::string config_hash8(const nlohmann::json& j) {
  const std::uint64_t h = fnv1a64(canonical_json(j));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 8);
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

void save_trajectory(const std::string& path, const Trajectory& traj) {
  std::string out;
  out.append(kTrajMagic, 8);
  put_u64(out, static_cast<std::uint64_t>(traj.grid.dim));
  put_u64(out, static_cast<std::uint64_t>(traj.grid.points));
  put_f64(out, traj.grid.box);
  put_f64(out, traj.grid.dealias_ratio);
  put_f64(out, traj.dt_used);
  put_u64(out, traj.nan_aborted ? 1 : 0);
  put_f64(out, traj.nan_time);
  put_u64(out, traj.times.size());
  put_u64(out, traj.snaps.size());
  put_u64(out, traj.energy.t.size());
  for (double t : traj.times) put_f64(out, t);
  for (std::size_t i = 0; i < traj.energy.t.size(); ++i) {
    put_f64(out, traj.energy.t[i]);
    put_f64(out, traj.energy.kinetic[i]);
    put_f64(out, traj.energy.gradient[i]);
    put_f64(out, traj.energy.potential[i]);
  }
  for (const auto& snap : traj.snaps) {
    put_spectrum(out, snap.u.spectral());
    put_spectrum(out, snap.ut.spectral());
  }
  write_text_atomic(path, out);
}

Trajectory load_trajectory(const std::string& path) {
  const std::string data = read_file(path);
  Reader r(data);
  r.need(8);
  if (std::memcmp(data.data(), kTrajMagic, 8) != 0)
    throw std::runtime_error("not a trajectory file: " + path);
  r.pos = 8;
  const int dim = static_cast<int>(r.u64());
  const int points = static_cast<int>(r.u64());
  const double box = r.f64();
  const double ratio = r.f64();
  const GridSpec g = make_grid(dim, points, box, ratio);

  Trajectory traj;
  traj.grid = g;
  traj.dt_used = r.f64();
  traj.nan_aborted = r.u64() != 0;
  traj.nan_time = r.f64();
  const std::uint64_t n_times = r.u64();
  const std::uint64_t n_snaps = r.u64();
  const std::uint64_t n_energy = r.u64();
  traj.times.resize(n_times);
  for (auto& t : traj.times) t = r.f64();
  traj.energy.t.resize(n_energy);
  traj.energy.kinetic.resize(n_energy);
  traj.energy.gradient.resize(n_energy);
  traj.energy.potential.resize(n_energy);
  for (std::uint64_t i = 0; i < n_energy; ++i) {
    traj.energy.t[i] = r.f64();
    traj.energy.kinetic[i] = r.f64();
    traj.energy.gradient[i] = r.f64();
    traj.energy.potential[i] = r.f64();
  }
  traj.snaps.reserve(n_snaps);
  for (std::uint64_t i = 0; i < n_snaps; ++i) {
    auto u = get_spectrum(r, g.total());
    auto ut = get_spectrum(r, g.total());
    traj.snaps.push_back(
        FieldPair{Field::from_spectral(g, std::move(u)), Field::from_spectral(g, std::move(ut))});
  }
  return traj;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["schema"] = kManifestSchema;
  j["experiment"] = experiment;
  j["config_hash"] = config_hash;
  j["config"] = config_echo;
  j["started_utc"] = started_utc;
  j["finished_utc"] = finished_utc;
  j["duration_seconds"] = duration_seconds;
  j["threads"] = threads;
  j["exec"] = exec;
  j["dealias"] = dealias;
  j["skipped_cubes"] = skipped_cubes;
  j["outputs"] = outputs;
  j["nan_members"] = nan_members;
  j["summary"] = summary;
  return j;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  write_text_atomic(path, m.to_json().dump(2) + "\n");
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace rwave::io
