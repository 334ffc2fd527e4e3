#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "diamag/cli.hpp"

namespace diamag::cli {

namespace {

constexpr std::string_view kCacheMagic = "# diamag-moment-cache v1";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void put(std::ostream& os, Complex c) { os << ' ' << fmt(c.real()) << ' ' << fmt(c.imag()); }

// Every stored moment in file order; MS is MomentSet or const MomentSet.
template <typename MS, typename Visit>
void for_each_moment(MS& ms, Visit&& visit) {
  auto half = [&](auto& p, auto& r, auto& pr, auto& prr) {
    for (int i = 0; i < 3; ++i) visit(p[i]);
    for (int i = 0; i < 3; ++i) visit(r[i]);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) visit(pr(i, k));
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        for (int m = 0; m < 3; ++m) visit(prr(i, k, m));
  };
  half(ms.p_ge, ms.r_ge, ms.pr_ge, ms.prr_ge);
  half(ms.p_eg, ms.r_eg, ms.pr_eg, ms.prr_eg);
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

BoxGeometry box_geometry(const BoxSpec& s) { return BoxGeometry(s.lx, s.ly, s.lz, s.mass, s.charge); }

std::string cache_hash(const BoxSpec& s) {
  const std::string key = std::string(kCacheMagic) + " lx=" + fmt(s.lx) + " ly=" + fmt(s.ly) +
                          " lz=" + fmt(s.lz) + " mass=" + fmt(s.mass) +
                          " n_max=" + std::to_string(s.n_max);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(key)));
  return buf;
}

std::string format_cache(const BoxSpec& spec, const std::vector<Transition>& transitions) {
  const BoxGeometry geom = box_geometry(spec);
  std::ostringstream os;
  os << kCacheMagic << " hash=" << cache_hash(spec) << '\n';
  os << "# lx=" << fmt(spec.lx) << " ly=" << fmt(spec.ly) << " lz=" << fmt(spec.lz)
     << " mass=" << fmt(spec.mass) << " n_max=" << spec.n_max << " rows=" << transitions.size() << '\n';
  os << "# nx ny nz omega_eg d_edip d_quad d_mdip d_dia d_dipoct, then (re im) of"
        " p r pr prr for <g|.|e> and <e|.|g>\n";
  for (const auto& t : transitions) {
    const TransitionStrengths s = transition_strengths(t.moments, geom);
    os << t.excited[0] << ' ' << t.excited[1] << ' ' << t.excited[2] << ' ' << fmt(s.omega_eg) << ' '
       << fmt(s.d_edip) << ' ' << fmt(s.d_quad) << ' ' << fmt(s.d_mdip) << ' ' << fmt(s.d_dia) << ' '
       << fmt(s.d_dipoct);
    for_each_moment(t.moments, [&](const Complex& c) { put(os, c); });
    os << '\n';
  }
  return os.str();
}

std::optional<MomentCache> read_cache(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  const std::string src = path.string();
  std::string line;
  if (!std::getline(in, line) || line.rfind(kCacheMagic, 0) != 0)
    throw ConfigError(src + ":1: not a moment cache");
  const auto h = line.find("hash=");
  if (h == std::string::npos) throw ConfigError(src + ":1: cache header has no hash");

  MomentCache cache;
  cache.hash = line.substr(h + 5);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    int n[3];
    double omega, skip;
    row >> n[0] >> n[1] >> n[2] >> omega;
    for (int i = 0; i < 5; ++i) row >> skip;
    Transition t;
    try {
      t.excited = BoxState(n[0], n[1], n[2]);
    } catch (const std::invalid_argument&) {
      throw ConfigError(src + ":" + std::to_string(line_no) + ": bad quantum numbers");
    }
    t.moments.omega_eg = omega;
    for_each_moment(t.moments, [&](Complex& c) {
      double re, im;
      row >> re >> im;
      c = {re, im};
    });
    if (!row) throw ConfigError(src + ":" + std::to_string(line_no) + ": truncated cache row");
    cache.transitions.push_back(std::move(t));
  }
  return cache;
}

std::vector<Transition> box_transitions(const BoxSpec& spec, const std::filesystem::path& cache_path,
                                        std::ostream& log) {
  const std::string hash = cache_hash(spec);
  if (const auto cache = read_cache(cache_path)) {
    if (cache->hash == hash) return cache->transitions;
    log << "notice: " << cache_path.string() << " was built for a different geometry; recomputing\n";
  }
  return enumerate_transitions(spec.n_max, box_geometry(spec));
}

std::string format_dataset(const MediumModel& model, const Eigen::ArrayXd& grid) {
  std::ostringstream os;
  os << "# units: omega_p\n";
  os << "omega,re_eps,im_eps,re_mu,im_mu,re_epsmu,im_epsmu\n";
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const ResponseSample s = sample(model, grid[i]);
    os << fmt_g(s.omega) << ',' << fmt_g(s.eps.real()) << ',' << fmt_g(s.eps.imag()) << ','
       << fmt_g(s.mu.real()) << ',' << fmt_g(s.mu.imag()) << ',' << fmt_g(s.epsmu.real()) << ','
       << fmt_g(s.epsmu.imag()) << '\n';
  }
  return os.str();
}

std::vector<DatasetRow> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  std::vector<DatasetRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'o') continue;
    std::istringstream ss(line);
    double v[7];
    char comma;
    ss >> v[0];
    for (int i = 1; i < 7; ++i) ss >> comma >> v[i];
    if (!ss) throw std::runtime_error("malformed dataset row: " + line);
    rows.push_back({v[0], {v[1], v[2]}, {v[3], v[4]}, {v[5], v[6]}});
  }
  return rows;
}

}  // namespace diamag::cli
